//! Single CART tree stored as a node arena.

mod grow;
mod split;

use serde::{Deserialize, Serialize};

use crate::data::Task;
use crate::error::{Error, Result};

pub use grow::grow_tree;
pub(crate) use split::Moments;
pub use split::{
    best_split, impurity, impurity_decrease, impurity_decrease_product, SplitCandidate, WeightedRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Minimum in-bag weight of every leaf.
    pub min_leaf: usize,
    /// Depth cap; the root has depth 0. `None` grows until another rule stops.
    pub max_depth: Option<usize>,
    /// Features drawn (without replacement) as split candidates per node.
    pub mtry: usize,
    /// Keep splitting when the best decrease is exactly zero.
    #[serde(default)]
    pub allow_zero_gain_splits: bool,
    #[serde(default)]
    pub tie_break: TieBreak,
}

/// Order in which a node's candidate features are scanned; among splits
/// with equal decrease the first one scanned wins.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Ascending feature index.
    LowestIndex,
    /// The seeded random order in which candidates were drawn.
    #[default]
    DrawOrder,
}

impl TieBreak {
    pub fn name(&self) -> &'static str {
        match self {
            TieBreak::LowestIndex => "lowest-index",
            TieBreak::DrawOrder => "draw-order",
        }
    }
}

impl std::fmt::Display for TieBreak {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TieBreak {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest-index" => Ok(TieBreak::LowestIndex),
            "draw-order" => Ok(TieBreak::DrawOrder),
            _ => Err(Error::Config(format!(
                "unknown tie-break {s:?} (expected lowest-index or draw-order)"
            ))),
        }
    }
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_leaf: 1,
            max_depth: None,
            mtry: 1,
            allow_zero_gain_splits: false,
            tie_break: Default::default(),
        }
    }
}

impl TreeParams {
    pub fn validate(&self, p: usize) -> Result<()> {
        if self.min_leaf == 0 {
            return Err(Error::Config("min_leaf must be at least 1".into()));
        }
        if self.max_depth == Some(0) {
            return Err(Error::Config("max_depth must be at least 1".into()));
        }
        if self.mtry == 0 || self.mtry > p {
            return Err(Error::Config(format!(
                "mtry must lie in 1..={p}, got {}",
                self.mtry
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub left: usize,
    pub right: usize,
    pub impurity_decrease: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub depth: usize,
    /// In-bag weight reaching the node, N_n(t).
    pub n_samples: u64,
    /// In-bag mean response; class frequencies for classification.
    pub mean: Vec<f64>,
    pub impurity: f64,
    /// `None` for leaves.
    pub split: Option<Split>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
    params: TreeParams,
    n_features: usize,
    task: Task,
}

impl Tree {
    pub(crate) fn from_parts(
        nodes: Vec<Node>,
        params: TreeParams,
        n_features: usize,
        task: Task,
    ) -> Self {
        Tree {
            nodes,
            params,
            n_features,
            task,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn output_dim(&self) -> usize {
        self.task.output_dim()
    }

    /// Inner nodes, I(T).
    pub fn inner_nodes(&self) -> impl Iterator<Item = (&Node, &Split)> {
        self.nodes
            .iter()
            .filter_map(|n| n.split.as_ref().map(|s| (n, s)))
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn n_inner(&self) -> usize {
        self.inner_nodes().count()
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Whether any inner node splits on `feature`.
    pub fn uses_feature(&self, feature: usize) -> bool {
        self.inner_nodes().any(|(_, s)| s.feature == feature)
    }

    /// Node ids from the root to the leaf containing `x`.
    pub fn path(&self, x: &[f64]) -> Vec<usize> {
        let mut path = vec![0];
        let mut id = 0;
        while let Some(s) = &self.nodes[id].split {
            id = if x[s.feature] <= s.threshold {
                s.left
            } else {
                s.right
            };
            path.push(id);
        }
        path
    }

    pub fn leaf(&self, x: &[f64]) -> &Node {
        let mut node = &self.nodes[0];
        while let Some(s) = &node.split {
            node = &self.nodes[if x[s.feature] <= s.threshold {
                s.left
            } else {
                s.right
            }];
        }
        node
    }

    /// In-bag mean of the leaf containing `x`.
    pub fn predict(&self, x: &[f64]) -> &[f64] {
        &self.leaf(x).mean
    }

    /// f_{T,k}(x): along the path of `x`, the sum of (child mean - node
    /// mean) over nodes that split on `feature`.
    pub fn contribution(&self, x: &[f64], feature: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.output_dim()];
        self.walk_steps(x, |node, split, child| {
            if split.feature == feature {
                for ((o, c), m) in out.iter_mut().zip(&child.mean).zip(&node.mean) {
                    *o += c - m;
                }
            }
        });
        out
    }

    /// All p contributions at once; `predict(x) = root mean + sum_k row k`.
    pub fn contributions(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.output_dim()]; self.n_features];
        self.walk_steps(x, |node, split, child| {
            for ((o, c), m) in out[split.feature]
                .iter_mut()
                .zip(&child.mean)
                .zip(&node.mean)
            {
                *o += c - m;
            }
        });
        out
    }

    /// Calls `f(node, split, child)` for each inner node on the path of `x`.
    pub(crate) fn walk_steps<'a>(
        &'a self,
        x: &[f64],
        mut f: impl FnMut(&'a Node, &'a Split, &'a Node),
    ) {
        let mut node = &self.nodes[0];
        while let Some(s) = &node.split {
            let child = &self.nodes[if x[s.feature] <= s.threshold {
                s.left
            } else {
                s.right
            }];
            f(node, s, child);
            node = child;
        }
    }

    /// Copy of the tree with the subtree under `id` replaced by a leaf.
    /// Node ids are re-assigned in the original order.
    pub fn collapse(&self, id: usize) -> Result<Tree> {
        if id >= self.nodes.len() {
            return Err(Error::Contract(format!("node {id} does not exist")));
        }
        let mut keep = vec![true; self.nodes.len()];
        let mut stack: Vec<usize> = self.nodes[id]
            .split
            .iter()
            .flat_map(|s| [s.left, s.right])
            .collect();
        while let Some(c) = stack.pop() {
            keep[c] = false;
            if let Some(s) = &self.nodes[c].split {
                stack.extend([s.left, s.right]);
            }
        }
        let mut new_id = vec![usize::MAX; self.nodes.len()];
        let mut next = 0;
        for (old, &k) in keep.iter().enumerate() {
            if k {
                new_id[old] = next;
                next += 1;
            }
        }
        let nodes = self
            .nodes
            .iter()
            .filter(|n| keep[n.id])
            .map(|n| {
                let mut n = n.clone();
                if n.id == id {
                    n.split = None;
                }
                if let Some(s) = &mut n.split {
                    s.left = new_id[s.left];
                    s.right = new_id[s.right];
                }
                n.id = new_id[n.id];
                n
            })
            .collect();
        Ok(Tree {
            nodes,
            params: self.params,
            n_features: self.n_features,
            task: self.task,
        })
    }

    /// Structural checks: ids match positions, children are valid and each
    /// non-root node has exactly one parent, counts and means are conserved
    /// across every split, decreases are non-negative.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Contract(m));
        if self.nodes.is_empty() {
            return bad("tree has no nodes".into());
        }
        let dim = self.output_dim();
        let mut parents = vec![0usize; self.nodes.len()];
        for (pos, n) in self.nodes.iter().enumerate() {
            if n.id != pos {
                return bad(format!("node at position {pos} has id {}", n.id));
            }
            if n.mean.len() != dim {
                return bad(format!("node {pos} mean has length {}", n.mean.len()));
            }
            let Some(s) = &n.split else { continue };
            if s.feature >= self.n_features {
                return bad(format!(
                    "node {pos} splits on unknown feature {}",
                    s.feature
                ));
            }
            if s.impurity_decrease.is_nan() || s.impurity_decrease < 0.0 {
                return bad(format!("node {pos} has negative impurity decrease"));
            }
            for c in [s.left, s.right] {
                if c == 0 || c >= self.nodes.len() {
                    return bad(format!("node {pos} has invalid child {c}"));
                }
                parents[c] += 1;
                if self.nodes[c].depth != n.depth + 1 {
                    return bad(format!("child {c} of node {pos} has wrong depth"));
                }
            }
            let (l, r) = (&self.nodes[s.left], &self.nodes[s.right]);
            if l.n_samples + r.n_samples != n.n_samples {
                return bad(format!("node {pos}: child counts do not add up"));
            }
            for d in 0..dim {
                let lhs = l.n_samples as f64 * l.mean[d] + r.n_samples as f64 * r.mean[d];
                let rhs = n.n_samples as f64 * n.mean[d];
                if (lhs - rhs).abs() > 1e-10 * (1.0 + rhs.abs()) {
                    return bad(format!("node {pos}: child means do not recombine"));
                }
            }
        }
        if parents[1..].iter().any(|&c| c != 1) {
            return bad("arena is not a binary tree".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Tree> {
        let tree: Tree = serde_json::from_str(text)?;
        tree.validate()?;
        Ok(tree)
    }
}
