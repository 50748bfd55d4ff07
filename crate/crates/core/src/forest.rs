//! Ensembles of independently grown trees with per-tree OOB bookkeeping.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{draw_sample, Dataset, Response, SampleSplit, Sampling, Task};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tree::{grow_tree, Tree, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub tree: TreeParams,
    #[serde(default)]
    pub sampling: Sampling,
    pub seed: u64,
}

impl ForestParams {
    pub fn validate(&self, p: usize) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::Config("n_trees must be at least 1".into()));
        }
        self.sampling.validate()?;
        self.tree.validate(p)
    }
}

/// Identifies the dataset a forest was trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub n: usize,
    pub p: usize,
    pub task: Task,
    pub content_hash: u64,
}

impl Fingerprint {
    pub fn of(data: &Dataset) -> Self {
        Fingerprint {
            n: data.n(),
            p: data.p(),
            task: data.task(),
            content_hash: data.content_hash(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedTree {
    pub tree: Tree,
    pub sample: SampleSplit,
}

pub const FOREST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    schema_version: u32,
    params: ForestParams,
    fingerprint: Fingerprint,
    trees: Vec<TrainedTree>,
}

/// Train `params.n_trees` trees. Tree `s` draws its sample and its feature
/// subsets from `Rng::new(seed).split(s)` only, so the result does not
/// depend on the rayon pool size and a larger forest extends a smaller one.
pub fn train_forest(data: &Dataset, params: &ForestParams) -> Result<Forest> {
    params.validate(data.p())?;
    let root = Rng::new(params.seed);
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|s| {
            let mut rng = root.split(s as u64);
            let sample = draw_sample(data.n(), params.sampling, &mut rng)?;
            let tree = grow_tree(data, &sample, &params.tree, &mut rng)?;
            Ok(TrainedTree { tree, sample })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Forest {
        schema_version: FOREST_SCHEMA_VERSION,
        params: *params,
        fingerprint: Fingerprint::of(data),
        trees,
    })
}

impl Forest {
    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    pub fn trees(&self) -> &[TrainedTree] {
        &self.trees
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn check_dataset(&self, data: &Dataset) -> Result<()> {
        let fp = Fingerprint::of(data);
        if fp != self.fingerprint {
            return Err(Error::Fingerprint(format!(
                "forest trained on n={}, p={}, {:?} (hash {:016x}); got n={}, p={}, {:?} (hash {:016x})",
                self.fingerprint.n,
                self.fingerprint.p,
                self.fingerprint.task,
                self.fingerprint.content_hash,
                fp.n,
                fp.p,
                fp.task,
                fp.content_hash
            )));
        }
        Ok(())
    }

    /// Unweighted mean of the tree predictions.
    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.fingerprint.task.output_dim()];
        for t in &self.trees {
            for (o, v) in out.iter_mut().zip(t.tree.predict(x)) {
                *o += v;
            }
        }
        let k = self.trees.len() as f64;
        out.iter_mut().for_each(|o| *o /= k);
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Forest> {
        let forest: Forest = serde_json::from_str(text)?;
        if forest.schema_version != FOREST_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported forest schema version {}",
                forest.schema_version
            )));
        }
        for (s, t) in forest.trees.iter().enumerate() {
            t.tree.validate()?;
            if t.sample.n() != forest.fingerprint.n || !t.sample.is_consistent() {
                return Err(Error::Contract(format!(
                    "tree {s} has an inconsistent sample"
                )));
            }
        }
        Ok(forest)
    }
}

/// Per-tree OOB loss; `None` marks a tree with no OOB rows.
#[derive(Debug, Clone, PartialEq)]
pub struct OobLosses {
    pub per_tree: Vec<Option<f64>>,
}

impl OobLosses {
    pub fn skipped(&self) -> usize {
        self.per_tree.iter().filter(|l| l.is_none()).count()
    }
}

/// Produces, for tree `s` and its OOB rows, the row each OOB row should take
/// its permuted feature value from.
pub type PermutationFn<'a> = dyn Fn(usize, &[usize]) -> Vec<usize> + Sync + 'a;

/// Loss of each tree on its own OOB rows: MSE for regression,
/// misclassification rate (argmax of the leaf frequencies, lowest class on
/// ties) for classification. With `permutation = Some((k, f))`, feature `k`
/// of OOB row `oob[j]` is replaced by its value at row `f(s, oob)[j]`.
pub fn oob_loss(
    forest: &Forest,
    data: &Dataset,
    permutation: Option<(usize, &PermutationFn<'_>)>,
) -> Result<OobLosses> {
    forest.check_dataset(data)?;
    if let Some((k, _)) = permutation {
        if k >= data.p() {
            return Err(Error::Config(format!("feature {k} out of range")));
        }
    }
    let per_tree: Vec<Option<f64>> = forest
        .trees
        .iter()
        .enumerate()
        .map(|(s, t)| {
            let oob = t.sample.oob();
            if oob.is_empty() {
                return None;
            }
            let perm = permutation.map(|(k, f)| (k, f(s, oob)));
            let perm = perm.as_ref().map(|(k, p)| (*k, p.as_slice()));
            Some(tree_oob_loss(&t.tree, data, oob, perm))
        })
        .collect();
    if per_tree.iter().all(Option::is_none) {
        return Err(Error::NoOobSamples);
    }
    Ok(OobLosses { per_tree })
}

/// Loss of one tree on `rows`, optionally reading feature `k` of `rows[j]`
/// from row `sources[j]`.
pub(crate) fn tree_oob_loss(
    tree: &Tree,
    data: &Dataset,
    rows: &[usize],
    permuted: Option<(usize, &[usize])>,
) -> f64 {
    let mut x = vec![0.0; data.p()];
    let mut loss = 0.0;
    for (j, &i) in rows.iter().enumerate() {
        for (k, xk) in x.iter_mut().enumerate() {
            *xk = data.value(i, k);
        }
        if let Some((k, sources)) = permuted {
            x[k] = data.value(sources[j], k);
        }
        let pred = tree.predict(&x);
        loss += match data.response() {
            Response::Numeric(y) => (pred[0] - y[i]).powi(2),
            Response::Classes { labels, .. } => (argmax(pred) != labels[i]) as u8 as f64,
        };
    }
    loss / rows.len() as f64
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (d, &p) in v.iter().enumerate() {
        if p > v[best] {
            best = d;
        }
    }
    best
}
