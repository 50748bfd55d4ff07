use rand::seq::{index, SliceRandom};

use super::split::{best_split, spread, Moments, WeightedRow};
use super::{Node, Split, TieBreak, Tree, TreeParams};
use crate::data::{Dataset, SampleSplit, Targets};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Grow one tree on the in-bag rows of `sample`.
///
/// Nodes are expanded depth-first, left before right. Each node draws a
/// fresh `mtry`-subset of features from `rng`; growth stops when responses
/// are constant, the depth cap is reached, or no valid split exists.
pub fn grow_tree(
    data: &Dataset,
    sample: &SampleSplit,
    params: &TreeParams,
    rng: &mut Rng,
) -> Result<Tree> {
    params.validate(data.p())?;
    if sample.n() != data.n() {
        return Err(Error::Contract(format!(
            "sample covers {} rows, dataset has {}",
            sample.n(),
            data.n()
        )));
    }
    let rows = sample.weighted_rows();
    if rows.is_empty() {
        return Err(Error::Contract("no in-bag rows to grow a tree on".into()));
    }
    let targets = data.targets();
    let mut nodes = vec![make_node(&targets, &rows, 0, 0)];
    let mut stack = vec![(0usize, rows)];

    while let Some((id, rows)) = stack.pop() {
        let depth = nodes[id].depth;
        if params.max_depth.is_some_and(|d| depth >= d)
            || nodes[id].n_samples < 2 * params.min_leaf as u64
            || is_constant(&targets, &rows)
        {
            continue;
        }
        let mut features = index::sample(rng, data.p(), params.mtry).into_vec();
        match params.tie_break {
            TieBreak::LowestIndex => features.sort_unstable(),
            TieBreak::DrawOrder => features.shuffle(rng),
        }
        let Some(best) = best_split(
            data,
            &targets,
            &rows,
            &features,
            params.min_leaf,
            params.allow_zero_gain_splits,
        ) else {
            continue;
        };
        let (left_rows, right_rows): (Vec<WeightedRow>, Vec<WeightedRow>) = rows
            .into_iter()
            .partition(|&(i, _)| data.value(i, best.feature) <= best.threshold);
        let (left, right) = (nodes.len(), nodes.len() + 1);
        nodes.push(make_node(&targets, &left_rows, left, depth + 1));
        nodes.push(make_node(&targets, &right_rows, right, depth + 1));
        nodes[id].split = Some(Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
            impurity_decrease: best.decrease,
        });
        stack.push((right, right_rows));
        stack.push((left, left_rows));
    }
    Ok(Tree::from_parts(nodes, *params, data.p(), data.task()))
}

fn make_node(targets: &Targets, rows: &[WeightedRow], id: usize, depth: usize) -> Node {
    let m = Moments::of(targets, rows);
    // A constant node is stored exactly; the running sums would leave
    // rounding residue in both the mean and the impurity.
    let (mean, impurity) = if is_constant(targets, rows) {
        (targets.row(rows[0].0).to_vec(), 0.0)
    } else {
        let mean = m.mean();
        let impurity = spread(targets, rows, &mean) / m.weight as f64;
        (mean, impurity)
    };
    Node {
        id,
        depth,
        n_samples: m.weight,
        mean,
        impurity,
        split: None,
    }
}

fn is_constant(targets: &Targets, rows: &[WeightedRow]) -> bool {
    let first = targets.row(rows[0].0);
    rows.iter().all(|&(i, _)| targets.row(i) == first)
}
