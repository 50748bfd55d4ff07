use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::{ImportanceMeta, ImportanceVector, Method};
use crate::data::{Dataset, Response, SampleSplit};
use crate::error::{Error, Result};
use crate::forest::{tree_oob_loss, Forest, TrainedTree};
use crate::rng::Rng;
use crate::tree::{Moments, Tree, WeightedRow};

fn check_tree(tree: &Tree, data: &Dataset, sample: &SampleSplit) -> Result<()> {
    if tree.n_features() != data.p() || tree.task() != data.task() {
        return Err(Error::Fingerprint(format!(
            "tree expects p={} {:?}, dataset has p={} {:?}",
            tree.n_features(),
            tree.task(),
            data.p(),
            data.task()
        )));
    }
    if sample.n() != data.n() || tree.root().n_samples != sample.inbag_total() {
        return Err(Error::Fingerprint(
            "sample does not match the tree's in-bag total or the dataset size".into(),
        ));
    }
    Ok(())
}

/// Classic MDI of one tree: sum over inner nodes splitting on k of
/// (N(t) / |D^(T)|) * decrease(t).
pub fn mdi_classic(tree: &Tree, data: &Dataset, sample: &SampleSplit) -> Result<Vec<f64>> {
    check_tree(tree, data, sample)?;
    let total = tree.root().n_samples as f64;
    let mut scores = vec![0.0; tree.n_features()];
    for (node, split) in tree.inner_nodes() {
        scores[split.feature] += node.n_samples as f64 / total * split.impurity_decrease;
    }
    Ok(scores)
}

/// <child mean - node mean, y_i>, with one-hot y for classification.
#[inline]
fn step_dot(response: &Response, i: usize, child: &[f64], node: &[f64]) -> f64 {
    match response {
        Response::Numeric(y) => (child[0] - node[0]) * y[i],
        Response::Classes { labels, .. } => child[labels[i]] - node[labels[i]],
    }
}

/// Covariance form of MDI over the given weighted rows:
/// (1 / sum w) * sum_i w_i <f_{T,k}(x_i), y_i>.
pub fn mdi_covariance(tree: &Tree, rows: &[WeightedRow], data: &Dataset) -> Result<Vec<f64>> {
    if tree.n_features() != data.p() || tree.task() != data.task() {
        return Err(Error::Fingerprint(
            "tree and dataset disagree on shape or task".into(),
        ));
    }
    let total: u64 = rows.iter().map(|&(_, w)| w as u64).sum();
    if total == 0 {
        return Err(Error::Contract(
            "covariance MDI over an empty row set".into(),
        ));
    }
    let mut scores = vec![0.0; tree.n_features()];
    let mut x = vec![0.0; data.p()];
    for &(i, w) in rows {
        for (k, xk) in x.iter_mut().enumerate() {
            *xk = data.value(i, k);
        }
        let w = w as f64;
        tree.walk_steps(&x, |node, split, child| {
            scores[split.feature] += w * step_dot(data.response(), i, &child.mean, &node.mean);
        });
    }
    let total = total as f64;
    scores.iter_mut().for_each(|s| *s /= total);
    Ok(scores)
}

/// Impurity decreases recomputed from the OOB rows routed down the tree,
/// weighted by N_oob(t) / |OOB|. Nodes where a child receives no OOB row
/// contribute nothing.
pub fn naive_oob_tree(tree: &Tree, data: &Dataset, oob: &[usize]) -> Result<Vec<f64>> {
    if oob.is_empty() {
        return Err(Error::NoOobSamples);
    }
    let dim = tree.output_dim();
    let mut moments = vec![Moments::new(dim); tree.nodes().len()];
    let targets = data.targets();
    let mut x = vec![0.0; data.p()];
    for &i in oob {
        for (k, xk) in x.iter_mut().enumerate() {
            *xk = data.value(i, k);
        }
        let y = targets.row(i);
        for id in tree.path(&x) {
            moments[id].add(y, 1);
        }
    }
    let total = oob.len() as f64;
    let mut scores = vec![0.0; tree.n_features()];
    for (node, split) in tree.inner_nodes() {
        let (l, r) = (&moments[split.left], &moments[split.right]);
        if l.weight == 0 || r.weight == 0 {
            continue;
        }
        let (wl, wr) = (l.weight as f64, r.weight as f64);
        let w = wl + wr;
        let dist2: f64 = l
            .sum
            .iter()
            .zip(&r.sum)
            .map(|(a, b)| (a / wl - b / wr).powi(2))
            .sum();
        let decrease = (wl / w) * (wr / w) * dist2;
        scores[split.feature] += moments[node.id].weight as f64 / total * decrease;
    }
    Ok(scores)
}

fn meta(forest: &Forest, skipped: usize) -> ImportanceMeta {
    ImportanceMeta {
        forest: *forest.params(),
        n_trees: forest.n_trees(),
        skipped_trees: skipped,
        mda_repeats: None,
        mda_seed: None,
    }
}

/// Mean of per-tree vectors over the trees that produced one.
fn average(
    method: Method,
    forest: &Forest,
    p: usize,
    per_tree: Vec<Option<Vec<f64>>>,
) -> Result<ImportanceVector> {
    let used = per_tree.iter().flatten().count();
    if used == 0 {
        return Err(Error::NoOobSamples);
    }
    let mut scores = vec![0.0; p];
    for v in per_tree.iter().flatten() {
        for (s, x) in scores.iter_mut().zip(v) {
            *s += x;
        }
    }
    scores.iter_mut().for_each(|s| *s /= used as f64);
    Ok(ImportanceVector {
        method,
        scores,
        metadata: meta(forest, per_tree.len() - used),
    })
}

fn per_tree<F>(forest: &Forest, data: &Dataset, f: F) -> Result<Vec<Option<Vec<f64>>>>
where
    F: Fn(usize, &TrainedTree) -> Result<Option<Vec<f64>>> + Sync,
{
    forest.check_dataset(data)?;
    forest
        .trees()
        .par_iter()
        .enumerate()
        .map(|(s, t)| f(s, t))
        .collect()
}

/// Forest MDI: mean of the per-tree classic MDI.
pub fn mdi(forest: &Forest, data: &Dataset) -> Result<ImportanceVector> {
    let v = per_tree(forest, data, |_, t| {
        mdi_classic(&t.tree, data, &t.sample).map(Some)
    })?;
    average(Method::Mdi, forest, data.p(), v)
}

pub fn mdi_covariance_inbag(forest: &Forest, data: &Dataset) -> Result<ImportanceVector> {
    let v = per_tree(forest, data, |_, t| {
        mdi_covariance(&t.tree, &t.sample.weighted_rows(), data).map(Some)
    })?;
    average(Method::MdiCovarianceInbag, forest, data.p(), v)
}

/// Covariance form on each tree's OOB rows, averaged over trees that have
/// OOB rows.
pub fn mdi_oob(forest: &Forest, data: &Dataset) -> Result<ImportanceVector> {
    let v = per_tree(forest, data, |_, t| {
        if t.sample.oob().is_empty() {
            return Ok(None);
        }
        mdi_covariance(&t.tree, &t.sample.oob_rows(), data).map(Some)
    })?;
    average(Method::MdiOob, forest, data.p(), v)
}

pub fn naive_oob(forest: &Forest, data: &Dataset) -> Result<ImportanceVector> {
    let v = per_tree(forest, data, |_, t| {
        if t.sample.oob().is_empty() {
            return Ok(None);
        }
        naive_oob_tree(&t.tree, data, t.sample.oob()).map(Some)
    })?;
    average(Method::NaiveOob, forest, data.p(), v)
}

/// Permutation importance: per tree and feature, the mean OOB loss over
/// `n_repeats` within-OOB permutations of the feature minus the baseline OOB
/// loss. Features a tree never splits on score exactly 0 for that tree.
/// Tree s, feature k, repeat r shuffles with `rng.split(s).split(k).split(r)`.
pub fn mda(
    forest: &Forest,
    data: &Dataset,
    n_repeats: usize,
    rng: &Rng,
) -> Result<ImportanceVector> {
    if n_repeats == 0 {
        return Err(Error::Config("mda needs at least one repeat".into()));
    }
    let v = per_tree(forest, data, |s, t| {
        let oob = t.sample.oob();
        if oob.is_empty() {
            return Ok(None);
        }
        let base = tree_oob_loss(&t.tree, data, oob, None);
        let tree_rng = rng.split(s as u64);
        let scores = (0..data.p())
            .map(|k| {
                if !t.tree.uses_feature(k) {
                    return 0.0;
                }
                let feature_rng = tree_rng.split(k as u64);
                let total: f64 = (0..n_repeats)
                    .map(|r| {
                        let mut sources = oob.to_vec();
                        sources.shuffle(&mut feature_rng.split(r as u64));
                        tree_oob_loss(&t.tree, data, oob, Some((k, &sources)))
                    })
                    .sum();
                total / n_repeats as f64 - base
            })
            .collect();
        Ok(Some(scores))
    })?;
    let mut out = average(Method::Mda, forest, data.p(), v)?;
    out.metadata.mda_repeats = Some(n_repeats);
    out.metadata.mda_seed = Some(rng.seed());
    Ok(out)
}

/// Splits on each feature per tree.
pub fn split_count(forest: &Forest) -> Result<ImportanceVector> {
    let p = forest.fingerprint().p;
    let mut scores = vec![0.0; p];
    for t in forest.trees() {
        for (_, s) in t.tree.inner_nodes() {
            scores[s.feature] += 1.0;
        }
    }
    let k = forest.n_trees() as f64;
    scores.iter_mut().for_each(|s| *s /= k);
    Ok(ImportanceVector {
        method: Method::SplitCount,
        scores,
        metadata: meta(forest, 0),
    })
}

/// G0 of every tree from its classic MDI.
pub fn per_tree_g0(forest: &Forest, data: &Dataset, relevant: &[usize]) -> Result<Vec<f64>> {
    forest.check_dataset(data)?;
    forest
        .trees()
        .iter()
        .map(|t| super::noise_mass_g0(&mdi_classic(&t.tree, data, &t.sample)?, relevant))
        .collect()
}
