use rand::seq::SliceRandom;

use super::{validate_index_set, Dataset, FeatureKind};
use crate::error::Result;
use crate::rng::Rng;

/// A feature that could not be rescaled because it is constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleWarning {
    pub feature: usize,
    pub value: f64,
}

/// Affinely map each feature onto [0, 1] (min -> 0, max -> 1).
///
/// Constant features become all zeros and are reported as warnings.
/// Rescaled features are numeric afterwards.
pub fn scale_unit_interval(d: Dataset) -> (Dataset, Vec<ScaleWarning>) {
    let mut warnings = Vec::new();
    let columns = d
        .columns()
        .iter()
        .enumerate()
        .map(|(k, col)| {
            let (lo, hi) = col
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            if hi == lo {
                warnings.push(ScaleWarning {
                    feature: k,
                    value: lo,
                });
                return vec![0.0; col.len()];
            }
            let span = hi - lo;
            col.iter()
                .map(|&v| ((v - lo) / span).clamp(0.0, 1.0))
                .collect()
        })
        .collect();
    let kinds = vec![FeatureKind::Numeric; d.p()];
    (d.with_columns(columns).with_feature_kinds(kinds), warnings)
}

/// Independently row-permute every column outside `relevant`.
///
/// Columns are visited in index order and each draws from its own child
/// stream, so the result depends only on the seed and the relevant set.
pub fn permute_noisy_features(d: Dataset, relevant: &[usize], rng: &Rng) -> Result<Dataset> {
    validate_index_set(relevant, d.p())?;
    let mut keep = vec![false; d.p()];
    for &k in relevant {
        keep[k] = true;
    }
    let columns = d
        .columns()
        .iter()
        .enumerate()
        .map(|(k, col)| {
            let mut col = col.clone();
            if !keep[k] {
                col.shuffle(&mut rng.split(k as u64));
            }
            col
        })
        .collect();
    Ok(d.with_columns(columns))
}
