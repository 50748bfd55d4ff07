//! Scoring importance vectors against known relevant sets, replicated
//! experiments, and report output.

mod experiment;
mod report;
mod svg;

pub use experiment::{
    run_experiment, ExperimentConfig, MethodRun, MethodSummary, Replicate, ReplicateResults,
    RESULTS_SCHEMA_VERSION,
};
pub use report::{
    read_importance_csv, read_importance_json, read_report_csv, read_report_json, read_sweep_json,
    write_importance_csv, write_importance_json, write_report, write_sweep_csv, write_sweep_json,
    CsvRecord, CsvReport, Format, ImportanceDocument, IMPORTANCE_SCHEMA_VERSION,
};
pub use svg::{render_sweep_svg, sweep_svg};

use crate::error::{Error, Result};

/// Area under the ROC curve of `scores` against binary `labels`, in its
/// Mann-Whitney form: the probability that a random positive outscores a
/// random negative, ties counted as one half.
///
/// Sorting groups tied scores, so this runs in O(p log p) while counting
/// exactly the same pairs as the all-pairs definition.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Contract(format!(
            "auc: {} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Contract("auc: NaN score".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l).count() as u64;
    let n_neg = labels.len() as u64 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Contract(
            "auc needs at least one relevant and one noisy feature".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // twice the Mann-Whitney U, kept integral
    let mut twice_u: u64 = 0;
    let mut neg_below: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0u64, 0u64);
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if labels[order[j]] {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        twice_u += pos * (2 * neg_below + neg);
        neg_below += neg;
        i = j;
    }
    Ok(twice_u as f64 / (2 * n_pos * n_neg) as f64)
}

/// AUC of `scores` with the features in `relevant` as positives.
pub fn auc_relevant(scores: &[f64], relevant: &[usize]) -> Result<f64> {
    crate::data::validate_index_set(relevant, scores.len())?;
    let mut labels = vec![false; scores.len()];
    for &k in relevant {
        labels[k] = true;
    }
    auc(scores, &labels)
}
