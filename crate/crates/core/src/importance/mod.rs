//! Feature-importance estimators, the noise mass G0 and the bias sweeps.

mod estimators;
mod sweep;
pub(crate) use sweep::mean_stderr;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{validate_index_set, Dataset};
use crate::error::{Error, Result};
use crate::forest::{Forest, ForestParams};

pub use estimators::{
    mda, mdi, mdi_classic, mdi_covariance, mdi_covariance_inbag, mdi_oob, naive_oob,
    naive_oob_tree, per_tree_g0, split_count,
};
pub use sweep::{
    inverse_leaf_fit, inverse_leaf_probe, pearson, sweep, sweep_depth, sweep_leaf_size,
    ProbeResult, SweepAxis, SweepConfig, SweepRow, SweepTable, SWEEP_SCHEMA_VERSION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "mdi")]
    Mdi,
    /// The covariance form evaluated on the in-bag rows; equal to MDI.
    #[serde(rename = "mdi-covariance-inbag")]
    MdiCovarianceInbag,
    #[serde(rename = "mdi-oob")]
    MdiOob,
    #[serde(rename = "naive-oob")]
    NaiveOob,
    #[serde(rename = "mda")]
    Mda,
    #[serde(rename = "split-count")]
    SplitCount,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Mdi,
        Method::MdiCovarianceInbag,
        Method::MdiOob,
        Method::NaiveOob,
        Method::Mda,
        Method::SplitCount,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Mdi => "mdi",
            Method::MdiCovarianceInbag => "mdi-covariance-inbag",
            Method::MdiOob => "mdi-oob",
            Method::NaiveOob => "naive-oob",
            Method::Mda => "mda",
            Method::SplitCount => "split-count",
        }
    }

    pub fn needs_oob(&self) -> bool {
        matches!(self, Method::MdiOob | Method::NaiveOob | Method::Mda)
    }

    /// Parse a comma-separated list such as `mdi,mdi-oob`.
    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        let methods = s
            .split(',')
            .map(str::trim)
            .filter(|m| !m.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Method>>>()?;
        if methods.is_empty() {
            return Err(Error::Config("method list is empty".into()));
        }
        Ok(methods)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Method::ALL.iter().map(Method::name).collect();
                Error::Config(format!(
                    "unknown method '{s}' (known: {})",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceMeta {
    pub forest: ForestParams,
    pub n_trees: usize,
    /// Trees left out because they had no out-of-bag rows.
    pub skipped_trees: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mda_repeats: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mda_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceVector {
    pub method: Method,
    pub scores: Vec<f64>,
    pub metadata: ImportanceMeta,
}

impl ImportanceVector {
    /// Feature indices ordered by decreasing score (stable on ties).
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]));
        idx
    }
}

/// Knobs for the estimators that need more than the forest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOptions {
    pub mda_repeats: usize,
    pub mda_seed: u64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions {
            mda_repeats: 1,
            mda_seed: 0,
        }
    }
}

pub fn compute(
    method: Method,
    forest: &Forest,
    data: &Dataset,
    options: &EstimatorOptions,
) -> Result<ImportanceVector> {
    match method {
        Method::Mdi => mdi(forest, data),
        Method::MdiCovarianceInbag => mdi_covariance_inbag(forest, data),
        Method::MdiOob => mdi_oob(forest, data),
        Method::NaiveOob => naive_oob(forest, data),
        Method::Mda => mda(
            forest,
            data,
            options.mda_repeats,
            &crate::rng::Rng::new(options.mda_seed),
        ),
        Method::SplitCount => split_count(forest),
    }
}

/// Total score of the features outside `relevant`.
pub fn noise_mass_g0(scores: &[f64], relevant: &[usize]) -> Result<f64> {
    validate_index_set(relevant, scores.len())?;
    let mut is_relevant = vec![false; scores.len()];
    for &k in relevant {
        is_relevant[k] = true;
    }
    Ok(scores
        .iter()
        .zip(&is_relevant)
        .filter(|(_, &r)| !r)
        .map(|(s, _)| s)
        .sum())
}
