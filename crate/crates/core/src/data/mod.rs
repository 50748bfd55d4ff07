//! Datasets, ingestion, preprocessing, synthetic generators and
//! bootstrap/subsample drawing.

mod generate;
mod io;
mod sample;
mod transform;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{
    attach_sparse_response, discrete_grid_signal_variance, gen_correlated_surrogate,
    gen_discrete_grid, gen_pure_noise, gen_strobl, latent_equicorrelated, GeneratorSpec,
    SurrogateParams, TaskKind,
};
pub use io::{load_csv, load_dataset, write_dataset, ColumnRoles, DatasetSidecar};
pub use sample::{draw_sample, SampleSplit, Sampling};
pub use transform::{permute_noisy_features, scale_unit_interval, ScaleWarning};

pub use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Task {
    Regression,
    Classification { n_classes: usize },
}

impl Task {
    /// Width of the response vector a tree node carries.
    pub fn output_dim(&self) -> usize {
        match self {
            Task::Regression => 1,
            Task::Classification { n_classes } => *n_classes,
        }
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, Task::Classification { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    Numeric,
    /// Stored as ordered integer codes `0..levels`.
    Categorical {
        levels: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Response {
    Numeric(Vec<f64>),
    Classes {
        labels: Vec<usize>,
        n_classes: usize,
    },
}

impl Response {
    pub fn len(&self) -> usize {
        match self {
            Response::Numeric(v) => v.len(),
            Response::Classes { labels, .. } => labels.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn task(&self) -> Task {
        match self {
            Response::Numeric(_) => Task::Regression,
            Response::Classes { n_classes, .. } => Task::Classification {
                n_classes: *n_classes,
            },
        }
    }

    /// Scalar view of row `i` (the class index for classification).
    pub fn value(&self, i: usize) -> f64 {
        match self {
            Response::Numeric(v) => v[i],
            Response::Classes { labels, .. } => labels[i] as f64,
        }
    }
}

/// Immutable n x p feature matrix plus response.
///
/// Features are stored column-major since split search scans one feature at
/// a time.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Vec<f64>>,
    response: Response,
    feature_kinds: Vec<FeatureKind>,
    feature_names: Vec<String>,
    relevant_set: Option<Vec<usize>>,
}

impl Dataset {
    pub fn new(
        columns: Vec<Vec<f64>>,
        response: Response,
        feature_kinds: Vec<FeatureKind>,
        relevant_set: Option<Vec<usize>>,
    ) -> Result<Self> {
        let names = (1..=columns.len()).map(|j| format!("X{j}")).collect();
        Self::with_names(columns, response, feature_kinds, names, relevant_set)
    }

    pub fn with_names(
        columns: Vec<Vec<f64>>,
        response: Response,
        feature_kinds: Vec<FeatureKind>,
        feature_names: Vec<String>,
        relevant_set: Option<Vec<usize>>,
    ) -> Result<Self> {
        let p = columns.len();
        if p == 0 {
            return Err(Error::InvalidDataset("no feature columns".into()));
        }
        let n = response.len();
        if n == 0 {
            return Err(Error::InvalidDataset("no rows".into()));
        }
        if feature_kinds.len() != p || feature_names.len() != p {
            return Err(Error::InvalidDataset(format!(
                "{p} columns but {} kinds and {} names",
                feature_kinds.len(),
                feature_names.len()
            )));
        }
        for (k, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::InvalidDataset(format!(
                    "column {} has {} rows, response has {n}",
                    feature_names[k],
                    col.len()
                )));
            }
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "non-finite value in column {} at row {}",
                    feature_names[k],
                    i + 1
                )));
            }
        }
        match &response {
            Response::Numeric(v) => {
                if let Some(i) = v.iter().position(|y| !y.is_finite()) {
                    return Err(Error::InvalidDataset(format!(
                        "non-finite response at row {}",
                        i + 1
                    )));
                }
            }
            Response::Classes { labels, n_classes } => {
                if *n_classes < 2 {
                    return Err(Error::InvalidDataset(format!(
                        "classification needs at least 2 classes, got {n_classes}"
                    )));
                }
                if let Some(i) = labels.iter().position(|&l| l >= *n_classes) {
                    return Err(Error::LabelOutOfRange {
                        row: i + 1,
                        label: labels[i],
                        n_classes: *n_classes,
                    });
                }
            }
        }
        if let Some(rel) = &relevant_set {
            validate_index_set(rel, p)?;
        }
        Ok(Dataset {
            columns,
            response,
            feature_kinds,
            feature_names,
            relevant_set,
        })
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn task(&self) -> Task {
        self.response.task()
    }

    #[inline]
    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.columns[feature][row]
    }

    pub fn column(&self, feature: usize) -> &[f64] {
        &self.columns[feature]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn response(&self) -> &Response {
        &self.response
    }

    pub fn feature_kinds(&self) -> &[FeatureKind] {
        &self.feature_kinds
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn relevant_set(&self) -> Option<&[usize]> {
        self.relevant_set.as_deref()
    }

    /// Relevance indicator per feature; `None` when no relevant set is known.
    pub fn relevance_labels(&self) -> Option<Vec<bool>> {
        let rel = self.relevant_set.as_ref()?;
        let mut labels = vec![false; self.p()];
        for &k in rel {
            labels[k] = true;
        }
        Some(labels)
    }

    pub fn with_relevant_set(mut self, relevant: Option<Vec<usize>>) -> Result<Self> {
        if let Some(rel) = &relevant {
            validate_index_set(rel, self.p())?;
        }
        self.relevant_set = relevant;
        Ok(self)
    }

    pub(crate) fn with_columns(mut self, columns: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(columns.len(), self.columns.len());
        self.columns = columns;
        self
    }

    pub(crate) fn with_response(mut self, response: Response) -> Self {
        debug_assert_eq!(response.len(), self.n());
        self.response = response;
        self
    }

    pub(crate) fn with_feature_kinds(mut self, kinds: Vec<FeatureKind>) -> Self {
        self.feature_kinds = kinds;
        self
    }

    /// Response as an n x dim matrix: the raw value for regression, the
    /// one-hot row for classification.
    pub fn targets(&self) -> Targets {
        match &self.response {
            Response::Numeric(v) => Targets::from_values(v.clone()),
            Response::Classes { labels, n_classes } => {
                let mut data = vec![0.0; labels.len() * n_classes];
                for (i, &l) in labels.iter().enumerate() {
                    data[i * n_classes + l] = 1.0;
                }
                Targets {
                    dim: *n_classes,
                    data,
                }
            }
        }
    }

    /// Stable 64-bit digest of task, shape and contents (FNV-1a).
    pub fn content_hash(&self) -> u64 {
        let mut h = Fnv::default();
        h.write_u64(self.n() as u64);
        h.write_u64(self.p() as u64);
        h.write_u64(self.task().output_dim() as u64);
        h.write_u64(self.task().is_classification() as u64);
        for col in &self.columns {
            for v in col {
                h.write_u64(v.to_bits());
            }
        }
        for i in 0..self.n() {
            h.write_u64(self.response.value(i).to_bits());
        }
        h.0
    }
}

struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

pub(crate) fn validate_index_set(set: &[usize], p: usize) -> Result<()> {
    let mut seen = vec![false; p];
    for &k in set {
        if k >= p {
            return Err(Error::Config(format!(
                "feature index {k} out of range for p = {p}"
            )));
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::Config(format!("duplicate feature index {k}")));
        }
    }
    Ok(())
}

/// Row-major n x dim response matrix used by the tree code.
#[derive(Debug, Clone, PartialEq)]
pub struct Targets {
    dim: usize,
    data: Vec<f64>,
}

impl Targets {
    pub fn from_values(values: Vec<f64>) -> Self {
        Targets {
            dim: 1,
            data: values,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.first().map_or(1, Vec::len);
        Targets {
            dim,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// One-hot encoding of class labels: row `i` has a 1 in column `labels[i]`.
pub fn one_hot(labels: &[usize], n_classes: usize) -> Result<Vec<Vec<f64>>> {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            if l >= n_classes {
                return Err(Error::LabelOutOfRange {
                    row: i + 1,
                    label: l,
                    n_classes,
                });
            }
            let mut row = vec![0.0; n_classes];
            row[l] = 1.0;
            Ok(row)
        })
        .collect()
}
