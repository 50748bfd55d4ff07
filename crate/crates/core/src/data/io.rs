//! CSV ingestion and the CSV + JSON sidecar dataset format.

use std::collections::HashMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Dataset, FeatureKind, Response, Task, TaskKind};
use crate::error::{Error, Result};

/// Which CSV columns play which role.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ColumnRoles {
    pub response: String,
    pub task: Option<TaskKind>,
    /// String-valued feature columns, integer-encoded by first appearance.
    pub categorical: Vec<String>,
    /// Class names in label order. Without it, classification labels must
    /// already be integers `0..D`.
    pub classes: Option<Vec<String>>,
    pub ignore: Vec<String>,
}

impl ColumnRoles {
    pub fn new(response: impl Into<String>, task: TaskKind) -> Self {
        ColumnRoles {
            response: response.into(),
            task: Some(task),
            ..Default::default()
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            row: 0,
            column: String::new(),
            message: format!("{other:?}"),
        },
    }
}

pub fn load_csv(path: impl AsRef<Path>, roles: &ColumnRoles) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();

    let response_col = header
        .iter()
        .position(|h| *h == roles.response)
        .ok_or_else(|| {
            Error::Config(format!(
                "response column '{}' not found in header",
                roles.response
            ))
        })?;
    for name in roles.categorical.iter().chain(&roles.ignore) {
        if !header.contains(name) {
            return Err(Error::Config(format!(
                "column '{name}' not found in header"
            )));
        }
    }
    let task = roles
        .task
        .ok_or_else(|| Error::Config("task (regression/classification) not declared".into()))?;

    let feature_cols: Vec<usize> = (0..header.len())
        .filter(|&c| c != response_col && !roles.ignore.contains(&header[c]))
        .collect();
    if feature_cols.is_empty() {
        return Err(Error::InvalidDataset("no feature columns".into()));
    }
    let is_cat: Vec<bool> = feature_cols
        .iter()
        .map(|&c| roles.categorical.contains(&header[c]))
        .collect();
    let mut codes: Vec<HashMap<String, usize>> = vec![HashMap::new(); feature_cols.len()];
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); feature_cols.len()];
    let mut labels: Vec<usize> = Vec::new();
    let mut values: Vec<f64> = Vec::new();

    for (r, record) in reader.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| csv_error(path, e))?;
        if record.len() != header.len() {
            return Err(Error::Parse {
                row,
                column: String::new(),
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        for (slot, &c) in feature_cols.iter().enumerate() {
            let cell = &record[c];
            let v = if is_cat[slot] {
                let next = codes[slot].len();
                *codes[slot].entry(cell.to_owned()).or_insert(next) as f64
            } else {
                parse_finite(cell).map_err(|message| Error::Parse {
                    row,
                    column: header[c].clone(),
                    message,
                })?
            };
            columns[slot].push(v);
        }
        let cell = &record[response_col];
        let bad = |message: String| Error::Parse {
            row,
            column: header[response_col].clone(),
            message,
        };
        match task {
            TaskKind::Regression => values.push(parse_finite(cell).map_err(bad)?),
            TaskKind::Classification => {
                let label = match &roles.classes {
                    Some(classes) => classes.iter().position(|c| c == cell),
                    None => cell.parse::<usize>().ok(),
                };
                labels.push(label.ok_or_else(|| bad(format!("unknown class label '{cell}'")))?);
            }
        }
    }

    let response = match task {
        TaskKind::Regression => Response::Numeric(values),
        TaskKind::Classification => {
            let n_classes = match &roles.classes {
                Some(c) => c.len(),
                None => labels.iter().max().map_or(0, |m| m + 1),
            };
            Response::Classes { labels, n_classes }
        }
    };
    if response.is_empty() {
        return Err(Error::InvalidDataset(format!(
            "{} contains no data rows",
            path.display()
        )));
    }
    let kinds = codes
        .iter()
        .zip(&is_cat)
        .map(|(c, &cat)| {
            if cat {
                FeatureKind::Categorical { levels: c.len() }
            } else {
                FeatureKind::Numeric
            }
        })
        .collect();
    let names = feature_cols.iter().map(|&c| header[c].clone()).collect();
    Dataset::with_names(columns, response, kinds, names, None)
}

fn parse_finite(cell: &str) -> std::result::Result<f64, String> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(format!("non-finite value '{v}'")),
        Err(_) => Err(format!("'{cell}' is not a number")),
    }
}

pub const DATASET_SCHEMA_VERSION: u32 = 1;

/// JSON document written next to a dataset CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSidecar {
    pub schema_version: u32,
    pub n: usize,
    pub p: usize,
    pub task: Task,
    pub response_column: String,
    pub feature_names: Vec<String>,
    pub feature_kinds: Vec<FeatureKind>,
    /// 0-based indices.
    #[serde(default)]
    pub relevant_set: Option<Vec<usize>>,
    /// The same set by feature name, for readers.
    #[serde(default)]
    pub relevant_names: Option<Vec<String>>,
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

const RESPONSE_COLUMN: &str = "y";

/// Write `d` as CSV (features then `y`) plus a `.json` sidecar carrying the
/// task, feature kinds and relevant set.
pub fn write_dataset(d: &Dataset, csv_path: impl AsRef<Path>) -> Result<()> {
    let csv_path = csv_path.as_ref();
    let file = File::create(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let wrap = |e: csv::Error| csv_error(csv_path, e);
    let mut header: Vec<&str> = d.feature_names().iter().map(String::as_str).collect();
    header.push(RESPONSE_COLUMN);
    w.write_record(&header).map_err(wrap)?;
    let mut record = Vec::with_capacity(d.p() + 1);
    for i in 0..d.n() {
        record.clear();
        record.extend((0..d.p()).map(|k| d.value(i, k).to_string()));
        record.push(match d.response() {
            Response::Numeric(v) => v[i].to_string(),
            Response::Classes { labels, .. } => labels[i].to_string(),
        });
        w.write_record(&record).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(csv_path, e))?;

    let sidecar = DatasetSidecar {
        schema_version: DATASET_SCHEMA_VERSION,
        n: d.n(),
        p: d.p(),
        task: d.task(),
        response_column: RESPONSE_COLUMN.into(),
        feature_names: d.feature_names().to_vec(),
        feature_kinds: d.feature_kinds().to_vec(),
        relevant_set: d.relevant_set().map(<[usize]>::to_vec),
        relevant_names: d
            .relevant_set()
            .map(|s| s.iter().map(|&k| d.feature_names()[k].clone()).collect()),
    };
    let side = sidecar_path(csv_path);
    let json = serde_json::to_string_pretty(&sidecar)?;
    std::fs::write(&side, json + "\n").map_err(|e| Error::io(&side, e))
}

/// Read a dataset written by [`write_dataset`]. Without a sidecar the CSV
/// is read as regression on a last column named `y`.
pub fn load_dataset(csv_path: impl AsRef<Path>) -> Result<Dataset> {
    let csv_path = csv_path.as_ref();
    let side = sidecar_path(csv_path);
    let sidecar: Option<DatasetSidecar> = if side.exists() {
        let text = std::fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
        Some(serde_json::from_str(&text)?)
    } else {
        None
    };
    let Some(sidecar) = sidecar else {
        return load_csv(
            csv_path,
            &ColumnRoles::new(RESPONSE_COLUMN, TaskKind::Regression),
        );
    };
    let mut roles = ColumnRoles::new(
        sidecar.response_column.clone(),
        if sidecar.task.is_classification() {
            TaskKind::Classification
        } else {
            TaskKind::Regression
        },
    );
    if let Task::Classification { n_classes } = sidecar.task {
        roles.classes = Some((0..n_classes).map(|c| c.to_string()).collect());
    }
    let d = load_csv(csv_path, &roles)?;
    if d.n() != sidecar.n || d.p() != sidecar.p || d.feature_names() != sidecar.feature_names {
        return Err(Error::InvalidDataset(format!(
            "{} does not match its sidecar {}",
            csv_path.display(),
            side.display()
        )));
    }
    d.with_feature_kinds(sidecar.feature_kinds)
        .with_relevant_set(sidecar.relevant_set)
}
