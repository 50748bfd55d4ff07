use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::experiment::{MethodSummary, ReplicateResults};
use crate::error::{Error, Result};
use crate::importance::{ImportanceVector, Method, SweepTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!(
                "unknown format {s:?} (expected csv or json)"
            ))),
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::InvalidDataset(format!("{}: {other:?}", path.display())),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Write experiment results. CSV has one `replicate` row per (method,
/// replicate) carrying the AUC and per-feature scores, followed by one
/// `summary` row per method with the mean AUC, its standard error and the
/// per-feature mean scores.
pub fn write_report(results: &ReplicateResults, path: &Path, format: Format) -> Result<()> {
    match format {
        Format::Json => write_text(path, &serde_json::to_string_pretty(results)?),
        Format::Csv => {
            let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
            let mut header: Vec<String> = [
                "schema_version",
                "kind",
                "method",
                "replicate",
                "auc",
                "stderr",
                "single_replicate",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            header.extend(results.feature_names.iter().cloned());
            w.write_record(&header).map_err(|e| csv_error(path, e))?;
            let version = results.schema_version.to_string();
            for (m, method) in results.config.methods.iter().enumerate() {
                for rep in &results.replicates {
                    let run = &rep.runs[m];
                    let mut rec = vec![
                        version.clone(),
                        "replicate".into(),
                        method.name().into(),
                        rep.index.to_string(),
                        run.auc.to_string(),
                        String::new(),
                        String::new(),
                    ];
                    rec.extend(run.importance.scores.iter().map(f64::to_string));
                    w.write_record(&rec).map_err(|e| csv_error(path, e))?;
                }
            }
            let p = results.feature_names.len();
            let n_rep = results.replicates.len() as f64;
            for (m, s) in results.summary.iter().enumerate() {
                let mut rec = vec![
                    version.clone(),
                    "summary".into(),
                    s.method.name().into(),
                    String::new(),
                    s.mean_auc.to_string(),
                    s.stderr.to_string(),
                    s.single_replicate.to_string(),
                ];
                rec.extend((0..p).map(|k| {
                    let total: f64 = results
                        .replicates
                        .iter()
                        .map(|r| r.runs[m].importance.scores[k])
                        .sum();
                    (total / n_rep).to_string()
                }));
                w.write_record(&rec).map_err(|e| csv_error(path, e))?;
            }
            w.flush().map_err(|e| Error::io(path, e))
        }
    }
}

pub fn read_report_json(path: &Path) -> Result<ReplicateResults> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub method: Method,
    pub replicate: usize,
    pub auc: f64,
    pub scores: Vec<f64>,
}

/// The flat view of a results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvReport {
    pub schema_version: u32,
    pub feature_names: Vec<String>,
    pub records: Vec<CsvRecord>,
    pub summary: Vec<MethodSummary>,
    pub mean_scores: Vec<Vec<f64>>,
}

impl CsvReport {
    /// The CSV view of in-memory results, for comparison with a parsed file.
    pub fn from_results(results: &ReplicateResults) -> CsvReport {
        let mut records = Vec::new();
        for (m, &method) in results.config.methods.iter().enumerate() {
            for rep in &results.replicates {
                records.push(CsvRecord {
                    method,
                    replicate: rep.index,
                    auc: rep.runs[m].auc,
                    scores: rep.runs[m].importance.scores.clone(),
                });
            }
        }
        let n_rep = results.replicates.len() as f64;
        let mean_scores = (0..results.config.methods.len())
            .map(|m| {
                (0..results.feature_names.len())
                    .map(|k| {
                        let t: f64 = results
                            .replicates
                            .iter()
                            .map(|r| r.runs[m].importance.scores[k])
                            .sum();
                        t / n_rep
                    })
                    .collect()
            })
            .collect();
        CsvReport {
            schema_version: results.schema_version,
            feature_names: results.feature_names.clone(),
            records,
            summary: results.summary.clone(),
            mean_scores,
        }
    }
}

pub fn read_report_csv(path: &Path) -> Result<CsvReport> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() < 8 || &header[0] != "schema_version" || &header[1] != "kind" {
        return Err(Error::InvalidDataset(format!(
            "{}: not a results CSV",
            path.display()
        )));
    }
    let feature_names: Vec<String> = header.iter().skip(7).map(str::to_owned).collect();
    let mut out = CsvReport {
        schema_version: 0,
        feature_names,
        records: Vec::new(),
        summary: Vec::new(),
        mean_scores: Vec::new(),
    };
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let row = i + 1;
        let bad = |column: &str, message: String| Error::Parse {
            row,
            column: column.to_owned(),
            message,
        };
        let num = |idx: usize| -> Result<f64> {
            rec[idx]
                .parse::<f64>()
                .map_err(|e| bad(&header[idx], e.to_string()))
        };
        out.schema_version = rec[0]
            .parse()
            .map_err(|e: std::num::ParseIntError| bad("schema_version", e.to_string()))?;
        let method: Method = rec[2]
            .parse()
            .map_err(|e: Error| bad("method", e.to_string()))?;
        let scores = (7..rec.len()).map(num).collect::<Result<Vec<_>>>()?;
        match &rec[1] {
            "replicate" => out.records.push(CsvRecord {
                method,
                replicate: rec[3]
                    .parse()
                    .map_err(|e: std::num::ParseIntError| bad("replicate", e.to_string()))?,
                auc: num(4)?,
                scores,
            }),
            "summary" => {
                out.summary.push(MethodSummary {
                    method,
                    mean_auc: num(4)?,
                    stderr: num(5)?,
                    single_replicate: rec[6].parse().map_err(|e: std::str::ParseBoolError| {
                        bad("single_replicate", e.to_string())
                    })?,
                });
                out.mean_scores.push(scores);
            }
            other => return Err(bad("kind", format!("unknown row kind {other:?}"))),
        }
    }
    Ok(out)
}

pub fn write_sweep_json(table: &SweepTable, path: &Path) -> Result<()> {
    write_text(path, &serde_json::to_string_pretty(table)?)
}

pub fn read_sweep_json(path: &Path) -> Result<SweepTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// One row per grid value: mean score and standard error per feature, then
/// the G0 mean and standard error.
pub fn write_sweep_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let axis = match table.axis {
        crate::importance::SweepAxis::MinLeaf => "min_leaf",
        crate::importance::SweepAxis::MaxDepth => "max_depth",
    };
    let mut header = vec![
        "schema_version".to_owned(),
        "method".to_owned(),
        axis.to_owned(),
    ];
    header.extend(table.feature_names.iter().cloned());
    header.extend(table.feature_names.iter().map(|f| format!("{f}_stderr")));
    header.push("g0".into());
    header.push("g0_stderr".into());
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    for row in &table.rows {
        let mut rec = vec![
            table.schema_version.to_string(),
            table.method.name().to_owned(),
            row.value.to_string(),
        ];
        rec.extend(row.mean.iter().map(f64::to_string));
        rec.extend(row.stderr.iter().map(f64::to_string));
        rec.push(row.g0_mean.to_string());
        rec.push(row.g0_stderr.to_string());
        w.write_record(&rec).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per feature, one column per importance vector.
pub fn write_importance_csv(
    vectors: &[ImportanceVector],
    feature_names: &[String],
    path: &Path,
) -> Result<()> {
    if let Some(v) = vectors
        .iter()
        .find(|v| v.scores.len() != feature_names.len())
    {
        return Err(Error::Contract(format!(
            "{} has {} scores for {} features",
            v.method,
            v.scores.len(),
            feature_names.len()
        )));
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header = vec!["feature".to_owned()];
    header.extend(vectors.iter().map(|v| v.method.name().to_owned()));
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    for (k, name) in feature_names.iter().enumerate() {
        let mut rec = vec![name.clone()];
        rec.extend(vectors.iter().map(|v| v.scores[k].to_string()));
        w.write_record(&rec).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Methods, feature names and a feature-major score table.
pub type ImportanceTable = (Vec<Method>, Vec<String>, Vec<Vec<f64>>);

/// Inverse of [`write_importance_csv`].
pub fn read_importance_csv(path: &Path) -> Result<ImportanceTable> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    let methods = header
        .iter()
        .skip(1)
        .map(str::parse)
        .collect::<Result<Vec<Method>>>()?;
    let mut names = Vec::new();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        names.push(rec[0].to_owned());
        rows.push(
            (1..rec.len())
                .map(|c| {
                    rec[c].parse::<f64>().map_err(|e| Error::Parse {
                        row: i + 1,
                        column: header[c].to_owned(),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok((methods, names, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceDocument {
    pub schema_version: u32,
    pub feature_names: Vec<String>,
    pub importances: Vec<ImportanceVector>,
}

pub const IMPORTANCE_SCHEMA_VERSION: u32 = 1;

pub fn write_importance_json(
    vectors: &[ImportanceVector],
    feature_names: &[String],
    path: &Path,
) -> Result<()> {
    let doc = ImportanceDocument {
        schema_version: IMPORTANCE_SCHEMA_VERSION,
        feature_names: feature_names.to_vec(),
        importances: vectors.to_vec(),
    };
    write_text(path, &serde_json::to_string_pretty(&doc)?)
}

pub fn read_importance_json(path: &Path) -> Result<ImportanceDocument> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
