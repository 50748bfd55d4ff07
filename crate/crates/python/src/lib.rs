//! Python bindings: datasets, forests, importance estimators, AUC, sweeps
//! and the replicated experiment runner.
//!
//! Structured configs and results cross the boundary as plain dicts, using
//! the same JSON shapes the Rust types serialize to.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use rfimp::data::{self, GeneratorSpec, TaskKind};
use rfimp::eval::{self, ExperimentConfig};
use rfimp::importance::{self, EstimatorOptions, SweepConfig};
use rfimp::{Error, Method, Response, Rng, Sampling, TieBreak, TreeParams};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::Config(_) | Error::Parse { .. } | Error::InvalidDataset(_) | Error::Json(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

fn from_dict<T: serde::de::DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let json = obj.py().import("json")?;
    let text: String = json.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_dict<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(module = "pyrfimp", frozen)]
pub struct Dataset {
    inner: rfimp::Dataset,
}

fn generate(py: Python<'_>, spec: GeneratorSpec, seed: u64) -> PyResult<Dataset> {
    let inner = py
        .detach(|| spec.generate(&mut Rng::new(seed)))
        .map_err(to_py)?;
    Ok(Dataset { inner })
}

#[pymethods]
impl Dataset {
    /// Numeric features as a list of rows. Classification labels must be
    /// integer codes below `n_classes`.
    #[new]
    #[pyo3(signature = (x, y, n_classes=None, feature_names=None, relevant_set=None))]
    fn new(
        x: Vec<Vec<f64>>,
        y: Vec<f64>,
        n_classes: Option<usize>,
        feature_names: Option<Vec<String>>,
        relevant_set: Option<Vec<usize>>,
    ) -> PyResult<Self> {
        let p = x.first().map_or(0, Vec::len);
        if let Some(i) = x.iter().position(|r| r.len() != p) {
            return Err(PyValueError::new_err(format!(
                "row {i} has {} values, expected {p}",
                x[i].len()
            )));
        }
        let columns: Vec<Vec<f64>> = (0..p).map(|j| x.iter().map(|r| r[j]).collect()).collect();
        let response = match n_classes {
            None => Response::Numeric(y),
            Some(n_classes) => {
                let labels = y
                    .iter()
                    .map(|&v| {
                        if v >= 0.0 && v.fract() == 0.0 {
                            Ok(v as usize)
                        } else {
                            Err(PyValueError::new_err(format!(
                                "class label {v} is not a non-negative integer"
                            )))
                        }
                    })
                    .collect::<PyResult<Vec<_>>>()?;
                Response::Classes { labels, n_classes }
            }
        };
        let kinds = vec![rfimp::FeatureKind::Numeric; p];
        let inner = match feature_names {
            Some(names) => {
                rfimp::Dataset::with_names(columns, response, kinds, names, relevant_set)
            }
            None => rfimp::Dataset::new(columns, response, kinds, relevant_set),
        }
        .map_err(to_py)?;
        Ok(Dataset { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (n=200, seed=0))]
    fn strobl(py: Python<'_>, n: usize, seed: u64) -> PyResult<Self> {
        generate(py, GeneratorSpec::Strobl { n }, seed)
    }

    #[staticmethod]
    #[pyo3(signature = (n=1000, p=50, n_relevant=5, task="classification", noise_mult=1.0, seed=0))]
    fn discrete_grid(
        py: Python<'_>,
        n: usize,
        p: usize,
        n_relevant: usize,
        task: &str,
        noise_mult: f64,
        seed: u64,
    ) -> PyResult<Self> {
        let task: TaskKind = parse(task)?;
        let spec = GeneratorSpec::DiscreteGrid {
            n,
            p,
            n_relevant,
            task,
            noise_mult,
            fixed_relevant: None,
        };
        generate(py, spec, seed)
    }

    #[staticmethod]
    #[pyo3(signature = (n=2000, p=20, seed=0))]
    fn pure_noise(py: Python<'_>, n: usize, p: usize, seed: u64) -> PyResult<Self> {
        generate(py, GeneratorSpec::PureNoise { n, p }, seed)
    }

    /// Build from a generator spec dict such as `{"generator": "strobl", "n": 200}`.
    #[staticmethod]
    #[pyo3(signature = (spec, seed=0))]
    fn generate(py: Python<'_>, spec: &Bound<'_, PyAny>, seed: u64) -> PyResult<Self> {
        generate(py, from_dict(spec)?, seed)
    }

    /// Load a CSV written by `save` (or the CLI), using its JSON sidecar.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Dataset {
            inner: data::load_dataset(path).map_err(to_py)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (path, response, task, categorical=Vec::new()))]
    fn load_csv(
        path: PathBuf,
        response: &str,
        task: &str,
        categorical: Vec<String>,
    ) -> PyResult<Self> {
        let mut roles = data::ColumnRoles::new(response, parse(task)?);
        roles.categorical = categorical;
        Ok(Dataset {
            inner: data::load_csv(path, &roles).map_err(to_py)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        data::write_dataset(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    #[getter]
    fn is_classification(&self) -> bool {
        self.inner.task().is_classification()
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.feature_names().to_vec()
    }

    #[getter]
    fn relevant_set(&self) -> Option<Vec<usize>> {
        self.inner.relevant_set().map(<[usize]>::to_vec)
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.inner.n()).map(|i| self.inner.row(i)).collect()
    }

    fn y(&self) -> Vec<f64> {
        let r = self.inner.response();
        (0..r.len()).map(|i| r.value(i)).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(n={}, p={}, task={:?})",
            self.inner.n(),
            self.inner.p(),
            self.inner.task()
        )
    }
}

#[pyclass(module = "pyrfimp", frozen)]
pub struct Forest {
    inner: rfimp::Forest,
}

#[pymethods]
impl Forest {
    /// `mtry` defaults to floor(sqrt(p)); `sampling` is `bootstrap` or
    /// `subsample:<fraction>`.
    #[new]
    #[pyo3(signature = (
        data, n_trees=100, min_leaf=1, max_depth=None, mtry=None, sampling="bootstrap",
        seed=0, tie_break="draw-order", allow_zero_gain_splits=false
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        py: Python<'_>,
        data: &Dataset,
        n_trees: usize,
        min_leaf: usize,
        max_depth: Option<usize>,
        mtry: Option<usize>,
        sampling: &str,
        seed: u64,
        tie_break: &str,
        allow_zero_gain_splits: bool,
    ) -> PyResult<Self> {
        let p = data.inner.p();
        let params = rfimp::ForestParams {
            n_trees,
            tree: TreeParams {
                min_leaf,
                max_depth,
                mtry: mtry.unwrap_or_else(|| ((p as f64).sqrt() as usize).max(1)),
                allow_zero_gain_splits,
                tie_break: parse::<TieBreak>(tie_break)?,
            },
            sampling: parse::<Sampling>(sampling)?,
            seed,
        };
        let inner = py
            .detach(|| rfimp::forest::train_forest(&data.inner, &params))
            .map_err(to_py)?;
        Ok(Forest { inner })
    }

    #[getter]
    fn n_trees(&self) -> usize {
        self.inner.n_trees()
    }

    #[getter]
    fn params<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, self.inner.params())
    }

    /// Mean tree prediction: one value for regression, class
    /// probabilities for classification.
    fn predict(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        let p = self.inner.fingerprint().p;
        if x.len() != p {
            return Err(PyValueError::new_err(format!(
                "expected {p} features, got {}",
                x.len()
            )));
        }
        Ok(self.inner.predict(&x))
    }

    /// Scores of one estimator: mdi, mdi-covariance-inbag, mdi-oob,
    /// naive-oob, mda or split-count. `data` must be the training data.
    #[pyo3(signature = (data, method="mdi-oob", mda_repeats=1, mda_seed=0))]
    fn importance(
        &self,
        py: Python<'_>,
        data: &Dataset,
        method: &str,
        mda_repeats: usize,
        mda_seed: u64,
    ) -> PyResult<Vec<f64>> {
        let method: Method = parse(method)?;
        let options = EstimatorOptions {
            mda_repeats,
            mda_seed,
        };
        py.detach(|| importance::compute(method, &self.inner, &data.inner, &options))
            .map(|v| v.scores)
            .map_err(to_py)
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Forest {
            inner: rfimp::Forest::from_json(text).map_err(to_py)?,
        })
    }

    fn __repr__(&self) -> String {
        let fp = self.inner.fingerprint();
        format!(
            "Forest(n_trees={}, n={}, p={})",
            self.inner.n_trees(),
            fp.n,
            fp.p
        )
    }
}

/// AUC of `scores` for separating the True labels from the False ones.
#[pyfunction]
fn auc(scores: Vec<f64>, labels: Vec<bool>) -> PyResult<f64> {
    eval::auc(&scores, &labels).map_err(to_py)
}

/// AUC with the positive class given as 0-based feature indices.
#[pyfunction]
fn auc_relevant(scores: Vec<f64>, relevant: Vec<usize>) -> PyResult<f64> {
    eval::auc_relevant(&scores, &relevant).map_err(to_py)
}

/// Summed score over the features outside `relevant`.
#[pyfunction]
fn noise_mass(scores: Vec<f64>, relevant: Vec<usize>) -> PyResult<f64> {
    importance::noise_mass_g0(&scores, &relevant).map_err(to_py)
}

#[pyfunction]
fn methods() -> Vec<&'static str> {
    Method::ALL.iter().map(Method::name).collect()
}

/// Run a leaf-size or depth sweep described by a config dict and return the
/// result table as a dict.
#[pyfunction]
fn sweep<'py>(py: Python<'py>, config: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let config: SweepConfig = from_dict(config)?;
    let table = py.detach(|| importance::sweep(&config)).map_err(to_py)?;
    to_dict(py, &table)
}

/// Fit of G0 against 1 / min_leaf for a leaf-size sweep table:
/// returns `(slope, intercept, pearson_r)`.
#[pyfunction]
fn inverse_leaf_fit(table: &Bound<'_, PyAny>) -> PyResult<(f64, f64, f64)> {
    importance::inverse_leaf_fit(&from_dict(table)?).map_err(to_py)
}

/// Replicated AUC experiment; returns per-replicate scores and summaries.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let config: ExperimentConfig = from_dict(config)?;
    let results = py.detach(|| eval::run_experiment(&config)).map_err(to_py)?;
    to_dict(py, &results)
}

#[pymodule]
pub fn pyrfimp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<Forest>()?;
    m.add_function(wrap_pyfunction!(auc, m)?)?;
    m.add_function(wrap_pyfunction!(auc_relevant, m)?)?;
    m.add_function(wrap_pyfunction!(noise_mass, m)?)?;
    m.add_function(wrap_pyfunction!(methods, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_leaf_fit, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
