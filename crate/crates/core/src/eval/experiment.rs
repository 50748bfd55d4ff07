use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::auc_relevant;
use crate::data::GeneratorSpec;
use crate::error::{Error, Result};
use crate::forest::{train_forest, ForestParams};
use crate::importance::{compute, EstimatorOptions, ImportanceVector, Method};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    /// `forest.seed` is ignored; every replicate derives its own.
    pub forest: ForestParams,
    pub methods: Vec<Method>,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default = "one")]
    pub mda_repeats: usize,
    /// Draw the relevant set once (from replicate 0) and reuse it in every
    /// replicate instead of redrawing it.
    #[serde(default)]
    pub fixed_relevant_set: bool,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Error::Config("methods contain duplicates".into()));
        }
        if self.mda_repeats == 0 {
            return Err(Error::Config("mda_repeats must be at least 1".into()));
        }
        if self.fixed_relevant_set
            && matches!(self.generator, GeneratorSpec::CorrelatedSurrogate(_))
        {
            return Err(Error::Config(
                "fixed relevant set is not supported for the correlated-surrogate generator".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRun {
    pub importance: ImportanceVector,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replicate {
    pub index: usize,
    pub relevant_set: Vec<usize>,
    /// One entry per configured method, in configuration order.
    pub runs: Vec<MethodRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub mean_auc: f64,
    /// Sample standard deviation over replicates divided by sqrt(replicates).
    pub stderr: f64,
    pub single_replicate: bool,
}

pub const RESULTS_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResults {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub feature_names: Vec<String>,
    pub replicates: Vec<Replicate>,
    pub summary: Vec<MethodSummary>,
}

impl ReplicateResults {
    pub fn summary_for(&self, method: Method) -> Option<&MethodSummary> {
        self.summary.iter().find(|s| s.method == method)
    }

    pub fn aucs(&self, method: Method) -> Vec<f64> {
        let Some(m) = self.config.methods.iter().position(|&x| x == method) else {
            return Vec::new();
        };
        self.replicates.iter().map(|r| r.runs[m].auc).collect()
    }
}

/// Run every replicate: a fresh dataset from `Rng::new(seed).split(r)
/// .split(0)`, one forest seeded from `.split(1)`, and all configured
/// estimators on that same forest.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ReplicateResults> {
    config.validate()?;
    let root = Rng::new(config.seed);

    let generator = if config.fixed_relevant_set {
        match &config.generator {
            GeneratorSpec::DiscreteGrid {
                n,
                p,
                n_relevant,
                task,
                noise_mult,
                fixed_relevant: None,
            } => {
                let first = config.generator.generate(&mut root.split(0).split(0))?;
                GeneratorSpec::DiscreteGrid {
                    n: *n,
                    p: *p,
                    n_relevant: *n_relevant,
                    task: *task,
                    noise_mult: *noise_mult,
                    fixed_relevant: first.relevant_set().map(<[usize]>::to_vec),
                }
            }
            other => other.clone(),
        }
    } else {
        config.generator.clone()
    };

    let per_rep: Vec<(Vec<String>, Replicate)> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            run_replicate(config, &generator, &root, r).map_err(|e| Error::Replicate {
                index: r,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let feature_names = per_rep[0].0.clone();
    let replicates: Vec<Replicate> = per_rep.into_iter().map(|(_, rep)| rep).collect();
    let summary = config
        .methods
        .iter()
        .enumerate()
        .map(|(m, &method)| {
            let aucs: Vec<f64> = replicates.iter().map(|r| r.runs[m].auc).collect();
            let (mean_auc, stderr) = crate::importance::mean_stderr(&aucs);
            MethodSummary {
                method,
                mean_auc,
                stderr,
                single_replicate: aucs.len() == 1,
            }
        })
        .collect();
    Ok(ReplicateResults {
        schema_version: RESULTS_SCHEMA_VERSION,
        config: config.clone(),
        feature_names,
        replicates,
        summary,
    })
}

fn run_replicate(
    config: &ExperimentConfig,
    generator: &GeneratorSpec,
    root: &Rng,
    r: usize,
) -> Result<(Vec<String>, Replicate)> {
    let rep = root.split(r as u64);
    let data = generator.generate(&mut rep.split(0))?;
    let relevant = data
        .relevant_set()
        .ok_or_else(|| {
            Error::Config(format!(
                "generator {} has no relevant set",
                generator.name()
            ))
        })?
        .to_vec();
    let mut params = config.forest;
    params.seed = rep.split(1).seed();
    let forest = train_forest(&data, &params)?;
    let options = EstimatorOptions {
        mda_repeats: config.mda_repeats,
        mda_seed: rep.split(2).seed(),
    };
    let runs = config
        .methods
        .iter()
        .map(|&method| {
            let importance = compute(method, &forest, &data, &options)?;
            let auc = auc_relevant(&importance.scores, &relevant)?;
            Ok(MethodRun { importance, auc })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        data.feature_names().to_vec(),
        Replicate {
            index: r,
            relevant_set: relevant,
            runs,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Sampling, TaskKind};
    use crate::tree::TreeParams;

    fn small(replicates: usize, fixed: bool) -> ExperimentConfig {
        ExperimentConfig {
            generator: GeneratorSpec::DiscreteGrid {
                n: 150,
                p: 12,
                n_relevant: 3,
                task: TaskKind::Classification,
                noise_mult: 100.0,
                fixed_relevant: None,
            },
            forest: ForestParams {
                n_trees: 10,
                tree: TreeParams {
                    min_leaf: 1,
                    max_depth: None,
                    mtry: 4,
                    allow_zero_gain_splits: false,
                    tie_break: Default::default(),
                },
                sampling: Sampling::Bootstrap,
                seed: 0,
            },
            methods: vec![Method::Mdi, Method::MdiOob, Method::NaiveOob, Method::Mda],
            replicates,
            seed: 5,
            mda_repeats: 1,
            fixed_relevant_set: fixed,
        }
    }

    #[test]
    fn aggregation_matches_replicates() {
        let res = run_experiment(&small(4, false)).unwrap();
        assert_eq!(res.replicates.len(), 4);
        for (m, s) in res.summary.iter().enumerate() {
            let aucs: Vec<f64> = res.replicates.iter().map(|r| r.runs[m].auc).collect();
            let mean = aucs.iter().sum::<f64>() / 4.0;
            assert!((s.mean_auc - mean).abs() <= 1e-12);
            assert!(!s.single_replicate);
            for a in aucs {
                assert!((0.0..=1.0).contains(&a));
            }
        }
    }

    #[test]
    fn single_replicate_flag() {
        let res = run_experiment(&small(1, false)).unwrap();
        for s in &res.summary {
            assert_eq!(s.stderr, 0.0);
            assert!(s.single_replicate);
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            run_experiment(&small(3, false)).unwrap(),
            run_experiment(&small(3, false)).unwrap()
        );
    }

    #[test]
    fn relevant_set_redrawn_or_fixed() {
        let free = run_experiment(&small(6, false)).unwrap();
        let sets: Vec<_> = free
            .replicates
            .iter()
            .map(|r| r.relevant_set.clone())
            .collect();
        assert!(sets.iter().any(|s| s != &sets[0]));
        let fixed = run_experiment(&small(6, true)).unwrap();
        let sets: Vec<_> = fixed
            .replicates
            .iter()
            .map(|r| r.relevant_set.clone())
            .collect();
        assert!(sets.iter().all(|s| s == &sets[0]));
    }

    #[test]
    fn invalid_configs() {
        let mut c = small(1, false);
        c.methods.clear();
        assert!(run_experiment(&c).is_err());
        let mut c = small(0, false);
        c.replicates = 0;
        assert!(run_experiment(&c).is_err());
        let mut c = small(1, false);
        c.methods.push(Method::Mdi);
        assert!(run_experiment(&c).is_err());
    }

    #[test]
    fn oob_methods_fail_without_oob_rows() {
        let mut c = small(1, false);
        c.forest.sampling = Sampling::Subsample(1.0);
        let err = run_experiment(&c).unwrap_err().to_string();
        assert!(
            err.contains("replicate 0") && err.contains("out-of-bag"),
            "{err}"
        );
    }
}
