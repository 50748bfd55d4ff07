//! Synthetic datasets with a known relevant-feature set.

use rand::seq::index;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{scale_unit_interval, validate_index_set, Dataset, FeatureKind, Response};
use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Regression,
    Classification,
}

impl std::str::FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "regression" | "reg" => Ok(TaskKind::Regression),
            "classification" | "cls" => Ok(TaskKind::Classification),
            other => Err(Error::Config(format!(
                "unknown task '{other}' (expected regression or classification)"
            ))),
        }
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn bernoulli(rng: &mut Rng, prob: f64) -> usize {
    (rng.random::<f64>() < prob) as usize
}

/// Five features: X1 ~ N(0,1), X2 ~ Bernoulli(1/2), X3/X4/X5 uniform over
/// 4/10/20 categories. Binary y with P(y = 1) = (1 + x2) / 3, so only X2 is
/// relevant.
pub fn gen_strobl(n: usize, rng: &mut Rng) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    let x1: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let x2: Vec<f64> = (0..n).map(|_| bernoulli(rng, 0.5) as f64).collect();
    let mut columns = vec![x1, x2];
    let mut kinds = vec![FeatureKind::Numeric, FeatureKind::Categorical { levels: 2 }];
    for levels in [4usize, 10, 20] {
        columns.push((0..n).map(|_| rng.random_range(0..levels) as f64).collect());
        kinds.push(FeatureKind::Categorical { levels });
    }
    let labels = columns[1]
        .iter()
        .map(|&x2| bernoulli(rng, (1.0 + x2) / 3.0))
        .collect();
    Dataset::new(
        columns,
        Response::Classes {
            labels,
            n_classes: 2,
        },
        kinds,
        Some(vec![1]),
    )
}

/// Variance of (1/5) * sum_{j in S} X_j / j when X_j is uniform on
/// {0, ..., j} (1-indexed j) and the features are independent.
pub fn discrete_grid_signal_variance(relevant: &[usize]) -> f64 {
    relevant
        .iter()
        .map(|&k| {
            let j = (k + 1) as f64;
            (j + 2.0) / (12.0 * j)
        })
        .sum::<f64>()
        / 25.0
}

/// Discrete features of increasing cardinality: feature j (1-indexed) is
/// uniform on {0, ..., j}. The relevant set is drawn from the first ten
/// features unless `fixed_relevant` is given.
pub fn gen_discrete_grid(
    n: usize,
    p: usize,
    n_relevant: usize,
    task: TaskKind,
    noise_mult: f64,
    fixed_relevant: Option<&[usize]>,
    rng: &mut Rng,
) -> Result<Dataset> {
    if n == 0 || p == 0 {
        return Err(Error::Config("n and p must be at least 1".into()));
    }
    if n_relevant > 10 || n_relevant > p {
        return Err(Error::Config(format!(
            "n_relevant = {n_relevant} exceeds min(10, p = {p}); relevant features come from the first ten"
        )));
    }
    if !(noise_mult >= 0.0 && noise_mult.is_finite()) {
        return Err(Error::Config(format!(
            "noise_mult must be >= 0, got {noise_mult}"
        )));
    }
    let relevant = match fixed_relevant {
        Some(rel) => {
            validate_index_set(rel, p.min(10))?;
            if rel.len() != n_relevant {
                return Err(Error::Config(format!(
                    "fixed relevant set has {} features, expected {n_relevant}",
                    rel.len()
                )));
            }
            let mut rel = rel.to_vec();
            rel.sort_unstable();
            rel
        }
        None => draw_subset(rng, p.min(10), n_relevant),
    };

    let columns: Vec<Vec<f64>> = (1..=p)
        .map(|j| (0..n).map(|_| rng.random_range(0..=j) as f64).collect())
        .collect();
    let kinds = (1..=p)
        .map(|j| FeatureKind::Categorical { levels: j + 1 })
        .collect();

    let signal: Vec<f64> = (0..n)
        .map(|i| {
            relevant
                .iter()
                .map(|&k| columns[k][i] / (k + 1) as f64)
                .sum::<f64>()
        })
        .collect();
    let response = match task {
        TaskKind::Classification => Response::Classes {
            labels: signal
                .iter()
                .map(|&s| bernoulli(rng, logistic(0.4 * s - 1.0)))
                .collect(),
            n_classes: 2,
        },
        TaskKind::Regression => {
            let sd = (noise_mult * discrete_grid_signal_variance(&relevant)).sqrt();
            Response::Numeric(
                signal
                    .iter()
                    .map(|&s| {
                        let eps: f64 = StandardNormal.sample(rng);
                        s / 5.0 + sd * eps
                    })
                    .collect(),
            )
        }
    };
    Dataset::new(columns, response, kinds, Some(relevant))
}

/// Independent uniform features and a N(0, 1) response; every feature is
/// noise.
pub fn gen_pure_noise(n: usize, p: usize, rng: &mut Rng) -> Result<Dataset> {
    if n == 0 || p == 0 {
        return Err(Error::Config("n and p must be at least 1".into()));
    }
    let columns: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
        .collect();
    let y = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    Dataset::new(
        columns,
        Response::Numeric(y),
        vec![FeatureKind::Numeric; p],
        Some(Vec::new()),
    )
}

/// Equicorrelated standard Gaussians: Z_ij = sqrt(rho) W_i + sqrt(1 - rho) E_ij.
pub fn latent_equicorrelated(
    n: usize,
    p: usize,
    correlation: f64,
    rng: &mut Rng,
) -> Result<Vec<Vec<f64>>> {
    if !(0.0..1.0).contains(&correlation) {
        return Err(Error::Config(format!(
            "correlation must lie in [0, 1), got {correlation}"
        )));
    }
    let shared: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let (a, b) = (correlation.sqrt(), (1.0 - correlation).sqrt());
    Ok((0..p)
        .map(|_| {
            shared
                .iter()
                .map(|&w| {
                    let e: f64 = StandardNormal.sample(rng);
                    a * w + b * e
                })
                .collect()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateParams {
    pub n: usize,
    pub p: usize,
    pub correlation: f64,
    pub n_relevant: usize,
    pub task: TaskKind,
    pub noise_mult: f64,
}

// Standard normal quintile cut points.
const QUINTILES: [f64; 4] = [
    -0.841_621_233_572_914_3,
    -0.253_347_103_135_799_7,
    0.253_347_103_135_799_7,
    0.841_621_233_572_914_3,
];

/// Correlated stand-in for a real assay table: equicorrelated Gaussian
/// latents pushed through mixed marginals (log-normal, binary, 5-level
/// ordinal, cycling over features), scaled to [0, 1], with a response
/// attached by [`attach_sparse_response`].
pub fn gen_correlated_surrogate(params: &SurrogateParams, rng: &mut Rng) -> Result<Dataset> {
    let SurrogateParams {
        n, p, correlation, ..
    } = *params;
    if n == 0 || p == 0 {
        return Err(Error::Config("n and p must be at least 1".into()));
    }
    let latent = latent_equicorrelated(n, p, correlation, rng)?;
    let mut kinds = Vec::with_capacity(p);
    let columns: Vec<Vec<f64>> = latent
        .into_iter()
        .enumerate()
        .map(|(k, z)| match k % 3 {
            0 => {
                kinds.push(FeatureKind::Numeric);
                z.into_iter().map(f64::exp).collect()
            }
            1 => {
                kinds.push(FeatureKind::Categorical { levels: 2 });
                z.into_iter().map(|v| (v > 0.0) as u8 as f64).collect()
            }
            _ => {
                kinds.push(FeatureKind::Categorical { levels: 5 });
                z.into_iter()
                    .map(|v| QUINTILES.iter().filter(|&&q| v > q).count() as f64)
                    .collect()
            }
        })
        .collect();
    let d = Dataset::new(columns, Response::Numeric(vec![0.0; n]), kinds, None)?;
    let (d, _) = scale_unit_interval(d);
    attach_sparse_response(
        d,
        params.n_relevant,
        params.task,
        params.noise_mult,
        false,
        rng,
    )
}

/// Pick a relevant set of `n_relevant` features uniformly from all p, and
/// replace the response by the rule driven by sum_{j in S} X_j:
/// logistic((2/5) sum - 1) for classification, (1/5) sum plus Gaussian
/// noise with variance `noise_mult` times the empirical signal variance for
/// regression. With `permute_noise` the noisy columns are row-permuted
/// first to break their dependence on the relevant ones.
pub fn attach_sparse_response(
    d: Dataset,
    n_relevant: usize,
    task: TaskKind,
    noise_mult: f64,
    permute_noise: bool,
    rng: &mut Rng,
) -> Result<Dataset> {
    if n_relevant > d.p() {
        return Err(Error::Config(format!(
            "n_relevant = {n_relevant} exceeds p = {}",
            d.p()
        )));
    }
    let relevant = draw_subset(rng, d.p(), n_relevant);
    let d = if permute_noise {
        let stream = rng.split(0x5045_524d);
        super::permute_noisy_features(d, &relevant, &stream)?
    } else {
        d
    };
    let n = d.n();
    let sums: Vec<f64> = (0..n)
        .map(|i| relevant.iter().map(|&k| d.value(i, k)).sum())
        .collect();
    let response = match task {
        TaskKind::Classification => Response::Classes {
            labels: sums
                .iter()
                .map(|&s| bernoulli(rng, logistic(0.4 * s - 1.0)))
                .collect(),
            n_classes: 2,
        },
        TaskKind::Regression => {
            let signal: Vec<f64> = sums.iter().map(|s| s / 5.0).collect();
            let mean = signal.iter().sum::<f64>() / n as f64;
            let var = signal.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n as f64;
            let sd = (noise_mult * var).sqrt();
            Response::Numeric(
                signal
                    .iter()
                    .map(|&s| {
                        let eps: f64 = StandardNormal.sample(rng);
                        s + sd * eps
                    })
                    .collect(),
            )
        }
    };
    d.with_response(response).with_relevant_set(Some(relevant))
}

fn draw_subset(rng: &mut Rng, from: usize, size: usize) -> Vec<usize> {
    let mut s = index::sample(rng, from, size).into_vec();
    s.sort_unstable();
    s
}

/// Generators addressable by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Strobl {
        n: usize,
    },
    DiscreteGrid {
        n: usize,
        p: usize,
        n_relevant: usize,
        task: TaskKind,
        noise_mult: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fixed_relevant: Option<Vec<usize>>,
    },
    CorrelatedSurrogate(SurrogateParams),
    PureNoise {
        n: usize,
        p: usize,
    },
}

impl GeneratorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::Strobl { .. } => "strobl",
            GeneratorSpec::DiscreteGrid { .. } => "discrete-grid",
            GeneratorSpec::CorrelatedSurrogate(_) => "correlated-surrogate",
            GeneratorSpec::PureNoise { .. } => "pure-noise",
        }
    }

    pub fn generate(&self, rng: &mut Rng) -> Result<Dataset> {
        match self {
            GeneratorSpec::Strobl { n } => gen_strobl(*n, rng),
            GeneratorSpec::DiscreteGrid {
                n,
                p,
                n_relevant,
                task,
                noise_mult,
                fixed_relevant,
            } => gen_discrete_grid(
                *n,
                *p,
                *n_relevant,
                *task,
                *noise_mult,
                fixed_relevant.as_deref(),
                rng,
            ),
            GeneratorSpec::CorrelatedSurrogate(params) => gen_correlated_surrogate(params, rng),
            GeneratorSpec::PureNoise { n, p } => gen_pure_noise(*n, *p, rng),
        }
    }
}
