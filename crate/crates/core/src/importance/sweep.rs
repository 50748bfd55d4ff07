//! Leaf-size and depth sweeps of replicated forests, and the inverse leaf
//! size scaling probe for the noise mass G0.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{compute, noise_mass_g0, EstimatorOptions, Method};
use crate::data::GeneratorSpec;
use crate::error::{Error, Result};
use crate::forest::{train_forest, ForestParams};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    MinLeaf,
    MaxDepth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub generator: GeneratorSpec,
    pub axis: SweepAxis,
    pub grid: Vec<usize>,
    /// The swept field is overwritten per grid value; depth sweeps also
    /// force `min_leaf = 1`.
    pub base: ForestParams,
    pub replicates: usize,
    pub method: Method,
    pub seed: u64,
    #[serde(default = "one")]
    pub mda_repeats: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: usize,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub g0_mean: f64,
    pub g0_stderr: f64,
    /// Scores of every replicate, in replicate order.
    pub replicate_scores: Vec<Vec<f64>>,
    pub replicate_g0: Vec<f64>,
}

pub const SWEEP_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub schema_version: u32,
    pub axis: SweepAxis,
    pub method: Method,
    pub generator: String,
    pub replicates: usize,
    pub seed: u64,
    pub feature_names: Vec<String>,
    pub rows: Vec<SweepRow>,
}

/// Mean and standard error (sample sd / sqrt(len)); 0 error for one value.
pub(crate) fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Feature names and, per grid value, (scores, g0).
type ReplicateRun = (Vec<String>, Vec<(Vec<f64>, f64)>);

/// Run the sweep. Replicate r draws its dataset from
/// `Rng::new(seed).split(r).split(0)` and reuses it, and one forest seed,
/// across the whole grid, so grid points differ only in the swept
/// parameter.
pub fn sweep(config: &SweepConfig) -> Result<SweepTable> {
    if config.grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    if config.grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(
            "sweep grid must be strictly ascending".into(),
        ));
    }
    if config.replicates == 0 {
        return Err(Error::Config("replicates must be at least 1".into()));
    }
    let root = Rng::new(config.seed);
    let mut runs: Vec<ReplicateRun> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let rep = root.split(r as u64);
            let data = config.generator.generate(&mut rep.split(0))?;
            let relevant = data.relevant_set().ok_or_else(|| {
                Error::Config(format!(
                    "generator {} has no known relevant set",
                    config.generator.name()
                ))
            })?;
            let forest_seed = rep.split(1).seed();
            let points = config
                .grid
                .iter()
                .enumerate()
                .map(|(g, &value)| {
                    let mut params = config.base;
                    params.seed = forest_seed;
                    match config.axis {
                        SweepAxis::MinLeaf => params.tree.min_leaf = value,
                        SweepAxis::MaxDepth => {
                            params.tree.min_leaf = 1;
                            params.tree.max_depth = Some(value);
                        }
                    }
                    let forest = train_forest(&data, &params)?;
                    let options = EstimatorOptions {
                        mda_repeats: config.mda_repeats,
                        mda_seed: rep.split(2).split(g as u64).seed(),
                    };
                    let v = compute(config.method, &forest, &data, &options)?;
                    let g0 = noise_mass_g0(&v.scores, relevant)?;
                    Ok((v.scores, g0))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((data.feature_names().to_vec(), points))
        })
        .collect::<Result<Vec<_>>>()?;

    let p = runs[0].0.len();
    let rows = config
        .grid
        .iter()
        .enumerate()
        .map(|(g, &value)| {
            let replicate_scores: Vec<Vec<f64>> = runs.iter().map(|r| r.1[g].0.clone()).collect();
            let replicate_g0: Vec<f64> = runs.iter().map(|r| r.1[g].1).collect();
            let (mean, stderr) = (0..p)
                .map(|k| {
                    let col: Vec<f64> = replicate_scores.iter().map(|s| s[k]).collect();
                    mean_stderr(&col)
                })
                .unzip();
            let (g0_mean, g0_stderr) = mean_stderr(&replicate_g0);
            SweepRow {
                value,
                mean,
                stderr,
                g0_mean,
                g0_stderr,
                replicate_scores,
                replicate_g0,
            }
        })
        .collect();
    Ok(SweepTable {
        schema_version: SWEEP_SCHEMA_VERSION,
        axis: config.axis,
        method: config.method,
        generator: config.generator.name().to_owned(),
        replicates: config.replicates,
        seed: config.seed,
        feature_names: runs.swap_remove(0).0,
        rows,
    })
}

pub fn sweep_leaf_size(
    generator: GeneratorSpec,
    grid: Vec<usize>,
    base: ForestParams,
    replicates: usize,
    method: Method,
    seed: u64,
) -> Result<SweepTable> {
    sweep(&SweepConfig {
        generator,
        axis: SweepAxis::MinLeaf,
        grid,
        base,
        replicates,
        method,
        seed,
        mda_repeats: 1,
    })
}

pub fn sweep_depth(
    generator: GeneratorSpec,
    grid: Vec<usize>,
    base: ForestParams,
    replicates: usize,
    method: Method,
    seed: u64,
) -> Result<SweepTable> {
    sweep(&SweepConfig {
        generator,
        axis: SweepAxis::MaxDepth,
        grid,
        base,
        replicates,
        method,
        seed,
        mda_repeats: 1,
    })
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

/// OLS fit and Pearson correlation of mean G0 against 1 / grid value.
/// NaN for fewer than two grid values.
pub fn inverse_leaf_fit(table: &SweepTable) -> Result<(f64, f64, f64)> {
    if table.axis != SweepAxis::MinLeaf {
        return Err(Error::Config(
            "inverse-leaf fit needs a min-leaf sweep".into(),
        ));
    }
    let inv: Vec<f64> = table.rows.iter().map(|r| 1.0 / r.value as f64).collect();
    let g0: Vec<f64> = table.rows.iter().map(|r| r.g0_mean).collect();
    if inv.len() < 2 {
        return Ok((f64::NAN, f64::NAN, f64::NAN));
    }
    let m = inv.len() as f64;
    let (mx, my) = (inv.iter().sum::<f64>() / m, g0.iter().sum::<f64>() / m);
    let sxy: f64 = inv.iter().zip(&g0).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = inv.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx, pearson(&inv, &g0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub table: SweepTable,
    /// OLS fit of mean G0 against 1 / min_leaf over the grid.
    pub slope: f64,
    pub intercept: f64,
    pub pearson_r: f64,
}

/// MDI noise mass on pure-noise data across leaf sizes, fitted against the
/// inverse leaf size. `base` supplies every forest setting except
/// `min_leaf`.
pub fn inverse_leaf_probe(
    n: usize,
    p: usize,
    grid: Vec<usize>,
    base: ForestParams,
    replicates: usize,
    seed: u64,
) -> Result<ProbeResult> {
    let table = sweep_leaf_size(
        GeneratorSpec::PureNoise { n, p },
        grid,
        base,
        replicates,
        Method::Mdi,
        seed,
    )?;
    let (slope, intercept, pearson_r) = inverse_leaf_fit(&table)?;
    Ok(ProbeResult {
        table,
        slope,
        intercept,
        pearson_r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Sampling;
    use crate::tree::TreeParams;

    fn base(n_trees: usize, mtry: usize) -> ForestParams {
        ForestParams {
            n_trees,
            tree: TreeParams {
                min_leaf: 1,
                max_depth: None,
                mtry,
                allow_zero_gain_splits: false,
                tie_break: Default::default(),
            },
            sampling: Sampling::Bootstrap,
            seed: 0,
        }
    }

    #[test]
    fn mean_stderr_basics() {
        assert_eq!(mean_stderr(&[2.0]), (2.0, 0.0));
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn leaf_size_n_gives_all_zero_row() {
        let t = sweep_leaf_size(
            GeneratorSpec::Strobl { n: 40 },
            vec![40],
            base(5, 2),
            3,
            Method::Mdi,
            1,
        )
        .unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].mean, vec![0.0; 5]);
        assert_eq!(t.rows[0].g0_mean, 0.0);
    }

    #[test]
    fn grid_validation() {
        let g = GeneratorSpec::Strobl { n: 30 };
        assert!(sweep_leaf_size(g.clone(), vec![], base(2, 2), 1, Method::Mdi, 0).is_err());
        assert!(sweep_leaf_size(g.clone(), vec![5, 3], base(2, 2), 1, Method::Mdi, 0).is_err());
        assert!(sweep_leaf_size(g, vec![1], base(2, 2), 0, Method::Mdi, 0).is_err());
    }

    #[test]
    fn depth_one_is_bounded_by_single_split() {
        let t = sweep_depth(
            GeneratorSpec::Strobl { n: 100 },
            vec![1, 2],
            base(10, 2),
            2,
            Method::SplitCount,
            3,
        )
        .unwrap();
        for s in &t.rows[0].replicate_scores {
            assert!(s.iter().sum::<f64>() <= 1.0);
        }
    }

    #[test]
    fn depth_sweep_g0_mostly_non_decreasing() {
        let t = sweep_depth(
            GeneratorSpec::Strobl { n: 200 },
            (1..=12).collect(),
            base(50, 2),
            6,
            Method::Mdi,
            11,
        )
        .unwrap();
        let g0: Vec<f64> = t.rows.iter().map(|r| r.g0_mean).collect();
        let ups = g0.windows(2).filter(|w| w[1] >= w[0]).count();
        assert!(ups as f64 >= 0.9 * (g0.len() - 1) as f64, "{g0:?}");
    }

    #[test]
    fn sweeps_are_deterministic() {
        let run = || {
            sweep_leaf_size(
                GeneratorSpec::Strobl { n: 80 },
                vec![1, 5],
                base(8, 2),
                3,
                Method::MdiOob,
                4,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn inverse_fit_recovers_a_line() {
        let rows = [1usize, 2, 4, 8]
            .iter()
            .map(|&v| SweepRow {
                value: v,
                mean: vec![],
                stderr: vec![],
                g0_mean: 0.1 + 2.0 / v as f64,
                g0_stderr: 0.0,
                replicate_scores: vec![],
                replicate_g0: vec![],
            })
            .collect();
        let mut table = SweepTable {
            schema_version: SWEEP_SCHEMA_VERSION,
            axis: SweepAxis::MinLeaf,
            method: Method::Mdi,
            generator: "pure-noise".into(),
            replicates: 1,
            seed: 0,
            feature_names: vec![],
            rows,
        };
        let (slope, intercept, r) = inverse_leaf_fit(&table).unwrap();
        assert!((slope - 2.0).abs() < 1e-12 && (intercept - 0.1).abs() < 1e-12);
        assert!((r - 1.0).abs() < 1e-12);
        table.axis = SweepAxis::MaxDepth;
        assert!(inverse_leaf_fit(&table).is_err());
    }

    #[test]
    fn probe_at_leaf_size_n_is_zero() {
        let r = inverse_leaf_probe(50, 3, vec![10, 50], base(3, 3), 2, 0).unwrap();
        assert_eq!(r.table.rows[1].g0_mean, 0.0);
        assert!(r.table.rows[0].g0_mean > 0.0);
    }
}
