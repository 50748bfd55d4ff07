use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rfimp::data::{Sampling, TaskKind};
use rfimp::eval::Format;
use rfimp::importance::Method;
use rfimp::tree::TieBreak;

#[derive(Debug, Parser)]
#[command(
    name = "rfimp",
    version,
    about = "Random forests with debiased MDI feature importance",
    args_override_self = true,
    subcommand_required = true,
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset (CSV plus JSON sidecar with the relevant set)
    Simulate(SimulateArgs),
    /// Train a forest on a dataset and write it as JSON
    Train(TrainArgs),
    /// Compute feature importances of a trained forest
    Importance(ImportanceArgs),
    /// Sweep minimum leaf size or maximum depth and record importances
    Sweep(SweepArgs),
    /// Run a replicated AUC experiment from a config file or preset
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GeneratorName {
    Strobl,
    DiscreteGrid,
    CorrelatedSurrogate,
    PureNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AxisArg {
    MinLeaf,
    MaxDepth,
    InverseLeaf,
}

/// Comma-separated estimator names.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodList(pub Vec<Method>);

pub fn parse_methods(s: &str) -> Result<MethodList, String> {
    Method::parse_list(s)
        .map(MethodList)
        .map_err(|e| e.to_string())
}

/// Comma-separated values and inclusive `a..b` ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<usize>);

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("'{t}' is not a non-negative integer"))
        };
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty range {part}"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err("grid is empty".into());
    }
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return Err("grid values must be strictly increasing".into());
    }
    Ok(Grid(out))
}

/// Comma-separated 1-based feature numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureList(pub Vec<usize>);

pub fn parse_features(s: &str) -> Result<FeatureList, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|t| match t.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k - 1),
            _ => Err(format!("'{t}' is not a 1-based feature number")),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(FeatureList)
}

fn parse_names(s: &str) -> Result<Vec<String>, String> {
    Ok(s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::to_owned)
        .collect())
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Root random seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores); results do not depend on it
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory (created if missing)
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Flat `key = value` file supplying defaults for this command's flags
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GeneratorArgs {
    /// Number of samples (default: 200 strobl, 1000 discrete-grid, 1000 others)
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of features (default: 50; strobl always has 5)
    #[arg(long)]
    pub p: Option<usize>,
    /// Size of the relevant set
    #[arg(long, default_value_t = 5)]
    pub n_relevant: usize,
    /// Response type: classification or regression
    #[arg(long, default_value = "classification")]
    pub task: TaskKind,
    /// Regression noise variance as a multiple of the signal variance
    #[arg(long, default_value_t = 100.0)]
    pub noise_mult: f64,
    /// Latent equicorrelation of the correlated-surrogate generator
    #[arg(long, default_value_t = 0.5)]
    pub correlation: f64,
    /// Fix the relevant set of discrete-grid data (1-based feature numbers)
    #[arg(long, value_name = "LIST", value_parser = parse_features)]
    pub relevant_set: Option<FeatureList>,
}

#[derive(Debug, Clone, Args)]
pub struct ForestArgs {
    /// Number of trees
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    /// Minimum number of in-bag samples in every leaf
    #[arg(long, default_value_t = 1)]
    pub min_leaf: usize,
    /// Maximum tree depth (root has depth 0); unlimited when absent
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Candidate features per node (default: floor(sqrt(p)), at least 1)
    #[arg(long)]
    pub mtry: Option<usize>,
    /// Per-tree sampling: bootstrap or subsample:<fraction>
    #[arg(long, default_value = "bootstrap")]
    pub sampling: Sampling,
    /// Order for equal-gain candidates: draw-order or lowest-index
    #[arg(long, default_value = "draw-order")]
    pub tie_break: TieBreak,
    /// Keep splitting nodes whose best split has zero impurity decrease
    #[arg(long)]
    pub allow_zero_gain_splits: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset CSV; a JSON sidecar next to it supplies the schema
    #[arg(long, value_name = "CSV")]
    pub data: PathBuf,
    /// Response column when the CSV has no sidecar
    #[arg(long, default_value = "y")]
    pub response: String,
    /// Task when the CSV has no sidecar: classification or regression
    #[arg(long)]
    pub task: Option<TaskKind>,
    /// String-valued columns to integer-encode (comma-separated)
    #[arg(long, value_name = "LIST", value_parser = parse_names)]
    pub categorical: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Data generator
    #[arg(value_enum)]
    pub generator: GeneratorName,
    #[command(flatten)]
    pub gen: GeneratorArgs,
    /// Base name of the written files
    #[arg(long, default_value = "data")]
    pub name: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ImportanceArgs {
    /// Forest JSON written by `train`
    #[arg(long, value_name = "JSON")]
    pub forest: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// Estimators: mdi, mdi-covariance-inbag, mdi-oob, naive-oob, mda, split-count
    #[arg(long, default_value = "mdi,mdi-oob", value_parser = parse_methods)]
    pub methods: MethodList,
    /// Permutations per feature and tree for mda
    #[arg(long, default_value_t = 1)]
    pub mda_repeats: usize,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Data generator
    #[arg(long, value_enum, default_value = "strobl")]
    pub generator: GeneratorName,
    #[command(flatten)]
    pub gen: GeneratorArgs,
    /// Swept parameter: min-leaf, max-depth, or inverse-leaf (min-leaf plotted against 1/value)
    #[arg(long, value_enum, default_value = "min-leaf")]
    pub axis: AxisArg,
    /// Grid values, e.g. 1..50 or 5,10,20
    #[arg(long, value_parser = parse_grid)]
    pub grid: Grid,
    /// Estimator recorded at each grid value
    #[arg(long, default_value = "mdi")]
    pub method: Method,
    /// Replicated datasets per grid value
    #[arg(long, default_value_t = 20)]
    pub replicates: usize,
    /// Permutations per feature and tree for mda
    #[arg(long, default_value_t = 1)]
    pub mda_repeats: usize,
    #[command(flatten)]
    pub forest: ForestArgs,
    /// Built-in configuration to start from (see `rfimp bench --list-presets`)
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Data generator
    #[arg(long, value_enum, default_value = "discrete-grid")]
    pub generator: GeneratorName,
    #[command(flatten)]
    pub gen: GeneratorArgs,
    /// Estimators evaluated on every replicate's forest
    #[arg(long, default_value = "mdi,mdi-oob,naive-oob,mda", value_parser = parse_methods)]
    pub methods: MethodList,
    /// Number of replicated datasets
    #[arg(long, default_value_t = 40)]
    pub replicates: usize,
    /// Permutations per feature and tree for mda
    #[arg(long, default_value_t = 1)]
    pub mda_repeats: usize,
    /// Draw the relevant set once and reuse it in every replicate
    #[arg(long)]
    pub fixed_relevant_set: bool,
    #[command(flatten)]
    pub forest: ForestArgs,
    /// Output format of the results: csv or json
    #[arg(long, default_value = "csv")]
    pub format: Format,
    /// Built-in configuration to start from
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Print the built-in presets and exit
    #[arg(long)]
    pub list_presets: bool,
    #[command(flatten)]
    pub common: Common,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("1..4").unwrap().0, vec![1, 2, 3, 4]);
        assert_eq!(parse_grid("1..3, 10,20").unwrap().0, vec![1, 2, 3, 10, 20]);
        assert!(parse_grid("5,3").is_err());
        assert!(parse_grid("4..2").is_err());
        assert!(parse_grid("").is_err());
        assert!(parse_grid("a").is_err());
    }

    #[test]
    fn feature_lists_are_one_based() {
        assert_eq!(parse_features("1,3").unwrap().0, vec![0, 2]);
        assert!(parse_features("0").is_err());
    }
}
