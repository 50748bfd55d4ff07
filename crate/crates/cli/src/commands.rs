use std::fs;
use std::path::{Path, PathBuf};

use rfimp::data::{
    load_csv, load_dataset, write_dataset, ColumnRoles, GeneratorSpec, SurrogateParams,
};
use rfimp::eval::{
    render_sweep_svg, run_experiment, write_importance_csv, write_importance_json, write_report,
    write_sweep_csv, write_sweep_json, ExperimentConfig, Format,
};
use rfimp::forest::{train_forest, Forest, ForestParams};
use rfimp::importance::{
    compute, inverse_leaf_fit, sweep, EstimatorOptions, SweepAxis, SweepConfig,
};
use rfimp::tree::TreeParams;
use rfimp::{Dataset, Error, Result, Rng};

use crate::args::{
    AxisArg, BenchArgs, DataArgs, ForestArgs, GeneratorArgs, GeneratorName, ImportanceArgs,
    SimulateArgs, SweepArgs, TrainArgs,
};

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_owned(),
        source: e,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })
}

pub fn generator_spec(name: GeneratorName, g: &GeneratorArgs) -> Result<GeneratorSpec> {
    let fixed = g.relevant_set.as_ref().map(|l| l.0.clone());
    if fixed.is_some() && name != GeneratorName::DiscreteGrid {
        return Err(Error::Config(
            "--relevant-set only applies to the discrete-grid generator".into(),
        ));
    }
    Ok(match name {
        GeneratorName::Strobl => GeneratorSpec::Strobl {
            n: g.n.unwrap_or(200),
        },
        GeneratorName::DiscreteGrid => GeneratorSpec::DiscreteGrid {
            n: g.n.unwrap_or(1000),
            p: g.p.unwrap_or(50),
            n_relevant: fixed.as_ref().map_or(g.n_relevant, Vec::len),
            task: g.task,
            noise_mult: g.noise_mult,
            fixed_relevant: fixed,
        },
        GeneratorName::CorrelatedSurrogate => GeneratorSpec::CorrelatedSurrogate(SurrogateParams {
            n: g.n.unwrap_or(1000),
            p: g.p.unwrap_or(50),
            correlation: g.correlation,
            n_relevant: g.n_relevant,
            task: g.task,
            noise_mult: g.noise_mult,
        }),
        GeneratorName::PureNoise => GeneratorSpec::PureNoise {
            n: g.n.unwrap_or(1000),
            p: g.p.unwrap_or(50),
        },
    })
}

fn generator_p(spec: &GeneratorSpec) -> usize {
    match spec {
        GeneratorSpec::Strobl { .. } => 5,
        GeneratorSpec::DiscreteGrid { p, .. } | GeneratorSpec::PureNoise { p, .. } => *p,
        GeneratorSpec::CorrelatedSurrogate(s) => s.p,
    }
}

pub fn forest_params(f: &ForestArgs, p: usize, seed: u64) -> ForestParams {
    ForestParams {
        n_trees: f.trees,
        tree: TreeParams {
            min_leaf: f.min_leaf,
            max_depth: f.max_depth,
            mtry: f
                .mtry
                .unwrap_or_else(|| ((p as f64).sqrt().floor() as usize).max(1)),
            allow_zero_gain_splits: f.allow_zero_gain_splits,
            tie_break: f.tie_break,
        },
        sampling: f.sampling,
        seed,
    }
}

fn load_data(a: &DataArgs) -> Result<Dataset> {
    if a.data.with_extension("json").exists() {
        return load_dataset(&a.data);
    }
    let task = a.task.ok_or_else(|| {
        Error::Config(format!(
            "{} has no JSON sidecar; pass --task (and --response if not 'y')",
            a.data.display()
        ))
    })?;
    let mut roles = ColumnRoles::new(a.response.clone(), task);
    roles.categorical = a.categorical.clone().unwrap_or_default();
    load_csv(&a.data, &roles)
}

pub fn simulate(a: &SimulateArgs) -> Result<Vec<PathBuf>> {
    let spec = generator_spec(a.generator, &a.gen)?;
    let data = spec.generate(&mut Rng::new(a.common.seed))?;
    prepare_out(&a.common.out)?;
    let csv = a.common.out.join(format!("{}.csv", a.name));
    write_dataset(&data, &csv)?;
    Ok(vec![csv.clone(), csv.with_extension("json")])
}

pub fn train(a: &TrainArgs) -> Result<Vec<PathBuf>> {
    let data = load_data(&a.data)?;
    let params = forest_params(&a.forest, data.p(), a.common.seed);
    let forest = train_forest(&data, &params)?;
    prepare_out(&a.common.out)?;
    let path = a.common.out.join("forest.json");
    write_file(&path, &forest.to_json()?)?;
    Ok(vec![path])
}

pub fn importance(a: &ImportanceArgs) -> Result<Vec<PathBuf>> {
    let text = fs::read_to_string(&a.forest).map_err(|e| Error::Io {
        path: a.forest.clone(),
        source: e,
    })?;
    let forest = Forest::from_json(&text)?;
    let data = load_data(&a.data)?;
    let options = EstimatorOptions {
        mda_repeats: a.mda_repeats,
        mda_seed: a.common.seed,
    };
    let vectors = a
        .methods
        .0
        .iter()
        .map(|&m| compute(m, &forest, &data, &options))
        .collect::<Result<Vec<_>>>()?;
    prepare_out(&a.common.out)?;
    let path = match a.format {
        Format::Csv => {
            let path = a.common.out.join("importance.csv");
            write_importance_csv(&vectors, data.feature_names(), &path)?;
            path
        }
        Format::Json => {
            let path = a.common.out.join("importance.json");
            write_importance_json(&vectors, data.feature_names(), &path)?;
            path
        }
    };
    Ok(vec![path])
}

pub struct SweepOutcome {
    pub files: Vec<PathBuf>,
    pub fit: Option<(f64, f64, f64)>,
}

pub fn run_sweep(a: &SweepArgs) -> Result<SweepOutcome> {
    let spec = generator_spec(a.generator, &a.gen)?;
    let base = forest_params(&a.forest, generator_p(&spec), 0);
    let axis = match a.axis {
        AxisArg::MaxDepth => SweepAxis::MaxDepth,
        AxisArg::MinLeaf | AxisArg::InverseLeaf => SweepAxis::MinLeaf,
    };
    let table = sweep(&SweepConfig {
        generator: spec,
        axis,
        grid: a.grid.0.clone(),
        base,
        replicates: a.replicates,
        method: a.method,
        seed: a.common.seed,
        mda_repeats: a.mda_repeats,
    })?;
    prepare_out(&a.common.out)?;
    let dir = &a.common.out;
    let (csv, json, svg) = (
        dir.join("sweep.csv"),
        dir.join("sweep.json"),
        dir.join("sweep.svg"),
    );
    write_sweep_csv(&table, &csv)?;
    write_sweep_json(&table, &json)?;
    let inverse = a.axis == AxisArg::InverseLeaf;
    render_sweep_svg(&table, &svg, inverse)?;
    let fit = if inverse {
        Some(inverse_leaf_fit(&table)?)
    } else {
        None
    };
    Ok(SweepOutcome {
        files: vec![csv, json, svg],
        fit,
    })
}

pub fn bench(a: &BenchArgs) -> Result<(rfimp::eval::ReplicateResults, PathBuf)> {
    let spec = generator_spec(a.generator, &a.gen)?;
    let config = ExperimentConfig {
        forest: forest_params(&a.forest, generator_p(&spec), 0),
        generator: spec,
        methods: a.methods.0.clone(),
        replicates: a.replicates,
        seed: a.common.seed,
        mda_repeats: a.mda_repeats,
        fixed_relevant_set: a.fixed_relevant_set,
    };
    let results = run_experiment(&config)?;
    prepare_out(&a.common.out)?;
    let path = a.common.out.join(match a.format {
        Format::Csv => "results.csv",
        Format::Json => "results.json",
    });
    write_report(&results, &path, a.format)?;
    Ok((results, path))
}
