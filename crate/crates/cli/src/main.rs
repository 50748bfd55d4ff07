mod args;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::{Cli, Command, Common};

const USAGE: u8 = 2;
const RUNTIME: u8 = 1;

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Simulate(a) => &a.common,
        Command::Train(a) => &a.common,
        Command::Importance(a) => &a.common,
        Command::Sweep(a) => &a.common,
        Command::Bench(a) => &a.common,
    }
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn run(cmd: &Command) -> rfimp::Result<()> {
    match cmd {
        Command::Simulate(a) => print_files(&commands::simulate(a)?),
        Command::Train(a) => print_files(&commands::train(a)?),
        Command::Importance(a) => print_files(&commands::importance(a)?),
        Command::Sweep(a) => {
            let out = commands::run_sweep(a)?;
            if let Some((slope, intercept, r)) = out.fit {
                println!("G0 ~ {intercept:.6} + {slope:.6} / min_leaf (pearson r = {r:.4})");
            }
            print_files(&out.files);
        }
        Command::Bench(a) => {
            if a.list_presets {
                for (name, text) in config::PRESETS {
                    println!("{name:<24} {}", config::preset_command(text));
                }
                return Ok(());
            }
            let (results, path) = commands::bench(a)?;
            println!("{:<22} {:>8} {:>8}", "method", "mean_auc", "stderr");
            for s in &results.summary {
                println!(
                    "{:<22} {:>8.3} {:>8.3}",
                    s.method.name(),
                    s.mean_auc,
                    s.stderr
                );
            }
            print_files(&[path]);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<_> = std::env::args_os().collect();
    let argv = match config::expand(argv, &Cli::command()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = common(&cli.command).workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(RUNTIME);
        }
    }
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ rfimp::Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(RUNTIME)
        }
    }
}
