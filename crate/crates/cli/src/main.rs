use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

mod commands;
mod manifest;
mod plot;

use commands::Failure;

/// Run memristor learning experiments from declarative config files.
#[derive(Debug, Parser)]
#[command(name = "memassoc", version)]
struct Cli {
    /// Experiment config (TOML, or a manifest.json to replay). Repeat to sweep.
    #[arg(long, global = true)]
    config: Vec<PathBuf>,

    /// Output directory; sweeps write one subdirectory per config.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Replace the integration step of every simulation, in seconds.
    #[arg(long, global = true)]
    dt_override: Option<f64>,

    /// Configs to run in parallel.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit device parameters to an I-V trace.
    Fit {
        /// CSV with header t_s,v_v,i_a.
        #[arg(long)]
        trace: PathBuf,
    },
    /// Simulate the conditioning chain; write trace, metrics and plot script.
    Pavlov,
    /// Train the 20x20 array on *_input / *_teacher image pairs.
    VisionTrain {
        #[arg(long)]
        train_dir: PathBuf,
    },
    /// Classify every image in a directory against a trained array.
    VisionClassify {
        #[arg(long)]
        test_dir: PathBuf,
        /// Array state CSV written by vision-train.
        #[arg(long, conflicts_with = "train_dir", required_unless_present = "train_dir")]
        state: Option<PathBuf>,
        /// Train first instead of loading a state.
        #[arg(long)]
        train_dir: Option<PathBuf>,
    },
}

fn run_one(cli: &Cli, config: Option<&Path>, out: &Path) -> Result<(), Failure> {
    let mut cfg = commands::load_config(config)?;
    if let Some(dt) = cli.dt_override {
        cfg.override_dt(dt).map_err(Failure::usage)?;
    }
    std::fs::create_dir_all(out).map_err(|e| Failure::runtime(format!("{}: {e}", out.display())))?;
    match &cli.command {
        Command::Fit { trace } => commands::fit(&cfg, trace, out),
        Command::Pavlov => commands::pavlov(&cfg, out),
        Command::VisionTrain { train_dir } => commands::vision_train(&cfg, train_dir, out),
        Command::VisionClassify { test_dir, state, train_dir } => {
            commands::vision_classify(&cfg, test_dir, state.as_deref(), train_dir.as_deref(), out)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if cli.jobs == 0 {
        return Err(Failure::usage("--jobs must be at least 1"));
    }
    match cli.config.as_slice() {
        [] => run_one(cli, None, &cli.out),
        [one] => run_one(cli, Some(one), &cli.out),
        many => {
            let runs: Vec<(&PathBuf, PathBuf)> = many.iter().map(|c| (c, cli.out.join(sweep_dir(c)))).collect();
            let mut seen = std::collections::BTreeSet::new();
            if let Some((c, _)) = runs.iter().find(|(_, d)| !seen.insert(d.clone())) {
                return Err(Failure::usage(format!("two configs map to the same output directory: {}", c.display())));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.jobs)
                .build()
                .map_err(|e| Failure::runtime(e.to_string()))?;
            let results: Vec<Result<(), Failure>> =
                pool.install(|| runs.par_iter().map(|(c, d)| run_one(cli, Some(c), d)).collect());
            // report every failure; exit with the most severe code
            let mut worst: Option<Failure> = None;
            for ((c, _), r) in runs.iter().zip(results) {
                if let Err(f) = r {
                    eprintln!("{}: {}", c.display(), f.message);
                    if worst.as_ref().is_none_or(|w| f.code > w.code) {
                        worst = Some(f);
                    }
                }
            }
            worst.map_or(Ok(()), |w| Err(Failure { message: "one or more runs failed".into(), ..w }))
        }
    }
}

fn sweep_dir(config: &Path) -> String {
    config.file_stem().map_or_else(|| "run".to_string(), |s| s.to_string_lossy().into_owned())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
