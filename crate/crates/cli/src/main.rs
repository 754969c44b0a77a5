//! Reproducible experiment runner.
//!
//! Exit codes: 0 when every asserted check passes, 1 on a numeric failure
//! (the failing cell is named on stderr), 2 on a configuration error.

mod artifacts;
mod config;
mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use artifacts::{config_hash, ArtifactDir, RunRecord, Summary};
use config::{Experiment, ExperimentConfig};
use experiments::RunError;

/// Environment variable overriding the output directory of the config.
const OUT_ENV: &str = "ROUGH_CLT_OUT";

#[derive(Parser)]
#[command(name = "rough-clt", version, about = "Rough-driver SPDE and pathwise CLT experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment configuration; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding `lift.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overriding the config and the environment.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; more than one evaluates experiment cells in parallel.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Brownian lift with Chen and geometricity checks.
    LiftCheck,
    /// One rough solve with norms and the energy report.
    Solve,
    /// CLT convergence experiment.
    Clt,
    /// Itô against Stratonovich fluctuations.
    ItoVsStrat,
    /// Piecewise-linear approximations of the noise.
    WongZakai,
    /// Skeleton equation and the exponential-equivalence diagnostic.
    Mdp,
    /// Every experiment above, one subdirectory each.
    Suite,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Self::LiftCheck => Experiment::LiftCheck,
            Self::Solve => Experiment::Solve,
            Self::Clt => Experiment::Clt,
            Self::ItoVsStrat => Experiment::ItoVsStrat,
            Self::WongZakai => Experiment::WongZakai,
            Self::Mdp => Experiment::Mdp,
            Self::Suite => Experiment::Suite,
        }
    }
}

fn schema_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("schema error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return schema_error(format!("config: cannot read {}: {e}", path.display())),
        },
        None => String::new(),
    };
    let mut cfg = match ExperimentConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => return schema_error(e),
    };
    let exp = cli.command.experiment();
    cfg.experiment = exp;
    if let Some(seed) = cli.seed {
        cfg.lift.seed = seed;
    }
    if let Ok(dir) = std::env::var(OUT_ENV) {
        cfg.out = dir;
    }
    if let Some(dir) = &cli.out {
        cfg.out = dir.display().to_string();
    }
    if let Err(e) = cfg.validate() {
        return schema_error(e);
    }
    let parallel = match cli.threads {
        Some(0) => return schema_error("--threads: must be at least 1"),
        Some(n) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("warning: thread pool already initialized: {e}");
            }
            n > 1
        }
        None => false,
    };

    let hash = config_hash(&cfg);
    let dir = match ArtifactDir::create(PathBuf::from(&cfg.out).join(exp.name()), hash.clone()) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: cannot create output directory: {e}");
            return ExitCode::FAILURE;
        }
    };
    let resolved = format!("# config-sha256 {hash}\n{}", cfg.to_toml());
    if let Err(e) = dir.text("config.toml", &resolved) {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }

    let start = Instant::now();
    let outcome = experiments::run(exp, &cfg, &dir, parallel);
    let elapsed = start.elapsed().as_secs_f64();
    let (cells, failures) = match outcome {
        Ok(o) => (o.cells, o.failures),
        Err(RunError::Numeric(msg)) => (serde_json::Value::Null, vec![format!("{}: {msg}", exp.name())]),
        Err(RunError::Io(e)) => {
            eprintln!("error: writing artifacts: {e}");
            return ExitCode::FAILURE;
        }
    };
    let record = RunRecord {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: exp.name(),
        config_hash: hash,
        config: cfg,
        wall_clock_seconds: elapsed,
        cells,
        summary: Summary { passed: failures.is_empty(), failures },
    };
    if let Err(e) = dir.json("record.json", &record) {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    for f in &record.summary.failures {
        eprintln!("FAIL {f}");
    }
    println!(
        "{} {} in {elapsed:.2}s, artifacts in {}",
        if record.summary.passed { "PASS" } else { "FAIL" },
        exp.name(),
        dir.path().display()
    );
    if record.summary.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
