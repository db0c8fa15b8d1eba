use std::path::PathBuf;
use std::process::ExitCode;

use atomchain_cli::{default_workers, run, ConfigError, ExperimentConfig};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "atomchain", version, about = "Time-dependent Ising chain experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Excitation spectrum along a coupling path.
    Spectrum(RunArgs),
    /// Fidelity bounds along a linear ramp.
    Quench(RunArgs),
    /// Ramp duration needed for a target fidelity, versus chain length.
    SweepT(RunArgs),
    /// Beam-splitter infidelity versus zone width and chain length.
    SweepWidth(RunArgs),
    /// Hadamard, staggered-phase and two-qubit phase gates.
    Gate(RunArgs),
    /// Free-fermion bounds against the state-vector oracle on random ramps.
    OracleCompare(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV tables and the metadata file.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (overrides the config).
    #[arg(long)]
    workers: Option<usize>,
    /// RNG seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

impl Command {
    fn parts(&self) -> (&'static str, &RunArgs) {
        match self {
            Command::Spectrum(a) => ("spectrum", a),
            Command::Quench(a) => ("quench", a),
            Command::SweepT(a) => ("sweep-t", a),
            Command::SweepWidth(a) => ("sweep-width", a),
            Command::Gate(a) => ("gate", a),
            Command::OracleCompare(a) => ("oracle-compare", a),
        }
    }
}

fn config_failure(e: &ConfigError) -> ExitCode {
    let details = match e {
        ConfigError::Invalid(errs) => errs.clone(),
        _ => Vec::new(),
    };
    fail("config", e, details, 2)
}

fn fail(kind: &str, err: &dyn std::fmt::Display, details: Vec<String>, code: u8) -> ExitCode {
    let body = json!({ "error": kind, "message": err.to_string(), "details": details });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.parts();

    let mut cfg = match ExperimentConfig::load(&args.config).and_then(|c| {
        c.expect_kind(kind)?;
        Ok(c)
    }) {
        Ok(c) => c,
        Err(e) => return config_failure(&e),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(w) = args.workers {
        cfg.workers = Some(w);
    }
    if let Err(e) = cfg.validate() {
        return config_failure(&e);
    }

    let workers = cfg.workers.unwrap_or_else(default_workers);
    let record = match run(&cfg, workers) {
        Ok(r) => r,
        Err(e) => {
            let chain = e.chain().skip(1).map(|c| c.to_string()).collect();
            return fail("run", &e, chain, 1);
        }
    };
    let config_json = serde_json::to_value(&cfg).expect("config serializes");
    match record.write(&args.out, &config_json) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail("io", &e, Vec::new(), 1),
    }
}
