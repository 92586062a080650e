//! `sensoscore` — train, evaluate, and inspect the handwriting-dynamics
//! scoring pipeline from the command line.
//!
//! Exit codes: 0 success, 2 usage/config error, 3 data error, 4 training
//! error. Every failure prints one `error[<class>]: ...` line to stderr.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sensoscore::data::Gender;
use sensoscore::error::{Error, ErrorClass};

#[derive(Parser)]
#[command(
    name = "sensoscore",
    about = "Handwriting-dynamics scoring: LSTM over 10 pen-sensor channels, combined with age and gender by an SVR",
    version
)]
struct Cli {
    /// TOML configuration file; omitted keys use built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Root seed; overrides the config file. All randomness derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for window-level parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic cohort (manifest.csv plus session CSVs).
    Generate {
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the full pipeline on a cohort and write the model bundle.
    Train {
        /// Path to the cohort manifest CSV.
        #[arg(long)]
        cohort: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo cross-validation; writes cv_report.csv.
    Crossval {
        #[arg(long)]
        cohort: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-validate each architecture in [sweep].grid; writes table1.csv.
    Sweep {
        #[arg(long)]
        cohort: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score one session CSV with a trained bundle; prints a JSON record.
    Predict {
        #[arg(long)]
        bundle: PathBuf,
        /// Session CSV (timestamp plus the 10 channels).
        #[arg(long)]
        session: PathBuf,
        /// Child age in years.
        #[arg(long)]
        age: f64,
        /// Child gender: f or m.
        #[arg(long, value_parser = parse_gender)]
        gender: Gender,
        #[arg(long)]
        child_id: Option<String>,
        /// Also write prediction.json and a run manifest here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the attention model and export channel-importance reports.
    Interpret {
        #[arg(long)]
        cohort: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export input and per-layer activation traces for one window.
    Trace {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Which of the session's windows to trace.
        #[arg(long, default_value_t = 0)]
        window_index: usize,
    },
}

fn parse_gender(s: &str) -> Result<Gender, String> {
    match s {
        "f" => Ok(Gender::Female),
        "m" => Ok(Gender::Male),
        other => Err(format!("gender must be `f` or `m`, got `{other}`")),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::invalid_config("jobs", "must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::invalid_config("jobs", e.to_string()))?;
    }
    let cfg = config::load(cli.config.as_deref(), cli.seed)?;
    match cli.command {
        Command::Generate { out } => commands::generate(&cfg, &out),
        Command::Train { cohort, out } => commands::train(&cfg, &cohort, &out),
        Command::Crossval { cohort, out } => commands::crossval(&cfg, &cohort, &out),
        Command::Sweep { cohort, out } => commands::sweep(&cfg, &cohort, &out),
        Command::Predict {
            bundle,
            session,
            age,
            gender,
            child_id,
            out,
        } => commands::predict(&cfg, &bundle, &session, age, gender, child_id, out.as_deref()),
        Command::Interpret { cohort, out } => commands::interpret(&cfg, &cohort, &out),
        Command::Trace {
            bundle,
            session,
            out,
            window_index,
        } => commands::trace(&cfg, &bundle, &session, &out, window_index),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (class, code) = match e.class() {
                ErrorClass::Usage => ("usage", 2),
                ErrorClass::Data => ("data", 3),
                ErrorClass::Train => ("train", 4),
            };
            eprintln!("error[{class}]: {e}");
            ExitCode::from(code)
        }
    }
}
