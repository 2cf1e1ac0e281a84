//! `sedlab <experiment> [--config FILE] [--set key=value]... [--out DIR]
//! [--seed N] [--workers N] [--allow-recurrence]`
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser};
use sedlab::harness::{key_help, resolve_config, run_experiment, Experiment};

#[derive(Parser, Debug)]
#[command(
    name = "sedlab",
    version,
    about = "Stochastic electrodynamics experiments"
)]
struct Cli {
    /// hydrogen | oscillator | field-check | nearfield | inspiral
    experiment: String,
    /// Flat `key = value` config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads
    #[arg(long)]
    workers: Option<usize>,
    /// Accept t_end beyond the field recurrence time
    #[arg(long)]
    allow_recurrence: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let matches = Cli::command().after_help(key_help()).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };

    let config = match resolve_config(
        &cli.experiment,
        cli.config.as_deref(),
        &cli.sets,
        cli.out.as_deref(),
        cli.seed,
        cli.workers,
        cli.allow_recurrence,
    ) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };

    match run_experiment(&config) {
        Ok(record) => {
            // a closed pipe on stdout is not a run failure
            let mut out = std::io::stdout().lock();
            if config.experiment == Experiment::Nearfield {
                let path = config.out_dir.join("nearfield.csv");
                if let Ok(text) = std::fs::read_to_string(path) {
                    let _ = out.write_all(text.as_bytes());
                }
            } else {
                for (k, v) in &record.report {
                    if writeln!(out, "{k} = {v}").is_err() {
                        break;
                    }
                }
            }
            eprintln!(
                "wrote {} in {:.2} s",
                config.out_dir.display(),
                record.wall_clock.as_secs_f64()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("run failed: {e}");
            ExitCode::from(3)
        }
    }
}
