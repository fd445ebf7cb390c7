//! `sfuc-lab`: configuration-driven experiment runner.
//!
//! Exit codes: 0 all assertions passed, 2 an assertion failed, 1 configuration
//! or solver error.

mod config;
mod plot;
mod runner;
mod selftest;

use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sfuc-lab", version, about = "Unique-continuation laboratory runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file; writes report.json and
    /// kind-specific CSV files into the configured output directory.
    Run {
        config: PathBuf,
    },
    /// Extract a named data series from a report as two-column CSV on stdout.
    Plot {
        report: PathBuf,
        series: String,
    },
    /// Run the built-in example battery.
    Selftest,
}

fn worker_count(cfg: &ExperimentConfig) -> Option<usize> {
    if let Ok(env) = std::env::var("SFUC_LAB_WORKERS") {
        if let Ok(n) = env.parse::<usize>() {
            return Some(n.max(1));
        }
    }
    cfg.get("experiment", "workers").and_then(|v| v.parse().ok())
}

fn run_command(path: &PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("sfuc-lab: cannot read config {}: {e}", path.display());
            return ExitCode::from(1);
        }
    };
    let cfg = match ExperimentConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("sfuc-lab: config parse failed: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = cfg.validate() {
        eprintln!("sfuc-lab: config schema violation: {e}");
        if let Some(help) = cfg.kind().ok().and_then(config::describe_kind) {
            eprintln!("{help}");
        }
        return ExitCode::from(1);
    }
    let out_dir = PathBuf::from(cfg.get("experiment", "output_dir").unwrap_or("."));

    let execute = || runner::execute(&cfg, &out_dir);
    let outcome = match worker_count(&cfg) {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build();
            match pool {
                Ok(pool) => pool.install(execute),
                Err(e) => {
                    eprintln!("sfuc-lab: worker pool: {e}");
                    return ExitCode::from(1);
                }
            }
        }
        None => execute(),
    };

    match outcome {
        Ok(out) => {
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            if out.pass {
                println!("result: PASS");
                ExitCode::from(0)
            } else {
                println!("result: FAIL (assertion did not hold; see report.json)");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("sfuc-lab: {e}");
            ExitCode::from(1)
        }
    }
}

fn plot_command(report: &PathBuf, series: &str) -> ExitCode {
    let text = match std::fs::read_to_string(report) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("sfuc-lab: cannot read report {}: {e}", report.display());
            return ExitCode::from(1);
        }
    };
    match plot::emit_plotdata(&text, series) {
        Ok(csv) => {
            print!("{csv}");
            ExitCode::from(0)
        }
        Err(e) => {
            eprintln!("sfuc-lab: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => run_command(&config),
        Command::Plot { report, series } => plot_command(&report, &series),
        Command::Selftest => {
            if selftest::run() {
                ExitCode::from(0)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
