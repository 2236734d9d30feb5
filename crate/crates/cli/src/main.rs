//! `lab`: run ℏ-ladder experiments and bound checks, and inspect their reports.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use semilab_core::lab::{self, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "lab", version, about = "Semiclassical mean-field laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Output directory (default: runs/<config stem>).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run one bound check on the states described by a config file.
    Check {
        bound: String,
        config: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Print the summary of a finished run and regenerate its CSV and gnuplot files.
    Report {
        run_dir: PathBuf,
        /// Print the JSON report instead of the summary.
        #[arg(long)]
        json: bool,
    },
}

fn default_out(config: &Path, suffix: &str) -> PathBuf {
    let stem = config.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    PathBuf::from("runs").join(format!("{stem}{suffix}"))
}

fn execute(cfg: &ExperimentConfig, out: &Path) -> semilab_core::Result<()> {
    let run = lab::run_experiment(cfg)?;
    lab::write_report(&run, out)?;
    print!("{}", lab::summary(&run));
    println!("report written to {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => ExperimentConfig::load(&config).and_then(|cfg| {
            let out = out.unwrap_or_else(|| default_out(&config, ""));
            execute(&cfg, &out)
        }),
        Command::Check { bound, config, out } => ExperimentConfig::load(&config).and_then(|mut cfg| {
            cfg.experiment = format!("bound_check:{bound}").parse::<ExperimentKind>()?;
            let out = out.unwrap_or_else(|| default_out(&config, &format!("-{bound}")));
            execute(&cfg, &out)
        }),
        Command::Report { run_dir, json } => lab::read_report(&run_dir).and_then(|run| {
            if json {
                print!("{}", lab::report_json(&run)?);
            } else {
                lab::write_report(&run, &run_dir)?;
                print!("{}", lab::summary(&run));
            }
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lab: {e}");
            ExitCode::FAILURE
        }
    }
}
