//! Command-line front end for the experiment harness.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qltt::harness::{cmd_calibrate, cmd_coverage, cmd_report, cmd_simulate, exit_code, ExperimentConfig, Overrides};
use qltt::{Error, Method};

#[derive(Parser)]
#[command(
    name = "qltt",
    version,
    about = "Certify hyperparameters that control average or quantile risk"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overriding the config
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run only this method
    #[arg(long, global = true)]
    method: Option<Method>,
    /// Print nothing on success
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate every configured method and write result_<method>.json
    Calibrate,
    /// Repeat calibration many times against ground truth and write coverage.json
    Coverage,
    /// Generate calibration and test risk matrices
    Simulate,
    /// Turn results in --out (or the config's output_dir) into histogram.csv and violin.csv
    Report,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("--config is required for this command".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    cfg.apply(&Overrides {
        seed: cli.seed,
        output_dir: cli.out.clone(),
        method: cli.method,
    })?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<String, Error> {
    match cli.command {
        Command::Calibrate => {
            let out = cmd_calibrate(&load(cli)?)?;
            Ok(out.summary)
        }
        Command::Coverage => {
            let (report, path) = cmd_coverage(&load(cli)?)?;
            Ok(format!("{}wrote {}\n", report.describe(), path.display()))
        }
        Command::Simulate => {
            let out = cmd_simulate(&load(cli)?)?;
            Ok(out.written.iter().map(|p| format!("wrote {}\n", p.display())).collect())
        }
        Command::Report => {
            let dir = match (&cli.out, &cli.config) {
                (Some(d), _) => d.clone(),
                (None, Some(_)) => load(cli)?.output_dir,
                (None, None) => return Err(Error::InvalidConfig("report needs --out or --config".into())),
            };
            let out = cmd_report(&dir)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            Ok(out.written.iter().map(|p| format!("wrote {}\n", p.display())).collect())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            if !cli.quiet {
                print!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
