//! `fastmix`: plan, train, verify, reproduce and export.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{ModeName, Overrides, RunConfig, DEFAULT_SEED};

#[derive(Parser)]
#[command(
    name = "fastmix",
    version,
    about = "Ising model learning with certified MCMC gradients"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Verification suite: `all` or one check name.
    #[arg(long, global = true, value_name = "NAME", default_value = "all")]
    suite: String,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeName>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the schedule (K, M, v) and the matching work lower bound.
    Plan,
    /// Train and write trace.csv, trace.json and summary.txt.
    Train,
    /// Run the verification suite.
    Verify,
    /// Rerun the 4×4 grid experiment with five seeded runs.
    Reproduce,
    /// Convert a JSON trace to CSV.
    Export {
        /// trace.json written by `train`.
        input: PathBuf,
    },
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            out: self.out.clone(),
            mode: self.mode,
        }
    }

    fn config(&self) -> Result<Option<RunConfig>> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => return Ok(None),
        };
        cfg.apply(&self.overrides());
        Ok(Some(cfg))
    }

    fn config_or_default(&self) -> Result<RunConfig> {
        Ok(match self.config()? {
            Some(c) => c,
            None => {
                let mut c = RunConfig::default();
                c.apply(&self.overrides());
                c
            }
        })
    }
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Plan => {
            print!("{}", commands::plan(&cli.config_or_default()?)?);
            Ok(true)
        }
        Command::Train => {
            print!("{}", commands::train_command(&cli.config_or_default()?)?);
            Ok(true)
        }
        Command::Verify => {
            let cfg = cli.config()?;
            let seed = cli
                .seed
                .or_else(|| cfg.as_ref().and_then(|c| c.run.seed))
                .unwrap_or(DEFAULT_SEED);
            let out = cli
                .out
                .clone()
                .or_else(|| cfg.as_ref().and_then(|c| c.run.out.clone()));
            let (report, passed) =
                commands::verify(cfg.as_ref(), &cli.suite, seed, out.as_deref())?;
            print!("{report}");
            Ok(passed)
        }
        Command::Reproduce => {
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("reproduce"));
            let (report, ok) = commands::reproduce(cli.seed, &out)?;
            print!("{report}");
            Ok(ok)
        }
        Command::Export { input } => {
            if let Some(csv) = commands::export(input, cli.out.as_deref())? {
                print!("{csv}");
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
