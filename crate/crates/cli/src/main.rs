//! `leslie-dyn`: simulations and analyses of the Leslie prey-predator map.
//!
//! Exit codes: 0 success (an orbit leaving the domain is a result, not an
//! error), 1 I/O failure, 2 invalid flags or configuration, 3 the requested
//! analysis failed.

mod commands;
mod config;
mod report;

use std::fmt::Display;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::Parser;

use config::{Cli, RunConfig, CONFIG_VERSION};

pub const THREADS_ENV: &str = "LESLIE_DYN_THREADS";

#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Operation(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    pub fn usage(msg: impl Display) -> Self {
        Failure::Usage(anyhow!("{msg}"))
    }

    pub fn op(err: leslie_core::ModelError) -> Self {
        Failure::Operation(err.into())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Operation(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Operation(e) | Failure::Io(e) => e,
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize =
        raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
            Failure::usage(format!("{THREADS_ENV}={raw} is not a positive integer"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Io(e.into()))
}

fn resolve(cli: Cli) -> Result<RunConfig, Failure> {
    let cfg = match (cli.config, cli.command) {
        (Some(_), Some(_)) => {
            return Err(Failure::usage(
                "--config cannot be combined with a subcommand",
            ))
        }
        (None, None) => return Err(Failure::usage("a subcommand or --config is required")),
        (None, Some(command)) => RunConfig {
            version: CONFIG_VERSION,
            run: command,
        },
        (Some(path), None) => {
            let text = report::read_to_string(&path).map_err(Failure::Usage)?;
            let cfg: RunConfig = serde_json::from_str(&text)
                .with_context(|| format!("{} is not a valid run configuration", path.display()))
                .map_err(Failure::Usage)?;
            if cfg.version != CONFIG_VERSION {
                return Err(Failure::usage(format!(
                    "unsupported configuration version {}",
                    cfg.version
                )));
            }
            cfg
        }
    };
    if let Some(path) = cli.save_config {
        let mut text = serde_json::to_string_pretty(&cfg).map_err(|e| Failure::Io(e.into()))?;
        text.push('\n');
        report::write_atomic(Some(&path), text.as_bytes()).map_err(Failure::Io)?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let cfg = resolve(cli)?;
    commands::execute(&cfg.run)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
