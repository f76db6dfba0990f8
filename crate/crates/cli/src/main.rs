//! `esvqe`: batch runs of HF, FCI, VQE, ES-VQE and ADAPT-VQE over FCIDUMP
//! files, plus report tables built from run traces.
//!
//! Exit status: 0 success, 2 configuration error, 3 invalid input or
//! validation failure, 4 optimizer failure, 1 anything else.

mod config;
mod report;
mod run;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::{ConfigError, Convention, PoolKind, RunArgs};
use report::ReportArgs;

#[derive(Parser)]
#[command(name = "esvqe", version, about = "Energy-sorting VQE and baselines on a statevector simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method over one or more FCIDUMP files.
    Run(RunArgs),
    /// Tabulate errors and operator counts from run traces.
    Report(ReportArgs),
    /// Print screened pool sizes for each input.
    Pools {
        #[arg(long, required = true)]
        fcidump: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "spin-adapted")]
        pool_convention: Convention,
    },
}

pub(crate) fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn pools(paths: &[PathBuf], convention: Convention) -> Result<()> {
    let mut text = format!("{:<16} {:>8}", "input", "qubits");
    for k in PoolKind::ALL {
        text.push_str(&format!(" {:>11}", k.name()));
    }
    text.push('\n');
    for p in paths {
        let input = run::load_input(p)?;
        let s = &input.integrals;
        text.push_str(&format!("{:<16} {:>8}", format!("{} {}", input.system, input.geometry), s.n_spin_orbitals()));
        for k in PoolKind::ALL {
            text.push_str(&format!(" {:>11}", run::build_pool(s, k, convention.into())?.len()));
        }
        text.push('\n');
    }
    write_output(None, &text)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<esvqe::Error>() {
        Some(esvqe::Error::InvalidCombination(_)) => 2,
        Some(esvqe::Error::OptimizerDiverged { .. }) => 4,
        Some(_) => 3,
        None if err.downcast_ref::<std::io::Error>().is_some() => 3,
        None => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => args.resolve().map_err(anyhow::Error::from).and_then(|cfg| run::run(&cfg)),
        Command::Report(args) => report::report(&args),
        Command::Pools { fcidump, pool_convention } => pools(&fcidump, pool_convention),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
