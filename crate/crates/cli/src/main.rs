//! `rydcat`: batch front-end producing the figure data and reports as CSV or JSON.
//!
//! Exit codes: 0 success, 1 I/O failure writing output, 2 missing data file,
//! 3 invalid configuration, 4 numerical failure.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rydcat::atomic::{AtomModel, RadialGrid};
use rydcat::data::{DataSet, DATA_FILES};
use rydcat::Error;

use crate::commands::Context;
use crate::config::{load_file, FileConfig, Params};
use crate::output::{render, sha256_hex, Header};

/// Environment variable naming the data directory.
const DATA_DIR_ENV: &str = "RYDCAT_DATA_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "rydcat",
    version,
    about = "Rydberg-dressed energy cat simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory holding the atomic data files (overrides RYDCAT_DATA_DIR)
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    /// Output file; stdout when absent
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Fidelities along the dressing evolution of a CSS
    CatEvolve,
    /// Dressing ratio w reaching a target F_nl, per atom number
    FnlScan,
    /// Return to the initial CSS at twice the cat time
    Revival,
    /// F_IH of a cubic block versus D / R_b
    Inhomogeneity,
    /// Radiative lifetimes of the 3S1 series
    Lifetimes,
    /// Blackbody-induced transition rates
    Bbr,
    /// De-excitation, loss and decay fidelities
    Decoherence,
    /// Maximum cat size versus principal quantum number
    Catsize,
    /// Minimum detectable energy-decoherence sigma
    SigmaBound,
    /// Husimi Q function on a sphere grid
    Husimi,
    /// Motional sideband leakage during the clock rotation
    Phonon,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::CatEvolve => "cat-evolve",
            Command::FnlScan => "fnl-scan",
            Command::Revival => "revival",
            Command::Inhomogeneity => "inhomogeneity",
            Command::Lifetimes => "lifetimes",
            Command::Bbr => "bbr",
            Command::Decoherence => "decoherence",
            Command::Catsize => "catsize",
            Command::SigmaBound => "sigma-bound",
            Command::Husimi => "husimi",
            Command::Phonon => "phonon",
        }
    }
}

/// A failed run: exit code and message.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn validation(field: &str, reason: impl std::fmt::Display) -> Self {
        Self {
            code: 3,
            message: format!("invalid `{field}`: {reason}"),
        }
    }

    fn missing_data(path: &Path) -> Self {
        Self {
            code: 2,
            message: format!("missing data file {}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument { .. } | Error::Size(_) | Error::Data { .. } => 3,
            Error::Numerical { .. } | Error::NotConverged { .. } => 4,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn load_data(dir: Option<&Path>) -> Result<DataSet, Failure> {
    let Some(dir) = dir else {
        return Ok(DataSet::embedded());
    };
    for name in DATA_FILES {
        let path = dir.join(name);
        if !path.is_file() {
            return Err(Failure::missing_data(&path));
        }
    }
    Ok(DataSet::load_dir(dir)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };
    let params = Params::merged(cli.params, file.params);
    let data_dir = cli
        .data_dir
        .or(file.data_dir)
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from));
    let output_path = cli.output.or(file.output);
    let data = load_data(data_dir.as_deref())?;

    let canonical =
        serde_json::to_string(&(cli.command.name(), &params)).expect("params serialize");
    let header = Header {
        command: cli.command.name().to_string(),
        config_sha256: sha256_hex(canonical.as_bytes()),
        data_files: data
            .raw
            .iter()
            .map(|(n, t)| (n.clone(), sha256_hex(t.as_bytes())))
            .collect(),
    };
    let atom = AtomModel::new(data.atom, RadialGrid::default());
    let ctx = Context {
        params: &params,
        atom: &atom,
    };
    let table = match cli.command {
        Command::CatEvolve => commands::cat_evolve(&ctx),
        Command::FnlScan => commands::fnl_scan(&ctx),
        Command::Revival => commands::revival(&ctx),
        Command::Inhomogeneity => commands::inhomogeneity(&ctx),
        Command::Lifetimes => commands::lifetimes(&ctx),
        Command::Bbr => commands::bbr(&ctx),
        Command::Decoherence => commands::decoherence(&ctx),
        Command::Catsize => commands::catsize(&ctx),
        Command::SigmaBound => commands::sigma_bound(&ctx),
        Command::Husimi => commands::husimi(&ctx),
        Command::Phonon => commands::phonon(&ctx),
    }?;
    let text = render(&header, &table, params.format.unwrap_or_default());
    match output_path {
        Some(path) => std::fs::write(&path, text).map_err(|e| Failure {
            code: 1,
            message: format!("writing {}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
