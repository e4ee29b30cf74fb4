//! `nhkitaev`: spectra of the open non-hermitian Kitaev chain from the
//! command line. Every output starts with the run configuration so that
//! `--config <output>` repeats the run.

mod commands;
mod config;
mod error;
mod literal;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nhkitaev::par::Execution;

use config::{OutputFormat, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "nhkitaev", version, about = "Spectra of the open non-hermitian Kitaev chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Periodic-chain eigenvalues lambda_+-(k) on a uniform k grid.
    Periodic(Common),
    /// Exact diagonalisation of the open chain of L sites.
    Finite {
        #[command(flatten)]
        common: Common,
        /// Add per-state localization columns.
        #[arg(long)]
        localization: bool,
        /// Write one amplitude profile CSV per eigenstate into this directory.
        #[arg(long, value_name = "DIR")]
        vectors: Option<PathBuf>,
    },
    /// Infinite-chain spectrum curves, one CSV per branch in the --out directory.
    Infinite(Common),
    /// Zero-mode criterion; with --state L also the zero-mode vector.
    ZeroMode(Common),
    /// Skin-effect verdict for both periodic branches on the k grid.
    Skin(Common),
    /// Unit-circle root counts of an arbitrary polynomial.
    Bistritz {
        /// Comma-separated complex coefficients, constant term first.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Default)]
struct Common {
    /// JSON run configuration, or any file written by this tool.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Onsite term; complex literal such as `1.5`, `-2i` or `0.4+1e-3i`.
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    /// Hopping t1, the c_j† c_{j+1} amplitude.
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<String>,
    /// Hopping t2, the c_{j+1}† c_j amplitude.
    #[arg(long, allow_hyphen_values = true)]
    t2: Option<String>,
    /// Pairing amplitude d1.
    #[arg(long, allow_hyphen_values = true)]
    d1: Option<String>,
    /// Pairing amplitude d2.
    #[arg(long, allow_hyphen_values = true)]
    d2: Option<String>,
    /// Number of sites.
    #[arg(long = "L", value_name = "L")]
    sites: Option<usize>,
    /// Grid points in alpha for `infinite` (default 1000).
    #[arg(long)]
    n_alpha: Option<usize>,
    /// Grid points in k for `periodic` and `skin` (default 1000).
    #[arg(long)]
    n_k: Option<usize>,
    /// Output file (a directory for `infinite`); stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Relative tolerance for equal root moduli.
    #[arg(long)]
    tol_modulus: Option<f64>,
    /// Also write the L-site zero-mode vector next to the `zero-mode` output.
    #[arg(long, value_name = "L")]
    state: Option<usize>,
    /// Run sweeps on one thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let mut tolerances = BTreeMap::new();
        if let Some(t) = self.tol_modulus {
            tolerances.insert("modulus".to_string(), t);
        }
        let flags = RunConfig {
            m: self.m.clone(),
            t1: self.t1.clone(),
            t2: self.t2.clone(),
            d1: self.d1.clone(),
            d2: self.d2.clone(),
            sites: self.sites,
            n_alpha: self.n_alpha,
            n_k: self.n_k,
            tolerances,
            output_path: self.out.clone(),
            output_format: self.format,
            state: self.state,
        };
        base.overlay(flags).normalise()
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Periodic(c) => commands::periodic(&c.resolve()?),
        Command::Finite { common, localization, vectors } => {
            commands::finite(&common.resolve()?, localization, vectors.as_deref())
        }
        Command::Infinite(c) => commands::infinite(&c.resolve()?, c.execution()),
        Command::ZeroMode(c) => commands::zero_mode(&c.resolve()?),
        Command::Skin(c) => commands::skin(&c.resolve()?, c.execution()),
        Command::Bistritz { coeffs, out } => commands::bistritz_cmd(&coeffs, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
