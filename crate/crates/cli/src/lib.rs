//! Scenario-driven command-line front end.

pub mod commands;
pub mod fuzz;
pub mod gen;
pub mod report;
pub mod scenario;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use tensor_hodge::complexes::ComplexError;
use tensor_hodge::dbar::DbarError;
use tensor_hodge::jointspec::JointError;
use tensor_hodge::numerics::{NumericsError, Tolerance, DEFAULT_KRONECKER_CAP};
use tensor_hodge::spectra::{rational, Rational, SpectraError};
use tensor_hodge::tensor::TensorError;
use thiserror::Error;

pub use report::{Outcome, Report, Series};
pub use scenario::{ParseError, Scenario};

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("usage: {0}")]
    Usage(String),
    #[error("complexes: {0}")]
    Complex(#[from] ComplexError),
    #[error("tensor: {0}")]
    Tensor(#[from] TensorError),
    #[error("spectra: {0}")]
    Spectra(#[from] SpectraError),
    #[error("dbar: {0}")]
    Dbar(#[from] DbarError),
    #[error("jointspec: {0}")]
    Joint(#[from] JointError),
    #[error("numerics: {0}")]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// d∘d = 0 and nondegeneracy
    Validate,
    /// Laplacian eigenvalues per degree
    Spectrum,
    /// Hodge projectors and cohomology dimensions
    Hodge,
    /// Solution-operator identities per degree
    Identities,
    /// Tensor product: spectrum of the product Laplacian and Künneth dimensions
    Tensor,
    /// Union, Minkowski sum and essential parts of spectral sets
    Symbolic,
    /// ∂̄-Neumann compactness on a product of two factors
    Dbar,
    /// ∂̄-Neumann compactness on a product of curves, every form degree
    DbarN,
    /// Joint spectra of commuting normal pairs
    Joint,
    /// Seeded property suites
    Fuzz,
    /// Built-in ∂̄ factor models
    Catalogue,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Spectrum => "spectrum",
            Command::Hodge => "hodge",
            Command::Identities => "identities",
            Command::Tensor => "tensor",
            Command::Symbolic => "symbolic",
            Command::Dbar => "dbar",
            Command::DbarN => "dbar-n",
            Command::Joint => "joint",
            Command::Fuzz => "fuzz",
            Command::Catalogue => "catalogue",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "thodge", version, about = "Hodge theory of finite complexes, tensor products and spectral models")]
pub struct Cli {
    pub command: Command,
    /// Scenario file (not needed for `fuzz` and `catalogue`)
    pub scenario: Option<PathBuf>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write eigenvalue lists as CSV to this path
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// Absolute bound for identity checks
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for random complexes and fuzzing (overrides the scenario's rng_seed)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cutoff for the enumeration oracle in `symbolic`, e.g. 100 or 7/2
    #[arg(long, value_parser = parse_rational)]
    pub oracle_cutoff: Option<Rational>,
    /// Largest matrix dimension a tensor product may reach
    #[arg(long)]
    pub max_dim: Option<usize>,
    /// Cases per fuzz suite
    #[arg(long)]
    pub cases: Option<usize>,
    /// Run a single fuzz suite
    #[arg(long)]
    pub suite: Option<String>,
    /// For `catalogue`: recompute derived entries and compare them with the frozen ones
    #[arg(long)]
    pub derive: bool,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s)
}

impl Flags {
    pub fn tolerance(&self) -> Result<Tolerance, Error> {
        let tol = Tolerance::default();
        Ok(match self.tol {
            Some(t) => tol.with_identity_check(t)?,
            None => tol,
        })
    }

    pub fn cap(&self) -> usize {
        self.max_dim.unwrap_or(DEFAULT_KRONECKER_CAP)
    }

    /// Stable text form of every flag that can change a report.
    fn canonical(&self) -> String {
        format!(
            "tol={:?};seed={:?};oracle_cutoff={:?};max_dim={:?};cases={:?};suite={:?};derive={}",
            self.tol,
            self.seed,
            self.oracle_cutoff.as_ref().map(rational::format),
            self.max_dim,
            self.cases,
            self.suite,
            self.derive
        )
    }
}

/// Runs one command and returns its report.
pub fn run(cli: &Cli) -> Result<Report, Error> {
    let flags = &cli.flags;
    let (outcome, text) = match cli.command {
        Command::Fuzz => (fuzz::run(flags)?, String::new()),
        Command::Catalogue => (commands::catalogue(flags)?, String::new()),
        command => {
            let path = cli
                .scenario
                .as_ref()
                .ok_or_else(|| Error::Usage(format!("`{}` needs a scenario file", command.name())))?;
            let (scenario, text) = Scenario::load(path)?;
            (commands::dispatch(command, &scenario, flags)?, text)
        }
    };
    Ok(Report {
        command: cli.command.name().to_string(),
        inputs_digest: report::digest(cli.command.name(), &flags.canonical(), &text),
        results: outcome.results,
        pass: outcome.pass,
        series: outcome.series,
    })
}
