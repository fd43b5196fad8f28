//! Command-line surface and the validated job description.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use specshift::{EngineChoice, TestFunction};

use crate::error::CliError;
use crate::spec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subcommand {
    /// Spectral shift function of a pair in the chosen engine
    Ssf,
    /// Signed eigenvalue crossings through `--lambda` along H0 + rV
    Flow,
    /// AC/SING parts of the averaging functional on labeled models
    Decompose,
    /// Built-in seeded invariant suite
    Verify,
    /// Counting, averaging and Krein values side by side on `--grid`
    CompareEngines,
}

impl Subcommand {
    pub fn as_str(&self) -> &'static str {
        match self {
            Subcommand::Ssf => "ssf",
            Subcommand::Flow => "flow",
            Subcommand::Decompose => "decompose",
            Subcommand::Verify => "verify",
            Subcommand::CompareEngines => "compare-engines",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Counting,
    Averaging,
    Krein,
}

impl From<EngineArg> for EngineChoice {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Counting => EngineChoice::Counting,
            EngineArg::Averaging => EngineChoice::Averaging,
            EngineArg::Krein => EngineChoice::Krein,
        }
    }
}

/// Spectral shift functions of finite self-adjoint pairs.
///
/// Operators are Matrix Market files; labeled models (`decompose`) are
/// manifests listing one `<file> label=AC|SING` block per line.
#[derive(Debug, Parser)]
#[command(name = "specshift", version)]
pub struct Cli {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// Unperturbed operator (manifest for `decompose`)
    #[arg(long)]
    h0: Option<PathBuf>,
    /// Perturbed operator; give either this or `--v`
    #[arg(long, conflicts_with = "v")]
    h1: Option<PathBuf>,
    /// Perturbation V = H1 − H0
    #[arg(long)]
    v: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "counting")]
    engine: EngineArg,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Test function `family:a:b:amplitude` (bump, cosine, spline, plateau)
    #[arg(long)]
    phi: Option<String>,
    /// Reference level for `flow`
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Evaluation grid `a:b:n`
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Largest sampling step in r for `flow`
    #[arg(long, default_value_t = 0.01)]
    max_step: f64,
    /// Output file; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub subcommand: Subcommand,
    pub h0: Option<PathBuf>,
    pub h1: Option<PathBuf>,
    pub v: Option<PathBuf>,
    pub engine: EngineChoice,
    pub tol: f64,
    pub seed: u64,
    pub phi: Option<TestFunction>,
    pub lambda: Option<f64>,
    pub grid: Option<Vec<f64>>,
    pub max_step: f64,
    pub out: Option<PathBuf>,
}

impl JobConfig {
    /// Defaults for `subcommand` with no inputs.
    pub fn new(subcommand: Subcommand) -> Self {
        Self {
            subcommand,
            h0: None,
            h1: None,
            v: None,
            engine: EngineChoice::Counting,
            tol: 1e-8,
            seed: 0,
            phi: None,
            lambda: None,
            grid: None,
            max_step: 0.01,
            out: None,
        }
    }

    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let phi = cli
            .phi
            .as_deref()
            .map(spec::parse_phi)
            .transpose()
            .map_err(CliError::Usage)?;
        let grid = cli
            .grid
            .as_deref()
            .map(spec::parse_grid)
            .transpose()
            .map_err(CliError::Usage)?;
        let config = Self {
            subcommand: cli.subcommand,
            h0: cli.h0,
            h1: cli.h1,
            v: cli.v,
            engine: cli.engine.into(),
            tol: cli.tol,
            seed: cli.seed,
            phi,
            lambda: cli.lambda,
            grid,
            max_step: cli.max_step,
            out: cli.out,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage(format!(
                "--tol must be positive, got {}",
                self.tol
            )));
        }
        if !(self.max_step > 0.0 && self.max_step <= 1.0) {
            return Err(CliError::Usage(format!(
                "--max-step must lie in (0, 1], got {}",
                self.max_step
            )));
        }
        let needs_pair = !matches!(self.subcommand, Subcommand::Verify);
        if needs_pair {
            if self.h0.is_none() {
                return Err(CliError::Usage(format!(
                    "{} needs --h0",
                    self.subcommand.as_str()
                )));
            }
            if self.h1.is_some() == self.v.is_some() {
                return Err(CliError::Usage(format!(
                    "{} needs exactly one of --h1, --v",
                    self.subcommand.as_str()
                )));
            }
        }
        let missing = |flag: &str| {
            Err(CliError::Usage(format!(
                "{} needs {flag}",
                self.subcommand.as_str()
            )))
        };
        match self.subcommand {
            Subcommand::Ssf => match self.engine {
                EngineChoice::Averaging if self.phi.is_none() => missing("--phi"),
                EngineChoice::Krein if self.grid.is_none() => missing("--grid"),
                _ => Ok(()),
            },
            Subcommand::Flow if self.lambda.is_none() => missing("--lambda"),
            Subcommand::Decompose if self.phi.is_none() => missing("--phi"),
            Subcommand::CompareEngines if self.grid.is_none() => missing("--grid"),
            _ => Ok(()),
        }
    }
}
