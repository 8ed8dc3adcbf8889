//! `lattice-flow`: velocity tables, orbits, limit trajectories and discrete
//! flows for two-phase periodic lattices.

mod commands;
mod grid;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lattice_flow::{MediumSpec, Rational};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or an inconsistent manifest; exit code 2.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Run(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    /// Some validation suite failed; the report has been written.
    #[error("validation failed")]
    ValidationFailed,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<lattice_flow::Error> for CliError {
    fn from(e: lattice_flow::Error) -> Self {
        use lattice_flow::Error as E;
        match e {
            E::InvalidArgument(_) | E::Parse(_) => CliError::Usage(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    PerSide,
    Brute,
}

#[derive(Args, Debug, Clone)]
pub struct MediumArgs {
    /// Weak bond coefficient α, as p/q.
    #[arg(long, default_value = "1", value_parser = parse_rational)]
    pub alpha: Rational,
    /// Strong bond coefficient β > α, as p/q; needed when --n-beta > 0.
    #[arg(long, value_parser = parse_rational)]
    pub beta: Option<Rational>,
    #[arg(long, default_value_t = 1)]
    pub n_alpha: i64,
    /// Width of the strong inclusions; 0 gives the homogeneous medium.
    #[arg(long, default_value_t = 1)]
    pub n_beta: i64,
}

impl MediumArgs {
    pub fn spec(&self) -> CliResult<MediumSpec> {
        let beta = match (&self.beta, self.n_beta) {
            (Some(b), _) => b.clone(),
            (None, 0) => self.alpha.clone(),
            (None, _) => return Err(CliError::Usage("--beta is required when --n-beta > 0".into())),
        };
        Ok(MediumSpec::new(self.alpha.clone(), beta, self.n_alpha, self.n_beta)?)
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "lattice-flow", version, about = "Interface motion in periodic two-phase lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Effective velocity f(Y) over a grid of Y values.
    VelocityTable(commands::VelocityTableArgs),
    /// Orbit of the one-dimensional side motion from x0.
    Orbit(commands::OrbitArgs),
    /// Limit evolution of a rectangle's side lengths.
    Evolve(commands::EvolveArgs),
    /// Discrete flat flow of an α-type rectangle.
    Simulate(commands::SimulateArgs),
    /// Run self-check suites; exits with 1 if any fails.
    Validate(commands::ValidateArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::VelocityTable(a) => commands::velocity_table(&a),
        Command::Orbit(a) => commands::orbit(&a),
        Command::Evolve(a) => commands::evolve(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Validate(a) => commands::validate(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::ValidationFailed) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
