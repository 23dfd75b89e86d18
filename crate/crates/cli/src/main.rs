//! `cohkit`: coherence from states or measured expectation values, figure
//! data and randomized verification campaigns.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 domain invariant
//! violated, 4 numerical failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cohkit::aklt::RdmForm;
use cohkit::dynamics::{DephaseMode, SqueezeBasis};
use cohkit::io::FileError;
use cohkit::{Error, Norm};

#[derive(Parser, Debug)]
#[command(name = "cohkit", version, about = "Coherence from measurement expectation values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coherence report for a state file or an expectation-data file.
    Coherence(CoherenceArgs),
    /// Regenerate the data behind one figure panel as CSV.
    Fig1(Fig1Args),
    /// Run randomized campaigns from a TOML config.
    Harness(HarnessArgs),
    /// Coherence of the generalized AKLT two-site state over a grid of g.
    Aklt(AkltArgs),
    /// Dephased two-axis squeezing trajectory.
    Squeeze(SqueezeArgs),
}

#[derive(Args, Debug, Clone)]
struct NormArgs {
    /// Defaults to schatten1 for complete bases and frobenius otherwise.
    #[arg(long)]
    norm: Option<Norm>,
    /// Accept Schatten-1 on a truncated basis (no lower-bound guarantee).
    #[arg(long)]
    approximate: bool,
}

#[derive(Args, Debug)]
pub struct CoherenceArgs {
    /// TOML state file.
    #[arg(long, conflicts_with = "expectations", required_unless_present = "expectations")]
    state: Option<PathBuf>,
    /// TOML expectation-data file; the basis is named inside the file.
    #[arg(long)]
    expectations: Option<PathBuf>,
    /// Basis tag: standard:D, pauli, gellmann:d, spin:n or prod(<tag>,<tag>).
    #[arg(long, conflicts_with = "expectations")]
    basis: Option<String>,
    #[command(flatten)]
    norm: NormArgs,
    /// Also write the report as a one-row CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Panel {
    A,
    B,
    C,
    D,
}

#[derive(Args, Debug)]
pub struct Fig1Args {
    #[arg(long, value_enum)]
    panel: Panel,
    /// Points on the mixing grid mu in [0, 1] (panels a, b).
    #[arg(long, default_value_t = 101)]
    mu_points: usize,
    /// Ensemble sizes (panel c).
    #[arg(long, value_delimiter = ',', default_values_t = [4, 8])]
    n: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    t_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 0.01)]
    sample_every: f64,
    #[command(flatten)]
    grid: GGrid,
    /// Output CSV, stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct GGrid {
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    g_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    g_max: f64,
    #[arg(long, default_value_t = 401)]
    g_points: usize,
    /// Site separations.
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 5])]
    r: Vec<u32>,
}

#[derive(Args, Debug)]
pub struct HarnessArgs {
    #[arg(long)]
    config: PathBuf,
    /// Scan CSV (`dim,trials,violations,frequency,mean_violation`), stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Channel-monotonicity CSV, stdout when omitted.
    #[arg(long)]
    c2b_out: Option<PathBuf>,
    /// Overrides the config seed; COHKIT_SEED is the last fallback.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct AkltArgs {
    #[command(flatten)]
    grid: GGrid,
    /// Explicit g values instead of the uniform grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    g: Vec<f64>,
    #[arg(long, default_value = "consistent")]
    form: RdmForm,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SqueezeArgs {
    /// Qubits per ensemble (1..=10).
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    t_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 0.01)]
    sample_every: f64,
    #[arg(long, default_value = "full")]
    basis: SqueezeBasis,
    #[arg(long, default_value = "both")]
    dephase: DephaseMode,
    #[command(flatten)]
    norm: NormArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(Error),
    Io(String),
}

impl CliError {
    pub fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Domain(e) if e.is_numerical() => 4,
            CliError::Domain(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Parse(m) => CliError::Usage(m),
            FileError::Domain(e) => CliError::Domain(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Coherence(a) => commands::coherence(a),
        Command::Fig1(a) => commands::fig1(a),
        Command::Harness(a) => commands::harness(a),
        Command::Aklt(a) => commands::aklt(a),
        Command::Squeeze(a) => commands::squeeze(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
