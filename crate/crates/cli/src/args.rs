use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use obraid::transfer::DEFAULT_CAP;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "obraid",
    version,
    about = "Braid-matrix, transfer-matrix and chain-Hamiltonian checks for the o_N models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run numerical and exact checks; exit 1 if any fails.
    Verify(VerifyArgs),
    /// Symmetry-reduced spectra as polynomials in K.
    Spectrum(SpectrumArgs),
    /// Chain Hamiltonian spectrum, cross-checks and selection-rule audit.
    Hamiltonian(HamiltonianArgs),
    /// Weight-subspace dimensions and cyclic orbit census.
    Dims(DimsArgs),
    /// Inverse Cayley transform `-iV = (R - lambda I)^-1 (R + lambda I)`.
    Cayley(CayleyArgs),
    /// Everything above in one document, with the closed-form comparison.
    Report(ReportArgs),
}

/// Model selection shared by every subcommand.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Model {
    /// Number of single-site states.
    #[arg(long = "N", default_value_t = 3)]
    #[serde(rename = "N")]
    pub n_states: usize,
    /// Chain lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub r: Vec<usize>,
    /// Deformation parameters, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub q: Vec<f64>,
    /// Largest admissible state-space dimension `N^r`.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Output {
    /// Write the JSON document here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub json: Option<PathBuf>,
    /// Write a CSV table here.
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    /// Include wall-clock timings (makes output non-reproducible).
    #[arg(long)]
    #[serde(skip)]
    pub timings: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Tolerances {
    #[arg(long = "tol-ybe", default_value_t = 1e-10)]
    pub ybe: f64,
    #[arg(long = "tol-commute", default_value_t = 1e-9)]
    pub commute: f64,
    #[arg(long = "tol-eig", default_value_t = 1e-8)]
    pub eig: f64,
    #[arg(long = "tol-rtt", default_value_t = 1e-10)]
    pub rtt: f64,
    #[arg(long = "tol-cayley", default_value_t = 1e-10)]
    pub cayley: f64,
    #[arg(long = "tol-h", default_value_t = 1e-10)]
    pub hamiltonian: f64,
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), String> {
        let all = [
            ("tol-ybe", self.ybe),
            ("tol-commute", self.commute),
            ("tol-eig", self.eig),
            ("tol-rtt", self.rtt),
            ("tol-cayley", self.cayley),
            ("tol-h", self.hamiltonian),
        ];
        match all.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            Some((name, v)) => Err(format!("--{name} must be positive, got {v}")),
            None => Ok(()),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Spectral {
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long = "theta-p", default_value_t = -0.2, allow_hyphen_values = true)]
    pub theta_p: f64,
    /// Points per axis of the `(theta, theta')` grid on [-0.4, 0.4].
    #[arg(long, default_value_t = 4)]
    pub grid: usize,
    /// Extra `(theta, theta')` samples drawn from the seeded generator.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Ybe,
    Trace,
    Commute,
    Rtt,
    Cayley,
    Hamiltonian,
    Oracle,
    All,
}

impl Check {
    /// What `all` (and `--all`) expands to.
    pub const SUITE: [Check; 5] = [
        Check::Ybe,
        Check::Trace,
        Check::Commute,
        Check::Rtt,
        Check::Cayley,
    ];
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    pub check: Option<Check>,
    /// Same as `verify all`.
    #[arg(long)]
    pub all: bool,
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub spectral: Spectral,
    /// Single spectral parameter for the Cayley check, e.g. `0.3+0.8i`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[command(flatten)]
    pub tol: Tolerances,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: Model,
    /// Restrict to one weight subspace.
    #[arg(long)]
    pub n: Option<usize>,
    /// Restrict to one root of unity (`k/m`, `1`, `-1`, `i`, `-i`).
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,
    /// Dump `T` as sparse triplets (`row col poly`, 0-based) to this file.
    #[arg(long = "dump-t")]
    pub dump_t: Option<PathBuf>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug, Clone)]
pub struct HamiltonianArgs {
    #[command(flatten)]
    pub model: Model,
    /// Also build the finite-difference variant with this step.
    #[arg(long)]
    pub fd: Option<f64>,
    #[arg(long = "tol-h", default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug, Clone)]
pub struct DimsArgs {
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug, Clone)]
pub struct CayleyArgs {
    #[arg(long = "N", default_value_t = 3)]
    pub n_states: usize,
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    /// Write the `V` components as CSV (a,b,c,d,re,im).
    #[arg(long = "emit-v")]
    pub emit_v: Option<PathBuf>,
    #[arg(long = "tol-cayley", default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug, Clone)]
pub struct ReportArgs {
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub spectral: Spectral,
    #[command(flatten)]
    pub tol: Tolerances,
    #[command(flatten)]
    pub out: Output,
}
