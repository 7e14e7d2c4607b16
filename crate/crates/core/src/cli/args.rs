use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Debug, Parser)]
#[command(name = "optophase", version, about = "Optical phase and interferometric visibility of an optomechanical cavity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optical phase sweeps.
    Phase {
        #[command(subcommand)]
        regime: PhaseRegime,
    },
    /// Visibility versus interaction time.
    Visibility(VisibilityArgs),
    /// Run the oracle-versus-closed-form suites and print a JSON report.
    Check(CheckArgs),
}

#[derive(Debug, Subcommand)]
pub enum PhaseRegime {
    /// N-kick pulse sequences, swept over one of N_p, lambda or N.
    Pulsed(PulsedArgs),
    /// Continuous interaction, swept over time.
    Continuous(ContinuousArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepAxis {
    Np,
    Lambda,
    Nkicks,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// System description file (`key = value` lines).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Time span in mechanical periods.
    #[arg(long)]
    pub periods: Option<f64>,
    /// Monte Carlo samples.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, env = "OPTOPHASE_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Continuous coupling k (rescales omega_f).
    #[arg(long)]
    pub k: Option<f64>,
    /// Photon number N_p.
    #[arg(long)]
    pub np: Option<f64>,
    /// Mirror temperature (K).
    #[arg(long = "temp-kelvin")]
    pub temp_kelvin: Option<f64>,
    /// Number of kicks N.
    #[arg(long)]
    pub nkicks: Option<u32>,
    /// Pulsed coupling lambda (rescales kappa).
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct PulsedArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "np")]
    pub axis: SweepAxis,
    /// Lower end of the sweep axis.
    #[arg(long)]
    pub min: Option<f64>,
    /// Upper end of the sweep axis.
    #[arg(long)]
    pub max: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ContinuousArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Real part of the initial mirror coherent amplitude.
    #[arg(long = "gamma-re", default_value_t = 0.0, allow_hyphen_values = true)]
    pub gamma_re: f64,
    /// Imaginary part of the initial mirror coherent amplitude.
    #[arg(long = "gamma-im", default_value_t = 0.0, allow_hyphen_values = true)]
    pub gamma_im: f64,
    /// Also report the N-step Trotter approximation of the closed loop.
    #[arg(long = "trotter-steps")]
    pub trotter_steps: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct VisibilityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Preset: T in {1e-5, 1e-2, 1} K, k = 1e-2, N_p = 1e5, tau = 1e-5 s.
    #[arg(long, conflicts_with = "fig2c")]
    pub fig2b: bool,
    /// Preset: T = 5e-2 K, k = 1e-2, N_p = 1e5, tau = 1e-5 s.
    #[arg(long)]
    pub fig2c: bool,
    /// Relative variance of the classical field energy (default 1/N_p).
    #[arg(long = "delta-sq")]
    pub delta_sq: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Run only this suite.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long, env = "OPTOPHASE_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Override every selected suite's tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Monte Carlo samples per grid point.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// List suite names and exit.
    #[arg(long)]
    pub list: bool,
}
