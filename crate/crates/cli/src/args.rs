use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "trapfpt", version, about = "First-passage times of a harmonically trapped particle to an absorbing sphere")]
pub struct Cli {
    /// Directory for cached eigen-systems.
    #[arg(long, global = true, env = "TRAPFPT_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Ignore the cache entirely.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues, normalisations and amplitudes.
    Eigen(EigenArgs),
    /// Survival probability curves over t/τ.
    Survival(CurveArgs),
    /// First-passage density curves over t/τ.
    Fpt(CurveArgs),
    /// Mean first-passage time over starting points.
    Mfpt(MfptArgs),
    /// Monte Carlo first-passage times, optionally compared with the series.
    Simulate(SimulateArgs),
    /// Slowest-mode amplitude against the free escape probability.
    Escape(EscapeArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

/// Physical trap parameters; an alternative to --kappa/--z.
#[derive(Debug, Clone, Args)]
pub struct Physical {
    /// Spring constant, fN/nm.
    #[arg(long = "k-fn-per-nm")]
    pub k: Option<f64>,
    /// Friction coefficient, nN·µs/nm.
    #[arg(long = "zeta-nn-us-per-nm")]
    pub zeta: Option<f64>,
    /// Diffusivity, nm²/µs; the Einstein value k_B T/ζ when omitted.
    #[arg(long = "d-nm2-per-us")]
    pub d: Option<f64>,
    /// Temperature, K.
    #[arg(long, default_value_t = 300.0)]
    pub temperature: f64,
    /// Contact radius, nm.
    #[arg(long = "l-nm")]
    pub l: Option<f64>,
    /// Initial separation, nm.
    #[arg(long = "r0-nm")]
    pub r0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, default_value_t = 25)]
    pub count: usize,
    #[arg(long, default_value_t = trapfpt::spectral::DEFAULT_ROOT_TOL)]
    pub root_tol: f64,
    #[arg(long, default_value_t = trapfpt::spectral::DEFAULT_QUAD_TOL)]
    pub quad_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub physical: Physical,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// One or more κ values (list or range).
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<String>,
    /// One or more starting points z = r₀/L (list or range).
    #[arg(long)]
    pub z: Option<String>,
    #[arg(long, default_value_t = 6.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 121)]
    pub points: usize,
    /// Series terms; 25 for survival and 50 for densities when omitted.
    #[arg(long)]
    pub terms: Option<usize>,
    /// Keep density rows before the early-time cutoff.
    #[arg(long)]
    pub keep_early: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub physical: Physical,
}

#[derive(Debug, Args)]
pub struct MfptArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<String>,
    #[arg(long, default_value = "1..20")]
    pub z: String,
    #[arg(long, default_value_t = 25)]
    pub terms: usize,
    /// Add columns from the independent double integral.
    #[arg(long)]
    pub with_integral: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub physical: Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Capture {
    Bridge,
    Endpoint,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub z: Option<f64>,
    /// Step in units of τ.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Horizon in units of τ.
    #[arg(long, default_value_t = 5.0)]
    pub horizon: f64,
    /// Number of trajectories.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Capture::Bridge)]
    pub capture: Capture,
    /// Points on the empirical survival grid.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Compare with the series and report the largest gap.
    #[arg(long)]
    pub compare: bool,
    #[arg(long, default_value = "0.5,1,2,4")]
    pub compare_times: String,
    #[arg(long, default_value_t = 0.01)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 25)]
    pub terms: usize,
    /// Empirical survival CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Raw per-trajectory CSV.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// JSON report; stderr when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub physical: Physical,
}

#[derive(Debug, Args)]
pub struct EscapeArgs {
    #[arg(long, default_value = "0.012,0.003,0.0012,0.00012")]
    pub kappa: String,
    #[arg(long, default_value = "1..20:0.5")]
    pub z: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Criterion numbers to run; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
    /// Also write the outcomes as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}
