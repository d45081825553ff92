use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "rcf",
    version,
    about = "Random continued fractions with partial quotients in {0, alpha}"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads (0 = one per available core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified exponent brackets, Monte Carlo estimate and dimension bound over an alpha grid.
    Lyapunov(LyapunovArgs),
    /// Certify the interval containing the parameter where the exponent equals 1/2 log 2.
    Alphac(AlphacArgs),
    /// L^p exclusion thresholds alpha_p for tensor orders r.
    Lp(LpArgs),
    /// Histogram of draws from the stationary measure.
    Sample(SampleArgs),
    /// Tables of the transfer-operator iterates F_n.
    Cdf(CdfArgs),
    /// Solve the Galton-Watson conductance equation and report diagnostics.
    Gw(GwArgs),
    /// Resistance of shorted Galton-Watson trees.
    Shorted(ShortedArgs),
}

#[derive(Debug, Clone, Args)]
#[group(id = "alphas", required = true, multiple = false)]
pub struct AlphaSelect {
    /// A single parameter value.
    #[arg(long, group = "alphas")]
    pub alpha: Option<f64>,
    /// A grid `lo:hi:step`, both ends included.
    #[arg(long, group = "alphas", value_name = "LO:HI:STEP")]
    pub alpha_range: Option<String>,
}

#[derive(Debug, Args)]
pub struct LyapunovArgs {
    #[command(flatten)]
    pub alphas: AlphaSelect,
    /// Word length for the certified brackets.
    #[arg(long, default_value_t = 20)]
    pub depth: usize,
    /// Monte Carlo steps per trial (0 disables the Monte Carlo columns).
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Safety margin in nats added to each side of the bracket.
    #[arg(long, default_value_t = rcf_core::lyapunov::DEFAULT_MARGIN)]
    pub margin: f64,
}

#[derive(Debug, Args)]
pub struct AlphacArgs {
    /// Search interval `lo:hi`, inside (1/6, 1/2].
    #[arg(long, value_name = "LO:HI", default_value = "0.25:0.3")]
    pub interval: String,
    #[arg(long, default_value_t = 10)]
    pub start_depth: usize,
    #[arg(long, default_value_t = 2)]
    pub depth_step: usize,
    #[arg(long, default_value_t = rcf_core::cdf::DEFAULT_MAX_DEPTH)]
    pub max_depth: usize,
    #[arg(long, default_value_t = rcf_core::lyapunov::DEFAULT_MARGIN)]
    pub margin: f64,
    /// Stop bisecting once the certified interval is this narrow.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    /// Orders as a list and/or ranges, e.g. `2` or `1..16` or `1,2,8..10`.
    #[arg(long, value_name = "LIST", default_value = "1..16")]
    pub r: String,
    /// Bisection width on alpha.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Recompute the Perron root at alpha_p on the full 2^r-dimensional operator.
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub alpha: f64,
    /// Continued-fraction length per draw.
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CdfArgs {
    #[arg(long)]
    pub alpha: f64,
    /// Iterate depths, e.g. `1,2,4,8`.
    #[arg(long, value_name = "LIST", default_value = "1,2,4,8")]
    pub depths: String,
    /// Number of equal intervals on [0, M_alpha].
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct GwArgs {
    /// JSON array of `[k, p_k]` pairs; `p_1 = p_2 = 1/2` when omitted.
    #[arg(long)]
    pub offspring: Option<PathBuf>,
    /// Grid intervals on [0, 1].
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    /// Stop when sup |Phi(F) - F| drops below this.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Continued-fraction length for the self-consistency check.
    #[arg(long, default_value_t = 30)]
    pub depth: usize,
    /// Draws for the self-consistency check (0 skips it).
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rows in the emitted c.d.f. table.
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
}

#[derive(Debug, Args)]
pub struct ShortedArgs {
    #[arg(long)]
    pub offspring: Option<PathBuf>,
    /// Generations simulated per tree.
    #[arg(long, default_value_t = 40)]
    pub depth: usize,
    #[arg(long, default_value_t = 1_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
