use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable read when `--threads` is absent.
pub const THREADS_ENV: &str = "BELLKIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "bellkit", version, about = "Two-setting many-qubit Bell inequalities")]
pub struct Cli {
    /// Worker threads for parallel sections; defaults to one per core.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum value of a named state against the local bound.
    Violation(ViolationArgs),
    /// MABK closed form and matrix value for generalized GHZ states over alpha in [0, pi/2].
    SweepAlpha(SweepArgs),
    /// Exhaustive local-hidden-variable bound.
    LhvBound(LhvArgs),
    /// Largest |eigenvalue| of the operator at canonical settings.
    MaxEig(MaxEigArgs),
    /// Threshold visibilities for noisy GHZ states.
    Visibility(VisibilityArgs),
    /// Correlation-term expansion of the operator.
    Terms(TermsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Sign function of the inner operator: `mabk` or a path to a file of `±1` entries.
#[derive(Clone, Debug, PartialEq)]
pub enum SignSource {
    Mabk,
    File(PathBuf),
}

impl FromStr for SignSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("mabk") {
            Ok(SignSource::Mabk)
        } else if s.is_empty() {
            Err("empty sign-table argument".into())
        } else {
            Ok(SignSource::File(PathBuf::from(s)))
        }
    }
}

#[derive(Debug, Args)]
pub struct OperatorArgs {
    /// Number of qubits (parties).
    #[arg(long)]
    pub n: usize,
    /// `mabk` or a file with 2^(n-1) whitespace-separated +1/-1 entries.
    #[arg(long = "sign-table", default_value = "mabk")]
    pub sign_table: SignSource,
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 32)]
    pub starts: usize,
    #[arg(long = "max-iterations", default_value_t = 2000)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ViolationArgs {
    /// ghz, gghz, w, cluster4 or noisy-ghz; parameters may be inline, e.g. `gghz(0.3)`.
    #[arg(long)]
    pub state: String,
    /// Number of qubits; defaults to 4 for cluster4.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub visibility: Option<f64>,
    #[arg(long = "sign-table", default_value = "mabk")]
    pub sign_table: SignSource,
    /// Search settings numerically instead of using the canonical ones.
    #[arg(long)]
    pub optimize: bool,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,
    /// Number of alpha samples, endpoints included.
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct LhvArgs {
    #[command(flatten)]
    pub operator: OperatorArgs,
    /// Split the enumeration into independent shards (needed above 8 parties).
    #[arg(long)]
    pub sharded: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct MaxEigArgs {
    #[command(flatten)]
    pub operator: OperatorArgs,
    /// Generalized-GHZ angle selecting the canonical settings.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VisibilityArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TermsArgs {
    #[command(flatten)]
    pub operator: OperatorArgs,
    /// Dump the inner (n-1)-party operator instead of the extended one.
    #[arg(long)]
    pub inner: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}
