use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "vmvt", version, about = "Exact counts and inequality checks for the cubic Vinogradov system")]
pub struct Cli {
    /// JSON-lines count cache (created if missing).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Engine used for unrestricted counts (see `vmvt engines`).
    #[arg(long, global = true, default_value = "partitioned")]
    pub engine: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a single count through the cache.
    #[command(subcommand)]
    Count(CountCmd),
    /// Run the lemma sweep and write CSV/JSON reports.
    Verify(VerifyArgs),
    /// Exact exponent-recursion algebra, printed as JSON.
    Recursion(RecursionArgs),
    /// J(X) and its effective exponent over a list of X values.
    Trend(TrendArgs),
    /// List registered counting engines.
    Engines,
}

#[derive(Debug, Subcommand)]
pub enum CountCmd {
    /// J_{s,k}(X).
    J {
        #[arg(long, default_value_t = 6)]
        s: u32,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long)]
        x: String,
    },
    /// I_m(X;ξ,η;a,b), or the max form I_m(X;a,b) when --xi/--eta are omitted.
    I {
        #[arg(long, default_value_t = 6)]
        s: u32,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long)]
        x: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, requires = "eta")]
        xi: Option<u64>,
        #[arg(long, requires = "xi")]
        eta: Option<u64>,
    },
    /// N(p;a,c) for one ν, or the max over units ν when --nu is omitted.
    N {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        nu: Option<i64>,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        c: u32,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Sweep configuration (JSON). Command-line grid options override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Lemma ids, e.g. `1,3,8`.
    #[arg(long, value_delimiter = ',')]
    pub lemmas: Option<Vec<u8>>,
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    /// X values: integers or `num/den`.
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<String>>,
    /// (a,b) pairs written `a:b`.
    #[arg(long, value_delimiter = ',')]
    pub pairs: Option<Vec<String>>,
    /// Modulus exponents c for the congruence-count checks.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<u32>>,
    /// Directory for report.csv, report.json and manifest.json.
    #[arg(long, default_value = "reports")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RecursionArgs {
    /// Growth exponent θ (rational).
    #[arg(long, default_value = "6", allow_hyphen_values = true)]
    pub theta: String,
    /// Partial sum (α_n, β_n) = c + Mc + … + M^n c.
    #[arg(long)]
    pub n: Option<u64>,
    /// Eigendecomposition of M.
    #[arg(long)]
    pub eigen: bool,
    /// Induction exponent and step check: n Δ a b.
    #[arg(long, num_args = 4, value_names = ["N", "DELTA", "A", "B"], allow_hyphen_values = true)]
    pub induction: Option<Vec<String>>,
    /// Smallest n with nΔ ≥ 39.
    #[arg(long, value_name = "DELTA", allow_hyphen_values = true)]
    pub threshold: Option<String>,
    /// Prime window ½X^{1/3^n} ≤ p ≤ X^{1/3^n}: n X.
    #[arg(long, num_args = 2, value_names = ["N", "X"])]
    pub window: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct TrendArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub x: Vec<String>,
    #[arg(long, default_value_t = 6)]
    pub s: u32,
    #[arg(long, default_value_t = 3)]
    pub k: u32,
}
