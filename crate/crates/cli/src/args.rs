//! Command-line flags.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "parity-qht",
    version,
    about = "Hypothesis testing between qubit states under parity-invariant measurements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic n-copy twirl of a pure state, checked against the dense twirl.
    Twirl(TwirlArgs),
    /// Minimal type-II error under parity-invariant tests.
    Beta(PairGridArgs),
    /// Hypothesis-testing relative entropy under parity-invariant tests.
    Dhe(PairGridArgs),
    /// Critical copy number of the zero type-II error test.
    CriticalN(CriticalArgs),
    /// Pure-vs-pure regime: case tag, restricted beta and critical copies.
    Theorem1(PairGridArgs),
    /// Pure state against the maximally mixed state, closed forms.
    Theorem3(Theorem3Args),
    /// Table over an (n, eps) grid, optionally for seeded random pure pairs.
    Sweep(SweepArgs),
    /// Symmetric error and Chernoff exponent of the raw n-copy states.
    Chernoff(ChernoffArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct NullArgs {
    /// Null state sqrt(p)|0> + sqrt(1-p)|1>.
    #[arg(long = "p", visible_alias = "null-p", value_name = "P")]
    pub p: Option<f64>,
    /// Null state is the basis state |0> or |1>.
    #[arg(long, value_name = "BIT", value_parser = clap::value_parser!(u8).range(0..=1))]
    pub null_basis: Option<u8>,
    /// Null state is the maximally mixed state.
    #[arg(long)]
    pub maxmixed_null: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AltArgs {
    /// Alternative state sqrt(q)|0> + e^{i phi} sqrt(1-q)|1>.
    #[arg(long = "q", visible_alias = "alt-q", value_name = "Q")]
    pub q: Option<f64>,
    /// Relative phase of the alternative: radians, `pi`, `pi/2`, `3pi/4`, ...
    #[arg(long, value_name = "ANGLE", value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Alternative state is the basis state |0> or |1>.
    #[arg(long, value_name = "BIT", value_parser = clap::value_parser!(u8).range(0..=1))]
    pub alt_basis: Option<u8>,
    /// Alternative state is the maximally mixed state.
    #[arg(long)]
    pub maxmixed_alt: bool,
}

#[derive(Debug, Clone, Args)]
pub struct NGrid {
    /// Number of copies.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: Option<u32>,
    /// Inclusive range of copy numbers, `A..B`.
    #[arg(long, value_name = "A..B", value_parser = parse_range, conflicts_with = "n")]
    pub n_range: Option<(u32, u32)>,
}

#[derive(Debug, Clone, Args)]
pub struct EpsGrid {
    /// Type-I error level.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Comma-separated type-I error levels.
    #[arg(long, value_delimiter = ',', conflicts_with = "eps")]
    pub eps_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Tolerance for snapping states onto the special cases.
    #[arg(long, default_value_t = parity_qht::parity::CLASSIFY_TOL)]
    pub classify_tol: f64,
    /// Largest accepted |analytic - oracle|.
    #[arg(long, default_value_t = 1e-8)]
    pub oracle_tol: f64,
    /// Skip the dense oracle.
    #[arg(long)]
    pub no_oracle: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TwirlArgs {
    /// The state sqrt(p)|0> + e^{i phi} sqrt(1-p)|1>.
    #[arg(long = "p", visible_alias = "null-p", value_name = "P")]
    pub p: f64,
    #[arg(long, value_name = "ANGLE", value_parser = parse_angle, allow_hyphen_values = true, default_value = "0")]
    pub phi: f64,
    #[command(flatten)]
    pub n: NGrid,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct PairGridArgs {
    #[command(flatten)]
    pub null: NullArgs,
    #[command(flatten)]
    pub alt: AltArgs,
    #[command(flatten)]
    pub n: NGrid,
    #[command(flatten)]
    pub eps: EpsGrid,
    /// Optimize over all tests on the raw (untwirled) states instead.
    #[arg(long)]
    pub unrestricted: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CriticalArgs {
    #[command(flatten)]
    pub null: NullArgs,
    #[command(flatten)]
    pub alt: AltArgs,
    #[command(flatten)]
    pub eps: EpsGrid,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Theorem3Args {
    /// Pure state sqrt(p)|0> + sqrt(1-p)|1> tested against I/2^n.
    #[arg(long = "p", visible_alias = "null-p", value_name = "P")]
    pub p: f64,
    #[command(flatten)]
    pub n: NGrid,
    #[command(flatten)]
    pub eps: EpsGrid,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub null: NullArgs,
    #[command(flatten)]
    pub alt: AltArgs,
    #[command(flatten)]
    pub n: NGrid,
    #[command(flatten)]
    pub eps: EpsGrid,
    /// Sweep this many seeded random pure pairs instead of the given states.
    #[arg(long, value_name = "K")]
    pub random_pairs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest allowed number of grid points.
    #[arg(long, default_value_t = 100_000)]
    pub max_grid: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ChernoffArgs {
    #[command(flatten)]
    pub null: NullArgs,
    #[command(flatten)]
    pub alt: AltArgs,
    /// Copy numbers for the symmetric error; defaults to 1.
    #[command(flatten)]
    pub n: NGrid,
    #[command(flatten)]
    pub common: Common,
}

/// Parses `pi`, `-pi/2`, `3pi/4`, `2*pi` or a decimal number of radians.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s
        .trim()
        .to_ascii_lowercase()
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    let bad = || format!("invalid angle `{s}`: use radians, `pi`, `pi/2`, `3pi/4`, ...");
    let Some(idx) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad()).and_then(|x| {
            if x.is_finite() {
                Ok(x)
            } else {
                Err(bad())
            }
        });
    };
    let (head, tail) = (&t[..idx], &t[idx + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let div = match tail {
        "" => 1.0,
        d => d
            .strip_prefix('/')
            .ok_or_else(bad)?
            .parse::<f64>()
            .map_err(|_| bad())?,
    };
    if div == 0.0 || !coef.is_finite() || !div.is_finite() {
        return Err(bad());
    }
    Ok(coef * PI / div)
}

/// Parses `A..B` (also `A..=B` or `A:B`) into an inclusive range.
pub fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let bad = || format!("invalid range `{s}`: expected A..B with 1 <= A <= B");
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .or_else(|| s.split_once(':'))
        .ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}
