use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use haswme_core::spectral::DEFAULT_TOL_IMAG;
use haswme_core::{Orders, Variant};

#[derive(Debug, Parser)]
#[command(
    name = "haswme",
    version,
    about = "Axisymmetric shallow water moment equations: spectra, hyperbolicity maps and simulations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of the system matrix at a single state.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Eigen(EigenArgs),
    /// Hyperbolicity map over the (alpha_1, alpha_2) plane.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Region(RegionArgs),
    /// Run a scenario and write snapshots.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Error table against a refined surrogate reference.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Converge(ConvergeArgs),
}

impl Command {
    pub const NAMES: [&'static str; 4] = ["eigen", "region", "simulate", "converge"];

    pub fn common(&self) -> &Common {
        match self {
            Command::Eigen(a) => &a.common,
            Command::Region(a) => &a.common,
            Command::Simulate(a) => &a.common,
            Command::Converge(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// TOML file with one section per command; flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output directory [default: $HASWME_OUT_DIR, else the working directory].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

/// Comma-separated values given as one argument.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: std::fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|item| {
                let item = item.trim();
                item.parse::<T>().map_err(|e| format!("`{item}`: {e}"))
            })
            .collect::<Result<Vec<T>, String>>()
            .map(List)
    }
}

pub fn parse_orders(s: &str) -> Result<Orders, String> {
    let (nr, nt) = s
        .split_once(',')
        .ok_or_else(|| format!("expected NR,NT, got `{s}`"))?;
    let nr = nr.trim().parse().map_err(|e| format!("N_r `{nr}`: {e}"))?;
    let nt = nt
        .trim()
        .parse()
        .map_err(|e| format!("N_theta `{nt}`: {e}"))?;
    Ok(Orders::new(nr, nt))
}

pub fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: haswme_core::Error| e.to_string())
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    match List::<f64>::from_str(s)?.0.as_slice() {
        [lo, hi] => Ok((*lo, *hi)),
        _ => Err(format!("expected LO,HI, got `{s}`")),
    }
}

fn parse_variants(s: &str) -> Result<List<Variant>, String> {
    s.split(',')
        .map(|v| parse_variant(v.trim()))
        .collect::<Result<_, _>>()
        .map(List)
}

#[derive(Debug, Clone, Args)]
pub struct EigenArgs {
    /// Model variant: aswme or haswme.
    #[arg(long, default_value = "haswme", value_parser = parse_variant)]
    pub model: Variant,

    /// Moment orders as NR,NT.
    #[arg(long, default_value = "2,0", value_parser = parse_orders)]
    pub orders: Orders,

    #[arg(long, default_value_t = 1.0)]
    pub h: f64,

    #[arg(long, default_value_t = 1.0)]
    pub g: f64,

    /// Mean radial velocity.
    #[arg(long, default_value_t = 0.0)]
    pub vrm: f64,

    /// All radial moments alpha_1..alpha_NR; missing entries are zero.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<List<f64>>,

    /// Replaces alpha_1.
    #[arg(long)]
    pub alpha1: Option<f64>,

    /// Mean angular velocity.
    #[arg(long, default_value_t = 0.0)]
    pub vthm: f64,

    /// All angular moments gamma_1..gamma_NT; missing entries are zero.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<List<f64>>,

    /// Replaces gamma_1.
    #[arg(long)]
    pub gamma1: Option<f64>,

    /// Largest imaginary part, relative to max(1, |lambda|), still counted as real.
    #[arg(long, default_value_t = DEFAULT_TOL_IMAG)]
    pub tol_imag: f64,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    /// radial20, full22 or custom (uses --model and --orders).
    #[arg(long, default_value = "radial20")]
    pub system: String,

    #[arg(long, default_value = "aswme", value_parser = parse_variant)]
    pub model: Variant,

    #[arg(long, default_value = "2,0", value_parser = parse_orders)]
    pub orders: Orders,

    /// alpha_1 axis as LO,HI.
    #[arg(long, default_value = "-3,3", allow_hyphen_values = true, value_parser = parse_range)]
    pub alpha1_range: (f64, f64),

    /// alpha_2 axis as LO,HI.
    #[arg(long, default_value = "-3,3", allow_hyphen_values = true, value_parser = parse_range)]
    pub alpha2_range: (f64, f64),

    /// Grid points along alpha_1.
    #[arg(long, default_value_t = 601)]
    pub n_alpha1: usize,

    /// Grid points along alpha_2.
    #[arg(long, default_value_t = 601)]
    pub n_alpha2: usize,

    #[arg(long, default_value_t = DEFAULT_TOL_IMAG)]
    pub tol_imag: f64,

    #[command(flatten)]
    pub common: Common,
}

/// Solver and physics overrides shared by `simulate` and `converge`.
#[derive(Debug, Clone, Args)]
pub struct RunOverrides {
    /// Number of grid cells.
    #[arg(long)]
    pub cells: Option<usize>,

    #[arg(long)]
    pub t_end: Option<f64>,

    #[arg(long)]
    pub cfl: Option<f64>,

    #[arg(long)]
    pub g: Option<f64>,

    /// Kinematic viscosity.
    #[arg(long)]
    pub nu: Option<f64>,

    /// Slip length.
    #[arg(long)]
    pub slip: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// dam-break or smooth.
    #[arg(long, default_value = "dam-break")]
    pub scenario: String,

    #[arg(long, value_parser = parse_variant)]
    pub model: Option<Variant>,

    #[arg(long, value_parser = parse_orders)]
    pub orders: Option<Orders>,

    /// Extra output times, comma-separated.
    #[arg(long)]
    pub snapshots: Option<List<f64>>,

    #[command(flatten)]
    pub run: RunOverrides,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[arg(long, default_value = "smooth")]
    pub scenario: String,

    /// Model orders N, each run as (N, N).
    #[arg(long, default_value = "0,1,2,3,4")]
    pub orders: List<usize>,

    #[arg(long, default_value = "aswme,haswme", value_parser = parse_variants)]
    pub variants: List<Variant>,

    /// Reference orders as NR,NT.
    #[arg(long, default_value = "4,4", value_parser = parse_orders)]
    pub ref_orders: Orders,

    #[arg(long, default_value = "haswme", value_parser = parse_variant)]
    pub ref_model: Variant,

    /// Reference cell-count multiplier.
    #[arg(long, default_value_t = 4)]
    pub refinement: usize,

    #[command(flatten)]
    pub run: RunOverrides,

    #[command(flatten)]
    pub common: Common,
}
