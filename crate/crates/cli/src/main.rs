use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kissbound_core::constructor::DEFAULT_ENUMERATION_CAP;
use kissbound_core::pnorm::{self, DEFAULT_MAX_BITS};

mod commands;
mod output;
mod ranges;

use output::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "kissbound",
    version,
    about = "Lower bounds for kissing numbers of lp-spheres"
)]
struct Cli {
    /// Output format; `curve` and `sweep` default to csv, everything else to text.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the report to PATH instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Ceiling, in bits, for certified comparisons against 2^p.
    #[arg(
        long,
        global = true,
        env = "KISSBOUND_MAX_PRECISION_BITS",
        default_value_t = DEFAULT_MAX_BITS
    )]
    max_precision_bits: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact multi-shell bound for one dimension.
    Bound(BoundArgs),
    /// Exponent of the bound as n grows.
    Exponent(ExponentArgs),
    /// Samples of the exponent curve g_p(sigma).
    Curve(CurveArgs),
    /// Build a code greedily and write its certificate.
    Construct(ConstructArgs),
    /// Re-check a certificate file.
    Verify(VerifyArgs),
    /// Compare against the bound derived from Euclidean spherical codes.
    Compare(CompareArgs),
    /// Evaluate one quantity over a range of p or n.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: u64,
    /// A weight, `n`, or `sweep` for the best weight.
    #[arg(long, default_value = "sweep", value_parser = ranges::parse_weight)]
    pub m: ranges::Weight,
    /// Use the m = n construction with a binary first shell.
    #[arg(long)]
    pub large_p: bool,
    /// Apply the logarithmic factor for binary codes (constant set to 1).
    #[arg(long, requires = "large_p")]
    pub jv_factor: bool,
    /// Restrict the weight sweep to `a:b`.
    #[arg(long, value_parser = ranges::parse_window)]
    pub window: Option<(u64, u64)>,
}

#[derive(Args, Debug)]
pub struct ExponentArgs {
    #[arg(long, required_unless_present = "onset")]
    pub p: Option<f64>,
    /// Exponents of the m = n construction.
    #[arg(long, conflicts_with_all = ["sigma", "onset"])]
    pub large_p: bool,
    /// Per-shell exponents at this sigma instead of the maximizer.
    #[arg(long, conflicts_with = "onset")]
    pub sigma: Option<f64>,
    /// Smallest p in [LO, HI] whose maximizer lies within --margin of 1.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], conflicts_with = "p")]
    pub onset: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-2)]
    pub margin: f64,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0.001)]
    pub step: f64,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub m: u64,
    /// Largest shell that may be enumerated.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
    /// Where to write the certificate.
    #[arg(long, value_name = "PATH")]
    pub cert: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub certificate: PathBuf,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long, required_unless_present = "crossover")]
    pub p: Option<f64>,
    /// Also compare the finite-n bounds at this dimension.
    #[arg(long, requires = "p")]
    pub n: Option<u64>,
    /// Bisect for the crossover on [LO, HI].
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], conflicts_with = "p")]
    pub crossover: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// `start:end:step` over p.
    #[arg(long, value_parser = ranges::parse_real_range, conflicts_with = "n_range")]
    pub p_range: Option<ranges::RealRange>,
    /// `start:end[:step]` over n (quantity `bound` only).
    #[arg(long, value_parser = ranges::parse_int_range, requires = "p")]
    pub n_range: Option<ranges::IntRange>,
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// Fixed p for an n-range sweep.
    #[arg(long)]
    pub p: Option<f64>,
    /// Fixed n for `--quantity bound` over p.
    #[arg(long)]
    pub n: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Gstar,
    SigmaStar,
    Leading,
    Euclid,
    Bound,
}

impl Quantity {
    pub fn column(self) -> &'static str {
        match self {
            Quantity::Gstar => "gstar",
            Quantity::SigmaStar => "sigma_star",
            Quantity::Leading => "leading",
            Quantity::Euclid => "euclid",
            Quantity::Bound => "bound",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    pnorm::set_default_max_bits(cli.max_precision_bits);
    if let Some(path) = &cli.out {
        output::check_writable(path)?;
    }
    let text = match &cli.command {
        Command::Bound(a) => commands::bound(a, cli.format.unwrap_or(Format::Text))?,
        Command::Exponent(a) => commands::exponent(a, cli.format.unwrap_or(Format::Text))?,
        Command::Curve(a) => commands::curve(a, cli.format.unwrap_or(Format::Csv))?,
        Command::Construct(a) => commands::construct(a, cli.format.unwrap_or(Format::Text))?,
        Command::Verify(a) => commands::verify(a, cli.format.unwrap_or(Format::Text))?,
        Command::Compare(a) => commands::compare(a, cli.format.unwrap_or(Format::Text))?,
        Command::Sweep(a) => commands::sweep(a, cli.format.unwrap_or(Format::Csv))?,
    };
    output::emit(cli.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
