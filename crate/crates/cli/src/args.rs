use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "trigbf", version, about = "Constant-time bilateral filtering with raised-cosine range kernels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Filter a PGM/PPM image.
    Filter(FilterArgs),
    /// Compare the fast engines against the direct oracle.
    Compare(CompareArgs),
    /// Time the engines over a grid of sigmas and print CSV.
    Bench(BenchArgs),
    /// Write range-kernel curves as CSV.
    Kernel(KernelArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Direct,
    Trig,
    Poly,
}

impl EngineChoice {
    pub fn name(self) -> &'static str {
        match self {
            EngineChoice::Direct => "direct",
            EngineChoice::Trig => "trig",
            EngineChoice::Poly => "poly",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpatialChoice {
    Box,
    GaussRecursive,
    GaussFir,
}

/// Range and kernel options shared by every subcommand that filters.
#[derive(Debug, Clone, Args)]
pub struct KernelOpts {
    /// Range bound T; samples must lie in [0, T].
    #[arg(long, default_value_t = 255.0, value_parser = positive)]
    pub range_max: f64,
    /// Raised-cosine degree N (default: chosen from sigma_r).
    #[arg(long)]
    pub degree: Option<usize>,
    /// Number of Taylor terms for the polynomial engine
    /// (default: the raised cosine's distinct cosine terms).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub terms: Option<u64>,
    /// Spatial smoother; box radius is matched to sigma_s by variance.
    #[arg(long, value_enum)]
    pub spatial: Option<SpatialChoice>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Input PGM (P5) or PPM (P6) image.
    pub input: PathBuf,
    /// Where to write the filtered image.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Spatial Gaussian sigma in pixels.
    #[arg(long, value_parser = positive)]
    pub sigma_s: f64,
    /// Range Gaussian sigma in intensity units.
    #[arg(long, value_parser = positive)]
    pub sigma_r: f64,
    #[arg(long, value_enum, default_value_t = EngineChoice::Trig)]
    pub engine: EngineChoice,
    #[command(flatten)]
    pub kernel: KernelOpts,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Input PGM (P5) or PPM (P6) image.
    pub input: PathBuf,
    /// Spatial Gaussian sigma in pixels.
    #[arg(long, value_parser = positive)]
    pub sigma_s: f64,
    /// Range Gaussian sigma in intensity units.
    #[arg(long, value_parser = positive)]
    pub sigma_r: f64,
    #[command(flatten)]
    pub kernel: KernelOpts,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Image to time on; a 720x540 noise image is synthesized if absent.
    pub input: Option<PathBuf>,
    /// Restrict the grid to this spatial sigma.
    #[arg(long, value_parser = positive)]
    pub sigma_s: Option<f64>,
    /// Restrict the grid to this range sigma.
    #[arg(long, value_parser = positive)]
    pub sigma_r: Option<f64>,
    #[arg(long, value_enum, default_value_t = EngineChoice::Trig)]
    pub engine: EngineChoice,
    /// Timed runs per grid point; the median is reported.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub kernel: KernelOpts,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Target Gaussian sigma.
    #[arg(long, default_value_t = 80.0, value_parser = positive)]
    pub sigma_r: f64,
    /// Range bound T.
    #[arg(long, default_value_t = 255.0, value_parser = positive)]
    pub range_max: f64,
    /// Degree of the scaled raised cosine (default: chosen from sigma-r).
    #[arg(long)]
    pub degree: Option<usize>,
    /// Taylor terms for the polynomial curve.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub terms: u64,
    /// Grid points over [-T, T].
    #[arg(long, default_value_t = 511, value_parser = clap::value_parser!(u64).range(2..))]
    pub points: u64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be a positive number, got {s}"))
    }
}
