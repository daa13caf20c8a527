use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "pickdecomp", version, about = "Decompositions of the polydisk Pick kernel for rational inner functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Numerical stability test on the closed polydisk.
    Stability(IoArgs),
    /// Moment table of |p|^-2 dσ over [-R, R]^d with R = max(N) - 1.
    Moments(RunArgs),
    /// Residual ladder of P - K_S^N - L_T^N.
    Decompose(RunArgs),
    /// Full certificate suite.
    Certify(RunArgs),
    /// Residual and contractivity diagnostics along the truncation ladder.
    Sweep(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct IoArgs {
    /// Polynomial JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// FFT grid per circle (power of two).
    #[arg(long = "M")]
    pub grid: Option<usize>,
    /// Truncation ladder, strictly increasing.
    #[arg(long = "N", value_delimiter = ',', default_value = "4,8,16")]
    pub ladder: Vec<usize>,
    /// One-based variables forming S.
    #[arg(long = "S", value_delimiter = ',')]
    pub s: Option<Vec<usize>>,
    /// One-based GKVW index j.
    #[arg(long)]
    pub j: Option<usize>,
    /// One-based GKVW index k.
    #[arg(long)]
    pub k: Option<usize>,
    /// Sample points as MODE:COUNT:RADIUS:SEED.
    #[arg(long, default_value = "random:12:0.6:42")]
    pub points: PointSpec,
    #[arg(long = "tol-psd", default_value_t = 1e-6)]
    pub tol_psd: f64,
    #[arg(long = "tol-identity", default_value_t = 1e-5)]
    pub tol_identity: f64,
    /// Bound on the M-vs-2M moment change.
    #[arg(long = "tol-moment", default_value_t = 1e-10)]
    pub tol_moment: f64,
    /// Skip the moment cache entirely.
    #[arg(long = "no-cache")]
    pub no_cache: bool,
    /// Cache location; defaults to a directory under the system temp dir.
    #[arg(long = "cache-dir")]
    pub cache_dir: Option<PathBuf>,
    /// Directory receiving one CSV file per sampled kernel.
    #[arg(long = "csv-kernels")]
    pub csv_kernels: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSpec {
    pub count: usize,
    pub radius: f64,
    pub seed: u64,
}

impl FromStr for PointSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [mode, count, radius, seed] = parts[..] else {
            return Err(format!("expected MODE:COUNT:RADIUS:SEED, got {s:?}"));
        };
        if mode != "random" {
            return Err(format!("unsupported point mode {mode:?} (only \"random\")"));
        }
        let count: usize = count.parse().map_err(|e| format!("count: {e}"))?;
        let radius: f64 = radius.parse().map_err(|e| format!("radius: {e}"))?;
        let seed: u64 = seed.parse().map_err(|e| format!("seed: {e}"))?;
        if count == 0 {
            return Err("count must be positive".into());
        }
        if !(radius > 0.0 && radius < 1.0) {
            return Err(format!("radius {radius} must lie in (0, 1)"));
        }
        Ok(PointSpec { count, radius, seed })
    }
}
