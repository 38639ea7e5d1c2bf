use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hardcore::cod::{DEFAULT_CEILING, DEFAULT_TRIALS};
use hardcore::dcftp::{DEFAULT_INITIAL_HORIZON, DEFAULT_MAX_DOUBLINGS};
use hardcore::poisson::DEFAULT_MAX_ATTEMPTS;
use hardcore::{Error, Result, Window};

#[derive(Debug, Parser)]
#[command(name = "hardcore", version, about = "Perfect sampling and clan-of-descendants experiments for the hard-core gas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one hard-core configuration on a window.
    Sample(SampleArgs),
    /// Estimate the clan extinction probability at one intensity.
    Extinction(ExtinctionArgs),
    /// Estimate extinction probabilities over a grid of intensities.
    Sweep(SweepArgs),
    /// Run the numerical checks of the running-time bound.
    Verify(VerifyArgs),
    /// Print the intensity thresholds and the expected clan event bound.
    Bound(BoundArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sampler {
    Dcftp,
    Rejection,
    Bdchain,
}

impl Sampler {
    pub fn name(&self) -> &'static str {
        match self {
            Sampler::Dcftp => "dcftp",
            Sampler::Rejection => "rejection",
            Sampler::Bdchain => "bdchain",
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Base random seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Window as x0,x1,y0,y1.
    #[arg(long, value_parser = parse_window)]
    pub window: Window,
    #[arg(long, value_enum, default_value_t = Sampler::Dcftp)]
    pub sampler: Sampler,
    /// Points CSV; metadata goes next to it with extension `.meta.json`.
    /// Without it the CSV goes to stdout and the metadata to stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rejection sampler attempt budget.
    #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
    pub max_attempts: u64,
    /// Initial dominated CFTP horizon.
    #[arg(long, default_value_t = DEFAULT_INITIAL_HORIZON)]
    pub t0: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_DOUBLINGS)]
    pub max_doublings: u32,
    /// Birth-death chain run length, starting from the empty configuration.
    #[arg(long, default_value_t = 100.0)]
    pub t_end: f64,
    /// Birth-death chain event log (CSV).
    #[arg(long)]
    pub events: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ExtinctionArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_CEILING)]
    pub ceiling: usize,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Intensity grid as start:step:count.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Grid,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_CEILING)]
    pub ceiling: usize,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Report CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
}

/// Parsed `start:step:count` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub spec: String,
    pub values: Vec<f64>,
}

pub fn parse_window(s: &str) -> std::result::Result<Window, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| format!("window must be x0,x1,y0,y1: {e}"))?;
    if parts.len() != 4 {
        return Err(format!("window must have 4 numbers, got {}", parts.len()));
    }
    Window::new(parts[0], parts[1], parts[2], parts[3]).map_err(|e| e.to_string())
}

pub fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid must be start:step:count, got {s:?}"));
    }
    let start: f64 = parts[0].trim().parse().map_err(|e| format!("grid start: {e}"))?;
    let step: f64 = parts[1].trim().parse().map_err(|e| format!("grid step: {e}"))?;
    let count: usize = parts[2].trim().parse().map_err(|e| format!("grid count: {e}"))?;
    let values = (0..count)
        .map(|i| round_grid(start + i as f64 * step))
        .collect();
    Ok(Grid {
        spec: s.to_string(),
        values,
    })
}

// Keeps 0.55 + 3 * 0.005 printing as 0.565.
fn round_grid(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

pub fn validate_threads(threads: Option<usize>) -> Result<()> {
    match threads {
        Some(0) => Err(Error::InvalidParameter("--threads must be at least 1".into())),
        _ => Ok(()),
    }
}
