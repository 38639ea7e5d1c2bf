use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use hardcore::bdchain::{self, write_event_log, ChainState};
use hardcore::cod::{estimate_extinction, sweep, validate_grid, write_sweep_csv};
use hardcore::dcftp::sample_dcftp;
use hardcore::poisson::sample_hardcore_rejection;
use hardcore::theory::{critical_bound, event_bound, old_bound};
use hardcore::{Configuration, Error, ModelParams, RandomSource, Result, Window};
use serde::Serialize;

use crate::args::{BoundArgs, ExtinctionArgs, Sampler, SampleArgs, SweepArgs, VerifyArgs};
use crate::verify;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    CheckFailed = 1,
    BadParameters = 2,
    NonTermination = 3,
}

pub fn status_for(error: &Error) -> Status {
    match error {
        Error::InvalidParameter(_) => Status::BadParameters,
        Error::AttemptsExhausted { .. } | Error::CoalescenceFailure { .. } => Status::NonTermination,
        _ => Status::CheckFailed,
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn metadata_path(out: &Path) -> PathBuf {
    out.with_extension("meta.json")
}

/// Writes metadata next to `out`, or to stderr when writing to stdout.
fn write_metadata<T: Serialize>(out: Option<&Path>, meta: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(meta).map_err(|e| Error::Io(e.to_string()))?;
    match out {
        Some(p) => std::fs::write(metadata_path(p), text + "\n")?,
        None => eprintln!("{text}"),
    }
    Ok(())
}

fn params(lambda: f64, radius: f64) -> Result<ModelParams> {
    ModelParams::new(lambda, radius)
}

#[derive(Serialize)]
struct SampleMetadata {
    seed: u64,
    sampler: &'static str,
    lambda: f64,
    #[serde(rename = "R")]
    radius: f64,
    window: Window,
    points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    attempts: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon_used: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    doublings: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    event_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_end: Option<f64>,
}

pub fn write_points<W: Write>(config: &Configuration, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["x", "y"])?;
    for p in config.points() {
        writer.serialize((p.x, p.y))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn cmd_sample(args: &SampleArgs) -> Result<Status> {
    let params = params(args.lambda, args.radius)?;
    let mut rng = RandomSource::new(args.common.seed);
    let mut meta = SampleMetadata {
        seed: args.common.seed,
        sampler: args.sampler.name(),
        lambda: params.lambda,
        radius: params.radius,
        window: args.window,
        points: 0,
        attempts: None,
        horizon_used: None,
        doublings: None,
        event_count: None,
        t_end: None,
    };
    let config = match args.sampler {
        Sampler::Rejection => {
            let s = sample_hardcore_rejection(&args.window, &params, &mut rng, args.max_attempts)?;
            meta.attempts = Some(s.attempts);
            s.config
        }
        Sampler::Dcftp => {
            if !(args.t0 > 0.0 && args.t0.is_finite()) {
                return Err(Error::InvalidParameter(format!("--t0 must be positive, got {}", args.t0)));
            }
            let s = sample_dcftp(&args.window, &params, &mut rng, args.t0, args.max_doublings)?;
            meta.horizon_used = Some(s.horizon);
            meta.doublings = Some(s.doublings);
            meta.event_count = Some(s.event_count);
            s.config
        }
        Sampler::Bdchain => {
            if !(args.t_end >= 0.0 && args.t_end.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "--t-end must be non-negative, got {}",
                    args.t_end
                )));
            }
            let mut state = ChainState::empty();
            let events = bdchain::run(&mut state, args.t_end, &args.window, &params, &mut rng)?;
            if let Some(path) = &args.events {
                write_event_log(&events, BufWriter::new(File::create(path)?))?;
            }
            meta.event_count = Some(events.len());
            meta.t_end = Some(args.t_end);
            state.config
        }
    };
    meta.points = config.len();
    write_points(&config, output(args.out.as_deref())?)?;
    write_metadata(args.out.as_deref(), &meta)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct ExtinctionMetadata<'a> {
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<&'a str>,
    lambdas: Vec<f64>,
    #[serde(rename = "R")]
    radius: f64,
    trials: u64,
    ceiling: usize,
}

fn check_counts(trials: u64, ceiling: usize) -> Result<()> {
    if trials < 1 {
        return Err(Error::InvalidParameter("--trials must be at least 1".into()));
    }
    if ceiling < 2 {
        return Err(Error::InvalidParameter("--ceiling must be at least 2".into()));
    }
    Ok(())
}

pub fn cmd_extinction(args: &ExtinctionArgs) -> Result<Status> {
    let params = params(args.lambda, args.radius)?;
    check_counts(args.trials, args.ceiling)?;
    let row = estimate_extinction(&params, args.trials, args.ceiling, args.common.seed)?;
    write_sweep_csv(&[row], output(args.out.as_deref())?)?;
    write_metadata(
        args.out.as_deref(),
        &ExtinctionMetadata {
            seed: args.common.seed,
            grid: None,
            lambdas: vec![params.lambda],
            radius: params.radius,
            trials: args.trials,
            ceiling: args.ceiling,
        },
    )?;
    Ok(Status::Ok)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Status> {
    validate_grid(&args.grid.values)?;
    params(0.0, args.radius)?;
    check_counts(args.trials, args.ceiling)?;
    let rows = sweep(&args.grid.values, args.radius, args.trials, args.ceiling, args.common.seed)?;
    write_sweep_csv(&rows, output(args.out.as_deref())?)?;
    write_metadata(
        args.out.as_deref(),
        &ExtinctionMetadata {
            seed: args.common.seed,
            grid: Some(&args.grid.spec),
            lambdas: args.grid.values.clone(),
            radius: args.radius,
            trials: args.trials,
            ceiling: args.ceiling,
        },
    )?;
    Ok(Status::Ok)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Status> {
    let rows = verify::run_suite(args.common.seed)?;
    verify::write_report(&rows, output(args.out.as_deref())?)?;
    let failed: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.check_name.as_str()).collect();
    if failed.is_empty() {
        Ok(Status::Ok)
    } else {
        for name in &failed {
            eprintln!("check failed: {name}");
        }
        Ok(Status::CheckFailed)
    }
}

/// The `bound` output line.
pub fn bound_line(params: &ModelParams) -> Result<String> {
    let critical = critical_bound(params.radius)?;
    let old = old_bound(params.radius)?;
    let events = match event_bound(params) {
        Ok(b) => format!("{b:.4}"),
        Err(Error::SupercriticalLambda { .. }) => "SUPERCRITICAL".to_string(),
        Err(e) => return Err(e),
    };
    Ok(format!("critical={critical:.7} old={old:.7} event_bound={events}"))
}

pub fn cmd_bound(args: &BoundArgs) -> Result<Status> {
    let params = params(args.lambda, args.radius)?;
    println!("{}", bound_line(&params)?);
    Ok(Status::Ok)
}
