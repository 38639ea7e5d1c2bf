//! Clan of descendants on the infinite plane.
//!
//! Starting from one ancestor, every point proposed within distance `R` of a
//! live clan member joins the clan, and each member dies at rate 1. Proposals
//! therefore arrive at rate `lambda * A(D)`, where `A(D)` is the area of the
//! union of `R`-disks about the live members, at locations uniform on that
//! union.
//!
//! The simulation draws candidates at the dominating rate
//! `lambda * pi R^2 * #D` by picking a member and a uniform point in its
//! disk, then keeps a candidate covered by `k` disks with probability `1/k`.
//! Discarded candidates are not clan events and are not counted.
//!
//! Whether a clan dies out is what decides if dominated CFTP terminates, so
//! extinction probabilities over a range of intensities locate the
//! artificial phase transition.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_nonnegative, check_positive, Error, Result};
use crate::geometry::{sample_point_near, Configuration, Point};
use crate::poisson::ModelParams;
use crate::rng::{mix_seed, RandomSource};
use crate::stats::{wilson_interval, Z_95};

pub const DEFAULT_CEILING: usize = 750;
pub const DEFAULT_TRIALS: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClanStatus {
    Running,
    Extinct,
    CeilingHit,
}

/// A birth or death that changed the clan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClanEvent {
    Birth(Point),
    Death(Point),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClanState {
    pub live: Configuration,
    pub event_count: u64,
    pub births: u64,
    pub deaths: u64,
    pub max_size: usize,
    pub status: ClanStatus,
}

impl ClanState {
    /// A clan made of a single ancestor.
    pub fn ancestor(at: Point) -> Self {
        Self::from_config(Configuration::from_points([at]))
    }

    /// A running clan with the given live members and no history.
    pub fn from_config(live: Configuration) -> Self {
        let status = if live.is_empty() {
            ClanStatus::Extinct
        } else {
            ClanStatus::Running
        };
        Self {
            max_size: live.len(),
            live,
            event_count: 0,
            births: 0,
            deaths: 0,
            status,
        }
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }
}

/// Probability that a dominating-rate event is a candidate birth rather than
/// a death.
fn candidate_probability(params: &ModelParams) -> f64 {
    let rate = params.lambda * PI * params.radius * params.radius;
    rate / (1.0 + rate)
}

/// Advances the clan by one birth or death.
pub fn step_clan(
    state: &mut ClanState,
    params: &ModelParams,
    rng: &mut RandomSource,
) -> Result<ClanEvent> {
    if state.status != ClanStatus::Running {
        return Err(Error::StepOnFinished);
    }
    let p_candidate = candidate_probability(params);
    let radius = params.radius;
    let event = loop {
        if rng.uniform() < p_candidate {
            let (w, cover) = sample_point_near(&state.live, radius, rng)?;
            if cover == 1 || rng.uniform() * (cover as f64) < 1.0 {
                debug_assert!(crate::geometry::any_within(&state.live, &w, radius));
                state.live.insert(w);
                state.births += 1;
                state.max_size = state.max_size.max(state.live.len());
                break ClanEvent::Birth(w);
            }
        } else {
            let (_, v) = state.live.remove_at(rng.index(state.live.len()));
            state.deaths += 1;
            break ClanEvent::Death(v);
        }
    };
    state.event_count += 1;
    if state.live.is_empty() {
        state.status = ClanStatus::Extinct;
    }
    Ok(event)
}

/// Result of one extinction trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub extinct: bool,
    pub events: u64,
    pub max_size: usize,
    pub seed: u64,
}

/// Grows a clan from one point at the origin until it dies out or reaches
/// `ceiling` live members.
pub fn run_extinction_trial(
    params: &ModelParams,
    ceiling: usize,
    rng: &mut RandomSource,
) -> Result<TrialOutcome> {
    if ceiling < 2 {
        return Err(Error::InvalidParameter(format!(
            "ceiling must be at least 2, got {ceiling}"
        )));
    }
    let mut state = ClanState::ancestor(Point::ORIGIN);
    while state.status == ClanStatus::Running {
        step_clan(&mut state, params, rng)?;
        if state.live.len() >= ceiling {
            state.status = ClanStatus::CeilingHit;
        }
    }
    Ok(TrialOutcome {
        extinct: state.status == ClanStatus::Extinct,
        events: state.event_count,
        max_size: state.max_size,
        seed: rng.seed(),
    })
}

/// Aggregated extinction statistics at one intensity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub trials: u64,
    pub ceiling: usize,
    pub n_extinct: u64,
    pub p_extinct: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Mean event count over the extinct trials; NaN if none died out.
    pub mean_events_extinct: f64,
}

impl SweepRow {
    /// Binomial standard error of `p_extinct`.
    pub fn std_error(&self) -> f64 {
        let p = self.p_extinct;
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Runs the trials for one intensity. Trial `i` uses stream `i` of
/// `base_seed`, so the result does not depend on scheduling.
pub fn extinction_trials(
    params: &ModelParams,
    trials: u64,
    ceiling: usize,
    base_seed: u64,
) -> Result<Vec<TrialOutcome>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    (0..trials)
        .into_par_iter()
        .map(|i| run_extinction_trial(params, ceiling, &mut RandomSource::stream(base_seed, i)))
        .collect()
}

/// Estimates the extinction probability at one intensity.
pub fn estimate_extinction(
    params: &ModelParams,
    trials: u64,
    ceiling: usize,
    base_seed: u64,
) -> Result<SweepRow> {
    let outcomes = extinction_trials(params, trials, ceiling, base_seed)?;
    Ok(summarize(params, ceiling, &outcomes))
}

/// Folds trial outcomes, in order, into a sweep row.
pub fn summarize(params: &ModelParams, ceiling: usize, outcomes: &[TrialOutcome]) -> SweepRow {
    let trials = outcomes.len() as u64;
    let (n_extinct, event_sum) = outcomes
        .iter()
        .filter(|o| o.extinct)
        .fold((0u64, 0u64), |(n, s), o| (n + 1, s + o.events));
    let (ci_low, ci_high) = wilson_interval(n_extinct, trials, Z_95);
    SweepRow {
        lambda: params.lambda,
        radius: params.radius,
        trials,
        ceiling,
        n_extinct,
        p_extinct: n_extinct as f64 / trials as f64,
        ci_low,
        ci_high,
        mean_events_extinct: if n_extinct == 0 {
            f64::NAN
        } else {
            event_sum as f64 / n_extinct as f64
        },
    }
}

/// Checks a sweep grid: nonempty, finite, non-negative, strictly increasing.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("lambda grid is empty".into()));
    }
    for &l in grid {
        check_nonnegative("lambda", l)?;
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "lambda grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// One [`SweepRow`] per grid intensity; intensity `j` uses seed
/// `mix_seed(base_seed, j)`.
pub fn sweep(
    lambda_grid: &[f64],
    radius: f64,
    trials: u64,
    ceiling: usize,
    base_seed: u64,
) -> Result<Vec<SweepRow>> {
    validate_grid(lambda_grid)?;
    check_positive("radius", radius)?;
    lambda_grid
        .iter()
        .enumerate()
        .map(|(j, &lambda)| {
            let params = ModelParams::new(lambda, radius)?;
            estimate_extinction(&params, trials, ceiling, mix_seed(base_seed, j as u64))
        })
        .collect()
}

/// Writes rows as CSV with header
/// `lambda,R,trials,ceiling,n_extinct,p_extinct,ci_low,ci_high,mean_events_extinct`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    if rows.is_empty() {
        writer.write_record([
            "lambda",
            "R",
            "trials",
            "ceiling",
            "n_extinct",
            "p_extinct",
            "ci_low",
            "ci_high",
            "mean_events_extinct",
        ])?;
    }
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::any_within;

    fn params(lambda: f64) -> ModelParams {
        ModelParams::new(lambda, 1.0).unwrap()
    }

    #[test]
    fn zero_intensity_dies_at_once() {
        let mut rng = RandomSource::new(1);
        let mut state = ClanState::ancestor(Point::ORIGIN);
        let e = step_clan(&mut state, &params(0.0), &mut rng).unwrap();
        assert_eq!(e, ClanEvent::Death(Point::ORIGIN));
        assert_eq!(state.status, ClanStatus::Extinct);
        assert_eq!(state.event_count, 1);
        assert_eq!(step_clan(&mut state, &params(0.0), &mut rng), Err(Error::StepOnFinished));
        assert_eq!(state.event_count, 1);
    }

    #[test]
    fn singleton_death_probability() {
        // 1 / (1 + 0.3 pi) = 0.514806
        let expected = 1.0 / (1.0 + 0.3 * PI);
        assert!((expected - 0.514806).abs() < 1e-6);
        let mut rng = RandomSource::new(2);
        let n = 100_000;
        let mut deaths = 0;
        for _ in 0..n {
            let mut state = ClanState::ancestor(Point::ORIGIN);
            if let ClanEvent::Death(_) = step_clan(&mut state, &params(0.3), &mut rng).unwrap() {
                deaths += 1;
            }
        }
        let p = deaths as f64 / n as f64;
        let se = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((p - expected).abs() <= 3.0 * se, "{p}");
    }

    #[test]
    fn births_land_near_the_clan_and_ledger_balances() {
        let mut rng = RandomSource::new(3);
        let p = params(0.7);
        for _ in 0..50 {
            let mut state = ClanState::ancestor(Point::ORIGIN);
            while state.status == ClanStatus::Running && state.len() < 200 {
                let before = state.live.clone();
                match step_clan(&mut state, &p, &mut rng).unwrap() {
                    ClanEvent::Birth(w) => assert!(any_within(&before, &w, 1.0)),
                    ClanEvent::Death(v) => assert!(before.points().any(|q| q == v)),
                }
                assert_eq!(state.births as i64 - state.deaths as i64, state.len() as i64 - 1);
                assert_eq!(state.event_count, state.births + state.deaths);
            }
        }
    }

    #[test]
    fn zero_intensity_trial() {
        let mut rng = RandomSource::new(4);
        let o = run_extinction_trial(&params(0.0), 750, &mut rng).unwrap();
        assert!(o.extinct);
        assert_eq!(o.events, 1);
        assert_eq!(o.max_size, 1);
        assert!(run_extinction_trial(&params(0.0), 1, &mut rng).is_err());
    }

    #[test]
    fn ceiling_stops_growth() {
        let mut rng = RandomSource::new(5);
        let o = run_extinction_trial(&params(3.0), 20, &mut rng).unwrap();
        if !o.extinct {
            assert_eq!(o.max_size, 20);
        }
        assert!(o.max_size <= 20);
    }

    #[test]
    fn zero_intensity_row() {
        let row = estimate_extinction(&params(0.0), 50, 750, 7).unwrap();
        assert_eq!(row.p_extinct, 1.0);
        assert_eq!(row.n_extinct, 50);
        assert_eq!(row.mean_events_extinct, 1.0);
        assert!(row.ci_low < 1.0 && row.ci_high == 1.0);
    }

    #[test]
    fn estimates_are_reproducible() {
        let a = estimate_extinction(&params(0.8), 40, 100, 11).unwrap();
        let b = estimate_extinction(&params(0.8), 40, 100, 11).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c = pool.install(|| estimate_extinction(&params(0.8), 40, 100, 11).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&[]).is_err());
        assert!(validate_grid(&[0.5, 0.4]).is_err());
        assert!(validate_grid(&[0.5, 0.5]).is_err());
        assert!(validate_grid(&[-0.1]).is_err());
        assert!(validate_grid(&[0.0, 0.1]).is_ok());
        assert!(sweep(&[0.0], 1.0, 0, 750, 1).is_err());
    }

    #[test]
    fn sweep_rows_follow_grid() {
        let rows = sweep(&[0.0], 2.0, 10, 750, 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].p_extinct, 1.0);
        assert_eq!(rows[0].radius, 2.0);
    }

    #[test]
    fn sweep_csv_header() {
        let rows = sweep(&[0.0], 1.0, 4, 750, 1).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "lambda,R,trials,ceiling,n_extinct,p_extinct,ci_low,ci_high,mean_events_extinct\n\
             0.0,1.0,4,750,4,1.0,0.5101091635454027,1.0,1.0\n"
        );
    }
}
