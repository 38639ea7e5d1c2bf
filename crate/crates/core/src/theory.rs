//! Constants of the running-time bound for dominated CFTP and numerical
//! checks of the inequalities behind it.
//!
//! The potential `phi(D) = A(D) + c * #D` (union area plus a multiple of the
//! clan size) decreases in expectation by at least `delta` per clan event
//! whenever `lambda < critical_bound(R)`, which bounds the expected number
//! of clan events. Two facts feed the drift: a birth adds at most
//! `3 sqrt(3) R^2 / 4` of new area on average, and a death removes on
//! average `A_1 / #D >= (2 A - pi R^2 #D) / #D`, with `A_1` the area
//! covered by exactly one disk.

use std::f64::consts::PI;

use crate::cod::{step_clan, ClanEvent, ClanState, ClanStatus};
use crate::error::{check_nonnegative, check_positive, Error, Result};
use crate::geometry::{
    any_within, coverage_profile, lens_area, sample_point_near, sample_uniform_in_disk,
    Configuration, Point,
};
use crate::poisson::ModelParams;
use crate::rng::RandomSource;
use crate::stats::{MeanEstimate, RunningStats};

/// `3 sqrt(3) / 4`: mean new area, in units of `R^2`, added by a point born
/// uniformly in the disk of a lone parent.
pub const BIRTH_AREA_FACTOR: f64 = 1.299_038_105_676_658;

/// `8 / (3 sqrt(3) + 4 pi)`.
pub const CRITICAL_CONSTANT: f64 = 0.450_386_467_243_761_66;

/// Default absolute tolerance of [`lemma1_integral`].
pub const DEFAULT_QUAD_TOLERANCE: f64 = 1e-9;

/// Continuations drawn from every sampled state in [`drift_check`].
pub const DRIFT_BRANCHES: usize = 64;

/// Intensity below which the expected clan size is provably finite.
pub fn critical_bound(radius: f64) -> Result<f64> {
    check_positive("radius", radius)?;
    Ok(CRITICAL_CONSTANT / (radius * radius))
}

/// The earlier, weaker bound `1 / (pi R^2)`.
pub fn old_bound(radius: f64) -> Result<f64> {
    check_positive("radius", radius)?;
    Ok(1.0 / (PI * radius * radius))
}

/// Upper bound on the expected number of clan events,
/// `1 / (critical_bound(R) - lambda)`.
pub fn event_bound(params: &ModelParams) -> Result<f64> {
    let critical = critical_bound(params.radius)?;
    if params.lambda >= critical {
        return Err(Error::SupercriticalLambda {
            lambda: params.lambda,
            critical,
        });
    }
    Ok(1.0 / (critical - params.lambda))
}

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = KRONROD_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let sum = f(centre - dx) + f(centre + dx);
        kronrod += KRONROD_WEIGHTS[i] * sum;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod quadrature to absolute tolerance `tolerance`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tolerance: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 2000;
    let (value, error) = gauss_kronrod(&f, a, b);
    let mut intervals = vec![(a, b, value, error)];
    loop {
        let total: f64 = intervals.iter().map(|iv| iv.2).sum();
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        if error <= tolerance {
            return Ok(total);
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureFailed {
                tolerance,
                estimate: error,
            });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("at least one interval");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gauss_kronrod(&f, lo, mid);
        let (v2, e2) = gauss_kronrod(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Expected new area from a child born uniformly in the disk of a lone
/// parent: the integral over the parent-child distance `a` (density
/// `2a / R^2`) of `pi R^2 - 4 * int_{a/2}^{R} sqrt(R^2 - x^2) dx`.
/// Both integrals are evaluated by quadrature.
pub fn lemma1_integral(radius: f64, tolerance: f64) -> Result<f64> {
    check_positive("radius", radius)?;
    check_positive("tolerance", tolerance)?;
    let r2 = radius * radius;
    // The outer integrand is bounded by 2 pi R, so an inner tolerance of
    // tol / (4 R) keeps the nested error below tol / 2.
    let inner_tol = tolerance / (4.0 * radius * 4.0);
    let failure = std::cell::Cell::new(None);
    let outer = integrate(
        |a| {
            let inner = integrate(|x| (r2 - x * x).max(0.0).sqrt(), 0.5 * a, radius, inner_tol);
            match inner {
                Ok(v) => 2.0 * a / r2 * (PI * r2 - 4.0 * v),
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        },
        0.0,
        radius,
        0.5 * tolerance,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(outer),
    }
}

/// Outer integrand of [`lemma1_integral`] with the inner integral replaced
/// by the closed-form lens area.
pub fn lemma1_integrand_closed_form(a: f64, radius: f64) -> f64 {
    let r2 = radius * radius;
    2.0 * a / r2 * (PI * r2 - lens_area(a, radius))
}

/// Same integral as [`lemma1_integral`], using the closed-form lens area for
/// the inner integral.
pub fn lemma1_integral_closed_form(radius: f64, tolerance: f64) -> Result<f64> {
    check_positive("radius", radius)?;
    integrate(|a| lemma1_integrand_closed_form(a, radius), 0.0, radius, tolerance)
}

/// Monte Carlo mean of the area added when a child is born uniformly in the
/// disk of a lone parent. The added area of each draw is exact.
pub fn lemma1_mc_check(radius: f64, n: u64, rng: &mut RandomSource) -> Result<MeanEstimate> {
    check_positive("radius", radius)?;
    let disk = PI * radius * radius;
    let stats: RunningStats = (0..n)
        .map(|_| {
            let w = sample_uniform_in_disk(&Point::ORIGIN, radius, rng);
            disk - lens_area(w.x.hypot(w.y), radius)
        })
        .collect();
    Ok(stats.estimate())
}

/// Area of the disk about `centre` not covered by any disk of `config`,
/// estimated from `samples` uniform points in that disk.
fn uncovered_disk_area(
    centre: &Point,
    config: &Configuration,
    radius: f64,
    samples: u64,
    rng: &mut RandomSource,
) -> f64 {
    if config.is_empty() {
        return PI * radius * radius;
    }
    let free = (0..samples)
        .filter(|_| !any_within(config, &sample_uniform_in_disk(centre, radius, rng), radius))
        .count();
    PI * radius * radius * free as f64 / samples as f64
}

/// Monte Carlo mean of the area added when a point is born uniformly on the
/// union of disks about `config`. Each draw estimates its new area from
/// `area_samples` points in the child's disk.
pub fn mean_added_area(
    config: &Configuration,
    radius: f64,
    n: u64,
    area_samples: u64,
    rng: &mut RandomSource,
) -> Result<MeanEstimate> {
    check_positive("radius", radius)?;
    if area_samples == 0 {
        return Err(Error::InvalidParameter("area_samples must be at least 1".into()));
    }
    let mut stats = RunningStats::new();
    while stats.count() < n {
        let (w, cover) = sample_point_near(config, radius, rng)?;
        if cover > 1 && rng.uniform() * cover as f64 >= 1.0 {
            continue;
        }
        stats.push(uncovered_disk_area(&w, config, radius, area_samples, rng));
    }
    Ok(stats.estimate())
}

/// Union area, single-cover area and the slack
/// `A_1 - (2 A - pi R^2 #D)`, which is non-negative for every configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Report {
    pub area: f64,
    pub single_cover: f64,
    pub slack: f64,
    /// Monte Carlo standard errors of the three estimates.
    pub area_std_error: f64,
    pub single_cover_std_error: f64,
    pub slack_std_error: f64,
}

impl Lemma2Report {
    /// Slack is non-negative up to `sigmas` standard errors.
    pub fn holds(&self, sigmas: f64) -> bool {
        self.slack >= -sigmas * self.slack_std_error
    }
}

pub fn lemma2_check(
    config: &Configuration,
    radius: f64,
    n_samples: u64,
    rng: &mut RandomSource,
) -> Result<Lemma2Report> {
    check_positive("radius", radius)?;
    if config.is_empty() {
        return Err(Error::EmptyConfiguration);
    }
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let profile = coverage_profile(config, radius, n_samples, rng);
    let disks = PI * radius * radius * config.len() as f64;
    let (area, area_se) = profile.weighted(|k| (k >= 1) as u8 as f64);
    let (single, single_se) = profile.weighted(|k| (k == 1) as u8 as f64);
    // slack = E[1{K=1} - 2 * 1{K>=1}] * box + pi R^2 #D
    let (slack_part, slack_se) = profile.weighted(|k| match k {
        0 => 0.0,
        1 => -1.0,
        _ => -2.0,
    });
    Ok(Lemma2Report {
        area,
        single_cover: single,
        slack: slack_part + disks,
        area_std_error: area_se,
        single_cover_std_error: single_se,
        slack_std_error: slack_se,
    })
}

/// Potential weight `c` and per-event drift `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftConstants {
    pub c: f64,
    pub delta: f64,
    pub lambda: f64,
    pub radius: f64,
}

impl DriftConstants {
    /// `c - pi R^2`, the drift that this choice of `c` actually yields: with
    /// it the birth term `lambda (3 sqrt(3) R^2 / 4 + c) - 2` and the death
    /// term `pi R^2 - c` are equal. It is positive exactly when
    /// `lambda < critical_bound(R)` and is smaller than `delta` for
    /// `lambda > 0`.
    pub fn balanced_delta(&self) -> f64 {
        self.c - PI * self.radius * self.radius
    }
}

/// `c = (pi R^2 + 2 - lambda R^2 3 sqrt(3)/4) / (1 + lambda)` and
/// `delta = (2 - lambda R^2 3 sqrt(3)/4) / (1 + lambda)`.
pub fn drift_constants(params: &ModelParams) -> Result<DriftConstants> {
    check_nonnegative("lambda", params.lambda)?;
    check_positive("radius", params.radius)?;
    let r2 = params.radius * params.radius;
    let birth_area = params.lambda * r2 * BIRTH_AREA_FACTOR;
    Ok(DriftConstants {
        c: (PI * r2 + 2.0 - birth_area) / (1.0 + params.lambda),
        delta: (2.0 - birth_area) / (1.0 + params.lambda),
        lambda: params.lambda,
        radius: params.radius,
    })
}

/// Empirical one-step drift of `phi(D) = A(D) + c #D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftReport {
    /// Mean of `phi(D_{i+1}) - phi(D_i)` over all branched continuations.
    pub mean: f64,
    /// Standard error, from the spread of per-state conditional means.
    pub std_error: f64,
    pub constants: DriftConstants,
    pub states: u64,
    pub evaluations: u64,
}

impl DriftReport {
    /// `mean <= -bound + sigmas * std_error`.
    pub fn below(&self, bound: f64, sigmas: f64) -> bool {
        self.mean <= -bound + sigmas * self.std_error
    }

    /// The drift inequality with `delta` from [`drift_constants`].
    pub fn passes(&self, sigmas: f64) -> bool {
        self.below(self.constants.delta, sigmas)
    }

    /// The drift inequality with [`DriftConstants::balanced_delta`].
    pub fn passes_balanced(&self, sigmas: f64) -> bool {
        self.below(self.constants.balanced_delta(), sigmas)
    }
}

/// Change of `phi` across one clan event, with the area change estimated
/// from `area_samples` points in the disk of the born or dying point.
fn phi_increment(
    before: &Configuration,
    after: &Configuration,
    event: ClanEvent,
    c: f64,
    radius: f64,
    area_samples: u64,
    rng: &mut RandomSource,
) -> f64 {
    match event {
        ClanEvent::Birth(w) => uncovered_disk_area(&w, before, radius, area_samples, rng) + c,
        ClanEvent::Death(v) => -uncovered_disk_area(&v, after, radius, area_samples, rng) - c,
    }
}

/// Estimates the conditional one-step drift of `phi` along clan
/// trajectories.
///
/// States are collected by running clans from a single ancestor; each state
/// is branched into [`DRIFT_BRANCHES`] independent one-event continuations
/// until `evaluations` continuations have been made.
pub fn drift_check(
    params: &ModelParams,
    evaluations: u64,
    area_samples: u64,
    rng: &mut RandomSource,
) -> Result<DriftReport> {
    let critical = critical_bound(params.radius)?;
    if params.lambda >= critical {
        return Err(Error::SupercriticalLambda {
            lambda: params.lambda,
            critical,
        });
    }
    if evaluations == 0 || area_samples == 0 {
        return Err(Error::InvalidParameter(
            "evaluations and area_samples must be at least 1".into(),
        ));
    }
    let constants = drift_constants(params)?;
    let mut per_state = RunningStats::new();
    let mut total = 0.0;
    let mut done = 0u64;
    let mut trajectory = ClanState::ancestor(Point::ORIGIN);
    while done < evaluations {
        if trajectory.status != ClanStatus::Running {
            trajectory = ClanState::ancestor(Point::ORIGIN);
        }
        let branches = (evaluations - done).min(DRIFT_BRANCHES as u64);
        let mut state_sum = 0.0;
        for _ in 0..branches {
            let mut next = trajectory.clone();
            let event = step_clan(&mut next, params, rng)?;
            state_sum += phi_increment(
                &trajectory.live,
                &next.live,
                event,
                constants.c,
                params.radius,
                area_samples,
                rng,
            );
        }
        total += state_sum;
        done += branches;
        per_state.push(state_sum / branches as f64);
        step_clan(&mut trajectory, params, rng)?;
    }
    let spread = per_state.estimate();
    Ok(DriftReport {
        mean: total / done as f64,
        std_error: spread.std_error,
        constants,
        states: per_state.count(),
        evaluations: done,
    })
}
