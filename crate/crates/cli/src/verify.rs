//! The `verify` report: closed-form constants and Monte Carlo checks of the
//! inequalities behind the expected running-time bound.

use std::f64::consts::PI;
use std::io::Write;

use hardcore::cod::extinction_trials;
use hardcore::geometry::two_disk_union_area;
use hardcore::stats::RunningStats;
use hardcore::theory::{
    critical_bound, drift_check, event_bound, lemma1_integral, lemma1_mc_check, lemma2_check,
    mean_added_area, old_bound, BIRTH_AREA_FACTOR, DEFAULT_QUAD_TOLERANCE,
};
use hardcore::{Configuration, ModelParams, Point, RandomSource, Result, Window};
use serde::Serialize;

pub const DRIFT_LAMBDAS: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.44];
const DRIFT_EVALUATIONS: u64 = 100_000;
const DRIFT_AREA_SAMPLES: u64 = 64;
const LEMMA2_SAMPLES: u64 = 100_000;
const LEMMA2_CONFIGS: usize = 100;
const EVENT_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub check_name: String,
    pub expected: String,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    fn close(name: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        Self {
            check_name: name.into(),
            expected: format!("{expected:.7}"),
            observed,
            tolerance,
            pass: (observed - expected).abs() <= tolerance,
        }
    }

    fn at_most(name: impl Into<String>, bound: f64, observed: f64, tolerance: f64) -> Self {
        Self {
            check_name: name.into(),
            expected: format!("<= {bound:.7}"),
            observed,
            tolerance,
            pass: observed <= bound + tolerance,
        }
    }
}

/// Runs every check. Check `k` draws from stream `k` of `seed`.
#[allow(clippy::approx_constant)]
pub fn run_suite(seed: u64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut stream = 0u64;
    let mut next_rng = || {
        stream += 1;
        RandomSource::stream(seed, stream)
    };

    let critical = critical_bound(1.0)?;
    let old = old_bound(1.0)?;
    rows.push(CheckRow::close("critical_bound_R1", 0.450_386_5, critical, 1e-6));
    rows.push(CheckRow::close("old_bound_R1", 0.318_309_9, old, 1e-6));
    rows.push(CheckRow::close("bound_ratio", 1.4149, critical / old, 1e-3));

    for r in [0.5, 1.0, 2.0, 5.0] {
        let expected = BIRTH_AREA_FACTOR * r * r;
        let value = lemma1_integral(r, DEFAULT_QUAD_TOLERANCE)?;
        rows.push(CheckRow::close(format!("lemma1_integral_R{r}"), expected, value, 1e-6 * expected));
    }
    let mc = lemma1_mc_check(1.0, 1_000_000, &mut next_rng())?;
    rows.push(CheckRow::close("lemma1_mc_R1", BIRTH_AREA_FACTOR, mc.mean, 3.0 * mc.std_error));
    let pair = Configuration::from_points([Point::ORIGIN, Point::new(1.0, 0.0)]);
    let added = mean_added_area(&pair, 1.0, 200_000, 16, &mut next_rng())?;
    rows.push(CheckRow::at_most(
        "lemma1_two_point_R1",
        BIRTH_AREA_FACTOR,
        added.mean,
        3.0 * added.std_error,
    ));

    let closed_forms = [
        ("lemma2_single", vec![Point::ORIGIN], PI, PI),
        ("lemma2_disjoint", vec![Point::ORIGIN, Point::new(2.5, 0.0)], 2.0 * PI, 2.0 * PI),
        (
            "lemma2_lens",
            vec![Point::ORIGIN, Point::new(1.0, 0.0)],
            two_disk_union_area(1.0, 1.0),
            2.0 * two_disk_union_area(1.0, 1.0) - 2.0 * PI,
        ),
    ];
    for (name, points, area, single) in closed_forms {
        let report = lemma2_check(&Configuration::from_points(points), 1.0, LEMMA2_SAMPLES, &mut next_rng())?;
        rows.push(CheckRow::close(format!("{name}_A"), area, report.area, 3.0 * report.area_std_error));
        rows.push(CheckRow::close(
            format!("{name}_A1"),
            single,
            report.single_cover,
            3.0 * report.single_cover_std_error,
        ));
    }

    let mut rng = next_rng();
    let mut worst = f64::INFINITY;
    for _ in 0..LEMMA2_CONFIGS {
        let config = random_configuration(&mut rng, 20);
        let report = lemma2_check(&config, 1.0, LEMMA2_SAMPLES, &mut rng)?;
        let z = if report.slack_std_error > 0.0 {
            report.slack / report.slack_std_error
        } else if report.slack >= 0.0 {
            0.0
        } else {
            f64::NEG_INFINITY
        };
        worst = worst.min(z);
    }
    rows.push(CheckRow {
        check_name: "lemma2_random_min_slack_z".into(),
        expected: ">= -4".into(),
        observed: worst,
        tolerance: 4.0,
        pass: worst >= -4.0,
    });

    for lambda in DRIFT_LAMBDAS {
        let params = ModelParams::new(lambda, 1.0)?;
        let report = drift_check(&params, DRIFT_EVALUATIONS, DRIFT_AREA_SAMPLES, &mut next_rng())?;
        let tol = 4.0 * report.std_error;
        rows.push(CheckRow::at_most(
            format!("drift_lambda{lambda}"),
            -report.constants.delta,
            report.mean,
            tol,
        ));
        rows.push(CheckRow::at_most(
            format!("drift_balanced_lambda{lambda}"),
            -report.constants.balanced_delta(),
            report.mean,
            tol,
        ));
    }

    for lambda in [0.0, 0.3] {
        let params = ModelParams::new(lambda, 1.0)?;
        let outcomes = extinction_trials(&params, EVENT_TRIALS, usize::MAX, next_rng().seed())?;
        let events: RunningStats = outcomes.iter().filter(|o| o.extinct).map(|o| o.events as f64).collect();
        let bound = event_bound(&params)?;
        if lambda == 0.0 {
            rows.push(CheckRow::close("event_mean_lambda0", 1.0, events.mean(), 0.0));
        }
        rows.push(CheckRow::at_most(format!("event_bound_lambda{lambda}"), bound, events.mean(), 0.0));
    }
    Ok(rows)
}

fn random_configuration(rng: &mut RandomSource, max_size: usize) -> Configuration {
    let n = 1 + rng.index(max_size);
    let side = 1.5 * (n as f64).sqrt();
    let window = Window::square(side).expect("positive side");
    (0..n).map(|_| window.sample_uniform(rng)).collect()
}

pub fn write_report<W: Write>(rows: &[CheckRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}
