use std::f64::consts::PI;

use hardcore::bdchain::{step, ChainState};
use hardcore::geometry::{coverage_profile, coverage_profile_in, distance};
use hardcore::poisson::is_hardcore;
use hardcore::theory::lemma2_check;
use hardcore::{Configuration, ModelParams, Point, RandomSource, Window};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point> {
    (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y)| Point::new(x, y))
}

fn small_config(max: usize, side: f64) -> impl Strategy<Value = Configuration> {
    prop::collection::vec((0.0..side, 0.0..side), 1..=max)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point::new(x, y)).collect())
}

proptest! {
    #[test]
    fn distance_is_a_metric(p in point(), q in point(), r in point()) {
        prop_assert_eq!(distance(&p, &q), distance(&q, &p));
        prop_assert!(distance(&p, &q) >= 0.0);
        prop_assert!(distance(&p, &r) <= distance(&p, &q) + distance(&q, &r) + 1e-9);
    }

    #[test]
    fn adding_a_point_never_shrinks_coverage(config in small_config(8, 4.0), extra in (0.0..4.0f64, 0.0..4.0f64), seed in any::<u64>()) {
        let bounds = Window::new(-1.0, 5.0, -1.0, 5.0).unwrap();
        let before = coverage_profile_in(&config, 1.0, &bounds, 2000, &mut RandomSource::new(seed));
        let mut bigger = config.clone();
        bigger.insert(Point::new(extra.0, extra.1));
        let after = coverage_profile_in(&bigger, 1.0, &bounds, 2000, &mut RandomSource::new(seed));
        prop_assert!(after.multiplicity_counts[0] <= before.multiplicity_counts[0]);
        prop_assert!(after.total_area >= before.total_area - 1e-9);
    }

    #[test]
    fn layer_areas_add_up(config in small_config(10, 5.0), seed in any::<u64>()) {
        let prof = coverage_profile(&config, 1.0, 20_000, &mut RandomSource::new(seed));
        prop_assert_eq!(prof.layer_areas.len(), config.len());
        let sum: f64 = prof.layer_areas.iter().sum();
        prop_assert!((sum - prof.total_area).abs() < 1e-9);
        prop_assert!(prof.layer_areas.iter().all(|&a| a >= 0.0));
        let (weighted, se) = prof.multiplicity_sum();
        prop_assert!((weighted - PI * config.len() as f64).abs() <= 4.0 * se + 1e-9);
    }

    #[test]
    fn lemma2_slack_is_nonnegative(config in small_config(12, 4.0), seed in any::<u64>()) {
        let r = lemma2_check(&config, 1.0, 20_000, &mut RandomSource::new(seed)).unwrap();
        prop_assert!(r.holds(4.0), "{:?}", r);
    }

    #[test]
    fn chain_stays_hardcore(seed in any::<u64>(), lambda in 0.0..3.0f64) {
        let window = Window::square(4.0).unwrap();
        let params = ModelParams::new(lambda, 1.0).unwrap();
        let mut rng = RandomSource::new(seed);
        let mut state = ChainState::new(Configuration::from_points([Point::new(2.0, 2.0)]), 0.0);
        let mut last = 0.0;
        for _ in 0..300 {
            match step(&mut state, &window, &params, &mut rng) {
                Ok(e) => {
                    prop_assert!(e.time > last);
                    last = e.time;
                }
                Err(_) => break,
            }
            prop_assert!(is_hardcore(&state.config, 1.0));
        }
    }

    #[test]
    fn configuration_keeps_insertion_order(ops in prop::collection::vec(any::<(bool, u8)>(), 0..60)) {
        let mut config = Configuration::new();
        let mut model: Vec<u64> = Vec::new();
        for (insert, k) in ops {
            if insert || model.is_empty() {
                let id = config.insert(Point::new(k as f64, 0.0));
                prop_assert!(!model.contains(&id.0));
                model.push(id.0);
            } else {
                let idx = k as usize % model.len();
                let id = model.remove(idx);
                prop_assert!(config.remove(hardcore::PointId(id)).is_some());
            }
            prop_assert_eq!(config.ids().map(|i| i.0).collect::<Vec<_>>(), model.clone());
        }
    }
}
