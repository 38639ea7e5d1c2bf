//! Continuous-time spatial birth-death chain whose stationary law is the
//! hard-core model.
//!
//! Births are proposed at rate `lambda * area(window)` at uniform locations
//! and accepted only when no existing point lies within the hard-core
//! radius. Each point dies at rate 1. The chain is simulated with a single
//! competing clock: the holding time is exponential with the total rate and
//! the event type is chosen in proportion to its rate.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{any_within, Configuration, Point, PointId};
use crate::poisson::{ModelParams, Window};
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventKind {
    BirthAccepted,
    BirthBlocked,
    Death,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::BirthAccepted => "BirthAccepted",
            EventKind::BirthBlocked => "BirthBlocked",
            EventKind::Death => "Death",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub time: f64,
    pub kind: EventKind,
    pub location: Point,
    /// Id of the born or dying point; `None` for blocked births.
    pub point_id: Option<PointId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub config: Configuration,
    pub time: f64,
}

impl ChainState {
    pub fn new(config: Configuration, time: f64) -> Self {
        Self { config, time }
    }

    pub fn empty() -> Self {
        Self::new(Configuration::new(), 0.0)
    }

    /// Applies a proposed birth at `v`, happening at `time`.
    pub fn propose_birth(&mut self, v: Point, radius: f64, time: f64) -> EventRecord {
        self.time = time;
        if any_within(&self.config, &v, radius) {
            EventRecord {
                time,
                kind: EventKind::BirthBlocked,
                location: v,
                point_id: None,
            }
        } else {
            let id = self.config.insert(v);
            EventRecord {
                time,
                kind: EventKind::BirthAccepted,
                location: v,
                point_id: Some(id),
            }
        }
    }

    /// Removes the `index`-th point at `time`.
    pub fn kill(&mut self, index: usize, time: f64) -> EventRecord {
        self.time = time;
        let (id, location) = self.config.remove_at(index);
        EventRecord {
            time,
            kind: EventKind::Death,
            location,
            point_id: Some(id),
        }
    }

    fn total_rate(&self, birth_rate: f64) -> f64 {
        birth_rate + self.config.len() as f64
    }
}

/// Advances the chain to its next event.
pub fn step(
    state: &mut ChainState,
    window: &Window,
    params: &ModelParams,
    rng: &mut RandomSource,
) -> Result<EventRecord> {
    let birth_rate = params.lambda * window.area();
    let total = state.total_rate(birth_rate);
    if total <= 0.0 {
        return Err(Error::DeadChain);
    }
    let time = state.time + rng.exponential(total);
    Ok(fire(state, window, params, birth_rate, total, time, rng))
}

fn fire(
    state: &mut ChainState,
    window: &Window,
    params: &ModelParams,
    birth_rate: f64,
    total: f64,
    time: f64,
    rng: &mut RandomSource,
) -> EventRecord {
    if rng.uniform() * total < birth_rate {
        let v = window.sample_uniform(rng);
        state.propose_birth(v, params.radius, time)
    } else {
        let index = rng.index(state.config.len());
        state.kill(index, time)
    }
}

/// Runs the chain up to `t_end` and returns every event on the way.
///
/// A chain with no points and zero intensity can never move again; it just
/// sits until `t_end`.
pub fn run(
    state: &mut ChainState,
    t_end: f64,
    window: &Window,
    params: &ModelParams,
    rng: &mut RandomSource,
) -> Result<Vec<EventRecord>> {
    if t_end.is_nan() || t_end < state.time {
        return Err(Error::InvalidParameter(format!(
            "t_end {t_end} is before the current time {}",
            state.time
        )));
    }
    let birth_rate = params.lambda * window.area();
    let mut events = Vec::new();
    loop {
        let total = state.total_rate(birth_rate);
        if total <= 0.0 {
            break;
        }
        let time = state.time + rng.exponential(total);
        if time > t_end {
            break;
        }
        events.push(fire(state, window, params, birth_rate, total, time, rng));
    }
    state.time = t_end;
    Ok(events)
}

/// Writes events as CSV with header `time,kind,x,y,point_id`.
pub fn write_event_log<W: Write>(events: &[EventRecord], out: W) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        time: f64,
        kind: &'static str,
        x: f64,
        y: f64,
        point_id: Option<u64>,
    }
    let mut writer = csv::Writer::from_writer(out);
    for e in events {
        writer
            .serialize(Row {
                time: e.time,
                kind: e.kind.as_str(),
                x: e.location.x,
                y: e.location.y,
                point_id: e.point_id.map(|id| id.0),
            })
            ?;
    }
    if events.is_empty() {
        writer
            .write_record(["time", "kind", "x", "y", "point_id"])
            ?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::is_hardcore;
    use crate::stats::RunningStats;

    fn unit_params(lambda: f64) -> ModelParams {
        ModelParams::new(lambda, 1.0).unwrap()
    }

    #[test]
    fn empty_chain_births_are_accepted() {
        let w = Window::square(3.0).unwrap();
        let mut rng = RandomSource::new(1);
        for seed in 0..50 {
            let mut rng2 = RandomSource::new(seed);
            let mut state = ChainState::empty();
            let e = step(&mut state, &w, &unit_params(0.3), &mut rng2).unwrap();
            assert_eq!(e.kind, EventKind::BirthAccepted);
            assert_eq!(state.config.len(), 1);
        }
        let mut state = ChainState::empty();
        assert_eq!(step(&mut state, &w, &unit_params(0.0), &mut rng), Err(Error::DeadChain));
    }

    #[test]
    fn blocked_birth_leaves_config() {
        let mut state = ChainState::new(Configuration::from_points([Point::ORIGIN]), 0.0);
        let before = state.config.clone();
        let e = state.propose_birth(Point::new(0.5, 0.0), 1.0, 0.25);
        assert_eq!(e.kind, EventKind::BirthBlocked);
        assert_eq!(e.point_id, None);
        assert_eq!(state.config, before);
        assert_eq!(state.time, 0.25);
    }

    #[test]
    fn single_death_holding_time() {
        let w = Window::square(3.0).unwrap();
        let mut rng = RandomSource::new(2);
        let mut times = RunningStats::new();
        for _ in 0..20_000 {
            let mut state = ChainState::new(Configuration::from_points([Point::ORIGIN]), 0.0);
            let e = step(&mut state, &w, &unit_params(0.0), &mut rng).unwrap();
            assert_eq!(e.kind, EventKind::Death);
            assert!(state.config.is_empty());
            times.push(e.time);
        }
        assert!(times.estimate().within(1.0, 3.0), "{:?}", times.estimate());
    }

    #[test]
    fn run_to_current_time_is_noop() {
        let w = Window::square(3.0).unwrap();
        let mut rng = RandomSource::new(3);
        let mut state = ChainState::new(Configuration::from_points([Point::ORIGIN]), 2.0);
        let before = state.clone();
        let events = run(&mut state, 2.0, &w, &unit_params(0.3), &mut rng).unwrap();
        assert!(events.is_empty());
        assert_eq!(state, before);
        assert!(run(&mut state, 1.0, &w, &unit_params(0.3), &mut rng).is_err());
    }

    #[test]
    fn pure_death_is_binomial() {
        let w = Window::square(10.0).unwrap();
        let mut rng = RandomSource::new(4);
        let n0 = 10;
        let t = 0.7;
        let mut finals = RunningStats::new();
        for _ in 0..10_000 {
            let config: Configuration = (0..n0).map(|i| Point::new(i as f64, 0.0)).collect();
            let mut state = ChainState::new(config, 0.0);
            run(&mut state, t, &w, &unit_params(0.0), &mut rng).unwrap();
            assert_eq!(state.time, t);
            finals.push(state.config.len() as f64);
        }
        let expected = n0 as f64 * (-t).exp();
        assert!(finals.estimate().within(expected, 3.0), "{:?} vs {expected}", finals.estimate());
    }

    #[test]
    fn trajectory_invariants() {
        let w = Window::square(5.0).unwrap();
        let params = unit_params(1.5);
        let mut rng = RandomSource::new(5);
        let mut state = ChainState::empty();
        let mut last = 0.0;
        for _ in 0..20_000 {
            let e = step(&mut state, &w, &params, &mut rng).unwrap();
            assert!(e.time > last);
            last = e.time;
            assert!(is_hardcore(&state.config, 1.0));
        }
    }

    #[test]
    fn event_log_csv() {
        let events = vec![
            EventRecord {
                time: 0.5,
                kind: EventKind::BirthAccepted,
                location: Point::new(1.0, 2.0),
                point_id: Some(PointId(0)),
            },
            EventRecord {
                time: 0.75,
                kind: EventKind::BirthBlocked,
                location: Point::new(1.5, 2.0),
                point_id: None,
            },
        ];
        let mut buf = Vec::new();
        write_event_log(&events, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "time,kind,x,y,point_id\n0.5,BirthAccepted,1.0,2.0,0\n0.75,BirthBlocked,1.5,2.0,\n"
        );
        let mut buf = Vec::new();
        write_event_log(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "time,kind,x,y,point_id\n");
    }
}
