//! Dominated coupling from the past for the hard-core model.
//!
//! A free birth-death process (births at rate `lambda * area`, unit-rate
//! deaths, no interaction) is stationary with PPP(`lambda`) marginals and is
//! time-reversible. It is generated backwards from time 0, so the horizon can
//! be pushed further into the past without touching events already drawn.
//!
//! Two coupled hard-core chains are then run forward from the horizon: the
//! upper chain starts from every dominating point alive at `-T`, the lower
//! chain starts empty. Since the hard-core interaction is antitone, a
//! dominating birth enters the lower chain iff the upper chain does not
//! block it, and enters the upper chain iff the lower chain does not block
//! it. Every hard-core chain started at `-T` inside the dominating process
//! stays between the two, so once they agree at time 0 the common state is
//! an exact draw.

use crate::error::{check_positive, Error, Result};
use crate::geometry::{any_within, Configuration, Point, PointId};
use crate::poisson::{sample_ppp, ModelParams, Window};
use crate::rng::RandomSource;

pub const DEFAULT_INITIAL_HORIZON: f64 = 1.0;
pub const DEFAULT_MAX_DOUBLINGS: u32 = 40;

/// One point of the dominating process.
///
/// `birth` is `-inf` while the point was already alive at the current
/// horizon; `death` is `+inf` for points alive at time 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominatingPoint {
    pub id: PointId,
    pub location: Point,
    pub birth: f64,
    pub death: f64,
}

impl DominatingPoint {
    pub fn alive_at(&self, t: f64) -> bool {
        self.birth <= t && t < self.death
    }
}

/// Free birth-death process on `[-horizon, 0]`, extendable into the past.
#[derive(Debug, Clone)]
pub struct DominatingTimeline {
    window: Window,
    lambda: f64,
    horizon: f64,
    points: Vec<DominatingPoint>,
    /// Indices of points alive at `-horizon`, in a deterministic order.
    open: Vec<usize>,
    next_id: u64,
}

impl DominatingTimeline {
    /// Generates the free process on `[-horizon, 0]`.
    pub fn new(window: Window, lambda: f64, horizon: f64, rng: &mut RandomSource) -> Result<Self> {
        check_positive("horizon", horizon)?;
        let start = sample_ppp(&window, lambda, rng)?;
        let mut timeline = Self {
            window,
            lambda,
            horizon: 0.0,
            points: Vec::with_capacity(start.len()),
            open: Vec::with_capacity(start.len()),
            next_id: 0,
        };
        for p in start.points() {
            timeline.push_open(p, f64::INFINITY);
        }
        timeline.generate_back_to(horizon, rng);
        Ok(timeline)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn points(&self) -> &[DominatingPoint] {
        &self.points
    }

    /// Number of births and deaths inside `[-horizon, 0]`.
    pub fn event_count(&self) -> usize {
        self.points
            .iter()
            .map(|p| p.birth.is_finite() as usize + p.death.is_finite() as usize)
            .sum()
    }

    /// Dominating points alive at time `t`.
    pub fn alive_at(&self, t: f64) -> Configuration {
        let mut config = Configuration::new();
        for p in self.points.iter().filter(|p| p.alive_at(t)) {
            config.insert_with_id(p.id, p.location);
        }
        config
    }

    /// The timeline as it looked when the horizon was `horizon`: points that
    /// die before `-horizon` are dropped and earlier births are forgotten.
    pub fn restricted_to(&self, horizon: f64) -> Vec<DominatingPoint> {
        self.points
            .iter()
            .filter(|p| p.death > -horizon)
            .map(|p| DominatingPoint {
                birth: if p.birth < -horizon { f64::NEG_INFINITY } else { p.birth },
                ..*p
            })
            .collect()
    }

    /// Pushes the horizon back to `new_horizon`, keeping every existing event.
    pub fn extend_backwards(&mut self, new_horizon: f64, rng: &mut RandomSource) -> Result<()> {
        if !new_horizon.is_finite() || new_horizon <= self.horizon {
            return Err(Error::InvalidParameter(format!(
                "new horizon {new_horizon} must exceed the current horizon {}",
                self.horizon
            )));
        }
        self.generate_back_to(new_horizon, rng);
        Ok(())
    }

    fn push_open(&mut self, location: Point, death: f64) {
        let id = PointId(self.next_id);
        self.next_id += 1;
        self.open.push(self.points.len());
        self.points.push(DominatingPoint {
            id,
            location,
            birth: f64::NEG_INFINITY,
            death,
        });
    }

    // In reversed time a death (rate lambda * area) shows up as a new point
    // and a birth (rate 1 per alive point) closes an open point.
    fn generate_back_to(&mut self, new_horizon: f64, rng: &mut RandomSource) {
        let appear_rate = self.lambda * self.window.area();
        let mut t = -self.horizon;
        loop {
            let total = appear_rate + self.open.len() as f64;
            if total <= 0.0 {
                break;
            }
            t -= rng.exponential(total);
            if t < -new_horizon {
                break;
            }
            if rng.uniform() * total < appear_rate {
                let location = self.window.sample_uniform(rng);
                self.push_open(location, t);
            } else {
                let slot = rng.index(self.open.len());
                let index = self.open.swap_remove(slot);
                self.points[index].birth = t;
            }
        }
        self.horizon = new_horizon;
    }
}

/// Upper and lower hard-core chains at the end of a sandwich run.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichState {
    pub upper: Configuration,
    pub lower: Configuration,
    /// Dominating births and deaths processed.
    pub events: usize,
}

impl SandwichState {
    pub fn coalesced(&self) -> bool {
        self.upper.same_members(&self.lower)
    }
}

#[derive(Clone, Copy)]
enum Transition {
    Birth(usize),
    Death(usize),
}

/// Runs the upper/lower chains from `-horizon` to time 0.
pub fn run_sandwich(timeline: &DominatingTimeline, radius: f64) -> SandwichState {
    let horizon = timeline.horizon;
    let points = &timeline.points;
    let mut transitions: Vec<(f64, Transition)> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if p.birth.is_finite() && p.birth >= -horizon {
            transitions.push((p.birth, Transition::Birth(i)));
        }
        if p.death.is_finite() && p.death > -horizon {
            transitions.push((p.death, Transition::Death(i)));
        }
    }
    transitions.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut upper = timeline.alive_at(-horizon);
    let mut lower = Configuration::new();
    for &(_, transition) in &transitions {
        match transition {
            Transition::Birth(i) => {
                let p = &points[i];
                let into_lower = !any_within(&upper, &p.location, radius);
                let into_upper = !any_within(&lower, &p.location, radius);
                if into_lower {
                    lower.insert_with_id(p.id, p.location);
                }
                if into_upper {
                    upper.insert_with_id(p.id, p.location);
                }
            }
            Transition::Death(i) => {
                let id = points[i].id;
                upper.remove(id);
                lower.remove(id);
            }
        }
        debug_assert!(lower.is_subset_of(&upper), "sandwich order violated");
    }
    SandwichState {
        upper,
        lower,
        events: transitions.len(),
    }
}

/// An exact hard-core draw from dominated CFTP.
#[derive(Debug, Clone, PartialEq)]
pub struct DcftpSample {
    pub config: Configuration,
    pub horizon: f64,
    pub doublings: u32,
    /// Dominating events in `[-horizon, 0]` at the final horizon.
    pub event_count: usize,
}

/// Draws an exact sample of the hard-core model on `window`.
///
/// Starts at horizon `t0` and doubles it, reusing all earlier randomness,
/// until the sandwich coalesces or `max_doublings` doublings have failed.
pub fn sample_dcftp(
    window: &Window,
    params: &ModelParams,
    rng: &mut RandomSource,
    t0: f64,
    max_doublings: u32,
) -> Result<DcftpSample> {
    let mut timeline = DominatingTimeline::new(*window, params.lambda, t0, rng)?;
    let mut doublings = 0;
    loop {
        let state = run_sandwich(&timeline, params.radius);
        if state.coalesced() {
            return Ok(DcftpSample {
                config: state.lower,
                horizon: timeline.horizon,
                doublings,
                event_count: state.events,
            });
        }
        if doublings == max_doublings {
            return Err(Error::CoalescenceFailure {
                doublings,
                horizon: timeline.horizon,
            });
        }
        timeline.extend_backwards(2.0 * timeline.horizon, rng)?;
        doublings += 1;
    }
}
