//! Poisson point processes on rectangular windows and the
//! acceptance/rejection sampler for the hard-core model.

use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{check_nonnegative, check_positive, Error, Result};
use crate::geometry::{Configuration, Point};
use crate::rng::RandomSource;

/// Default attempt budget of [`sample_hardcore_rejection`].
pub const DEFAULT_MAX_ATTEMPTS: u64 = 1_000_000;

/// Means at or above this go to a rejection-based Poisson sampler instead
/// of inversion.
const INVERSION_LIMIT: f64 = 30.0;

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let finite = [x0, x1, y0, y1].iter().all(|v| v.is_finite());
        if !finite || x0 >= x1 || y0 >= y1 {
            return Err(Error::InvalidParameter(format!(
                "window needs finite x0 < x1 and y0 < y1, got [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    pub(crate) fn new_unchecked(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    /// The square `[0, side]^2`.
    pub fn square(side: f64) -> Result<Self> {
        Self::new(0.0, side, 0.0, side)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: &Point) -> bool {
        (self.x0..=self.x1).contains(&p.x) && (self.y0..=self.y1).contains(&p.y)
    }

    #[inline]
    pub fn sample_uniform(&self, rng: &mut RandomSource) -> Point {
        Point::new(
            self.x0 + self.width() * rng.uniform(),
            self.y0 + self.height() * rng.uniform(),
        )
    }
}

/// Intensity and hard-core radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda: f64,
    pub radius: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, radius: f64) -> Result<Self> {
        check_nonnegative("lambda", lambda)?;
        check_positive("radius", radius)?;
        Ok(Self { lambda, radius })
    }
}

/// Draw from Poisson(`mean`).
pub fn sample_poisson_count(mean: f64, rng: &mut RandomSource) -> Result<u64> {
    check_nonnegative("Poisson mean", mean)?;
    if mean == 0.0 {
        return Ok(0);
    }
    if mean < INVERSION_LIMIT {
        return Ok(poisson_inversion(mean, rng));
    }
    let dist = Poisson::new(mean).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(dist.sample(rng) as u64)
}

fn poisson_inversion(mean: f64, rng: &mut RandomSource) -> u64 {
    let u = rng.uniform();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u >= cdf {
        k += 1;
        p *= mean / k as f64;
        let next = cdf + p;
        if next == cdf {
            // The tail beyond here is below double precision.
            break;
        }
        cdf = next;
    }
    k
}

/// Poisson point process of intensity `lambda` on `window`.
pub fn sample_ppp(window: &Window, lambda: f64, rng: &mut RandomSource) -> Result<Configuration> {
    let n = sample_poisson_count(lambda * window.area(), rng)?;
    Ok((0..n).map(|_| window.sample_uniform(rng)).collect())
}

/// True iff every pair of points is at least `radius` apart.
pub fn is_hardcore(config: &Configuration, radius: f64) -> bool {
    let r2 = radius * radius;
    let pts: Vec<Point> = config.points().collect();
    pts.iter()
        .enumerate()
        .all(|(i, p)| pts[i + 1..].iter().all(|q| p.distance_squared(q) >= r2))
}

/// An exact hard-core draw together with the number of Poisson processes
/// generated to get it.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionSample {
    pub config: Configuration,
    pub attempts: u64,
}

/// Draws Poisson processes until one is hard-core.
pub fn sample_hardcore_rejection(
    window: &Window,
    params: &ModelParams,
    rng: &mut RandomSource,
    max_attempts: u64,
) -> Result<RejectionSample> {
    if max_attempts == 0 {
        return Err(Error::InvalidParameter("max_attempts must be at least 1".into()));
    }
    for attempt in 1..=max_attempts {
        let config = sample_ppp(window, params.lambda, rng)?;
        if is_hardcore(&config, params.radius) {
            return Ok(RejectionSample {
                config,
                attempts: attempt,
            });
        }
    }
    Err(Error::AttemptsExhausted {
        attempts: max_attempts,
    })
}
