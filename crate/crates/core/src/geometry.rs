//! Planar primitives: points, configurations, disk sampling and
//! union-of-disks coverage.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poisson::Window;
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub fn new(x: f64, y: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite(), "non-finite point ({x}, {y})");
        Self { x, y }
    }

    #[inline]
    pub fn distance_squared(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Euclidean distance.
#[inline]
pub fn distance(p: &Point, q: &Point) -> f64 {
    p.distance_squared(q).sqrt()
}

/// Stable identifier of a point inside a [`Configuration`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointId(pub u64);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A finite set of points with unique ids, iterated in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Configuration {
    entries: Vec<(PointId, Point)>,
    next_id: u64,
}

impl Configuration {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a configuration, numbering the points `0, 1, ...`.
    pub fn from_points<I: IntoIterator<Item = Point>>(points: I) -> Self {
        let mut config = Self::new();
        for p in points {
            config.insert(p);
        }
        config
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds a point under a fresh id.
    pub fn insert(&mut self, p: Point) -> PointId {
        let id = PointId(self.next_id);
        self.next_id += 1;
        self.entries.push((id, p));
        id
    }

    /// Adds a point under an externally assigned id.
    ///
    /// # Panics
    /// If `id` is already present.
    pub fn insert_with_id(&mut self, id: PointId, p: Point) {
        assert!(!self.contains(id), "duplicate point id {id}");
        self.next_id = self.next_id.max(id.0 + 1);
        self.entries.push((id, p));
    }

    pub fn contains(&self, id: PointId) -> bool {
        self.entries.iter().any(|(i, _)| *i == id)
    }

    pub fn get(&self, id: PointId) -> Option<Point> {
        self.entries.iter().find(|(i, _)| *i == id).map(|(_, p)| *p)
    }

    /// Removes the point with the given id, keeping the order of the rest.
    pub fn remove(&mut self, id: PointId) -> Option<Point> {
        let index = self.entries.iter().position(|(i, _)| *i == id)?;
        Some(self.entries.remove(index).1)
    }

    /// Removes the `index`-th point in iteration order.
    pub fn remove_at(&mut self, index: usize) -> (PointId, Point) {
        self.entries.remove(index)
    }

    /// The `index`-th entry in iteration order.
    pub fn entry(&self, index: usize) -> (PointId, Point) {
        self.entries[index]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &(PointId, Point)> + '_ {
        self.entries.iter()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = Point> + '_ {
        self.entries.iter().map(|(_, p)| *p)
    }

    pub fn ids(&self) -> impl ExactSizeIterator<Item = PointId> + '_ {
        self.entries.iter().map(|(id, _)| *id)
    }

    /// Same set of ids, regardless of order.
    pub fn same_members(&self, other: &Configuration) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut a: Vec<PointId> = self.ids().collect();
        let mut b: Vec<PointId> = other.ids().collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }

    /// Every id of `self` is also in `other`.
    pub fn is_subset_of(&self, other: &Configuration) -> bool {
        self.ids().all(|id| other.contains(id))
    }

    /// Smallest axis-aligned rectangle containing every disk of radius `r`
    /// about the points, or `None` for an empty configuration.
    pub fn inflated_bounds(&self, r: f64) -> Option<Window> {
        let mut it = self.points();
        let first = it.next()?;
        let (mut x0, mut x1, mut y0, mut y1) = (first.x, first.x, first.y, first.y);
        for p in it {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        Some(Window::new_unchecked(x0 - r, x1 + r, y0 - r, y1 + r))
    }
}

impl FromIterator<Point> for Configuration {
    fn from_iter<I: IntoIterator<Item = Point>>(iter: I) -> Self {
        Self::from_points(iter)
    }
}

/// Number of points of `config` in the closed disk of radius `r` about `p`.
#[inline]
pub fn count_within(config: &Configuration, p: &Point, r: f64) -> usize {
    let r2 = r * r;
    config
        .entries
        .iter()
        .filter(|(_, q)| q.distance_squared(p) <= r2)
        .count()
}

/// Is any point of `config` in the closed disk of radius `r` about `p`?
#[inline]
pub fn any_within(config: &Configuration, p: &Point, r: f64) -> bool {
    let r2 = r * r;
    config.entries.iter().any(|(_, q)| q.distance_squared(p) <= r2)
}

/// Uniform point on the closed disk of radius `r` about `center`.
#[inline]
pub fn sample_uniform_in_disk(center: &Point, r: f64, rng: &mut RandomSource) -> Point {
    let rho = r * rng.uniform().sqrt();
    let theta = 2.0 * PI * rng.uniform();
    let (s, c) = theta.sin_cos();
    Point::new(center.x + rho * c, center.y + rho * s)
}

/// Proposal for a point uniform over the union of `r`-disks about `config`.
///
/// Picks a point uniformly, draws uniformly in its disk and reports how many
/// disks cover the draw. Accepting the draw with probability
/// `1 / cover_count` leaves it uniform over the union.
pub fn sample_point_near(
    config: &Configuration,
    r: f64,
    rng: &mut RandomSource,
) -> Result<(Point, usize)> {
    if config.is_empty() {
        return Err(Error::EmptyConfiguration);
    }
    let (_, centre) = config.entry(rng.index(config.len()));
    let p = sample_uniform_in_disk(&centre, r, rng);
    let k = count_within(config, &p, r).max(1);
    Ok((p, k))
}

/// Monte Carlo estimate of the union area and of the area covered exactly
/// `k` times, for `k = 1..=#config`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageProfile {
    pub total_area: f64,
    /// `layer_areas[k - 1]` is the area covered by exactly `k` disks.
    pub layer_areas: Vec<f64>,
    pub samples_used: u64,
    /// Area of the rectangle the samples were drawn from.
    pub sampling_area: f64,
    /// `multiplicity_counts[k]`: number of samples covered exactly `k` times.
    pub multiplicity_counts: Vec<u64>,
}

impl CoverageProfile {
    fn empty() -> Self {
        Self {
            total_area: 0.0,
            layer_areas: Vec::new(),
            samples_used: 0,
            sampling_area: 0.0,
            multiplicity_counts: vec![0],
        }
    }

    /// Area covered exactly `k` times; zero outside the stored range.
    pub fn layer(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.layer_areas.get(k - 1).copied().unwrap_or(0.0)
    }

    /// Monte Carlo estimate of `E[g(K)] * sampling_area` with its standard
    /// error, where `K` is the coverage multiplicity of a sample point.
    pub fn weighted<F: Fn(usize) -> f64>(&self, g: F) -> (f64, f64) {
        let n = self.samples_used as f64;
        if self.samples_used == 0 {
            return (0.0, 0.0);
        }
        let (mut s1, mut s2) = (0.0, 0.0);
        for (k, &c) in self.multiplicity_counts.iter().enumerate() {
            let v = g(k);
            s1 += c as f64 * v;
            s2 += c as f64 * v * v;
        }
        let mean = s1 / n;
        let var = (s2 / n - mean * mean).max(0.0);
        (mean * self.sampling_area, self.sampling_area * (var / n).sqrt())
    }

    pub fn total_area_std_error(&self) -> f64 {
        self.weighted(|k| if k >= 1 { 1.0 } else { 0.0 }).1
    }

    pub fn layer_std_error(&self, k: usize) -> f64 {
        self.weighted(|j| if j == k { 1.0 } else { 0.0 }).1
    }

    /// Estimate of `sum_k k * A_k`, which equals `pi r^2 #config` exactly.
    pub fn multiplicity_sum(&self) -> (f64, f64) {
        self.weighted(|k| k as f64)
    }
}

/// Monte Carlo coverage profile over the bounding box of `config` inflated
/// by `r`.
pub fn coverage_profile(
    config: &Configuration,
    r: f64,
    n_samples: u64,
    rng: &mut RandomSource,
) -> CoverageProfile {
    match config.inflated_bounds(r) {
        None => CoverageProfile::empty(),
        Some(bounds) => coverage_profile_in(config, r, &bounds, n_samples, rng),
    }
}

/// Coverage profile using samples drawn from an explicit rectangle, which
/// must contain every disk for the estimate to be unbiased.
pub fn coverage_profile_in(
    config: &Configuration,
    r: f64,
    bounds: &Window,
    n_samples: u64,
    rng: &mut RandomSource,
) -> CoverageProfile {
    let n = config.len();
    let mut counts = vec![0u64; n + 1];
    for _ in 0..n_samples {
        let p = bounds.sample_uniform(rng);
        counts[count_within(config, &p, r)] += 1;
    }
    let area = bounds.area();
    let per_sample = if n_samples == 0 { 0.0 } else { area / n_samples as f64 };
    let layer_areas: Vec<f64> = counts[1..].iter().map(|&c| c as f64 * per_sample).collect();
    CoverageProfile {
        total_area: layer_areas.iter().sum(),
        layer_areas,
        samples_used: n_samples,
        sampling_area: area,
        multiplicity_counts: counts,
    }
}

/// Area of the intersection of two disks of radius `r` whose centres are
/// `d` apart.
pub fn lens_area(d: f64, r: f64) -> f64 {
    if d >= 2.0 * r {
        return 0.0;
    }
    let d = d.max(0.0);
    2.0 * r * r * (d / (2.0 * r)).acos() - 0.5 * d * (4.0 * r * r - d * d).sqrt()
}

/// Area of the union of two disks of radius `r` whose centres are `d` apart.
pub fn two_disk_union_area(d: f64, r: f64) -> f64 {
    2.0 * PI * r * r - lens_area(d, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(points: &[(f64, f64)]) -> Configuration {
        points.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&Point::new(0.0, 0.0), &Point::new(3.0, 4.0)), 5.0);
        assert_eq!(distance(&Point::new(1.0, 1.0), &Point::new(1.0, 1.0)), 0.0);
        assert_eq!(distance(&Point::new(0.0, 0.0), &Point::new(1.0, 0.0)), 1.0);
    }

    #[test]
    fn count_within_examples() {
        let c = config(&[(0.0, 0.0)]);
        assert_eq!(count_within(&c, &Point::new(0.5, 0.0), 1.0), 1);
        assert_eq!(count_within(&c, &Point::new(2.0, 0.0), 1.0), 0);
        let c = config(&[(0.0, 0.0), (0.5, 0.0)]);
        assert_eq!(count_within(&c, &Point::new(0.25, 0.0), 1.0), 2);
    }

    #[test]
    fn count_within_is_closed() {
        let c = config(&[(0.0, 0.0)]);
        assert_eq!(count_within(&c, &Point::new(1.0, 0.0), 1.0), 1);
        assert!(any_within(&c, &Point::new(0.0, 1.0), 1.0));
    }

    #[test]
    fn configuration_ids_and_order() {
        let mut c = Configuration::new();
        let a = c.insert(Point::new(0.0, 0.0));
        let b = c.insert(Point::new(1.0, 0.0));
        let d = c.insert(Point::new(2.0, 0.0));
        assert_eq!(c.remove(b), Some(Point::new(1.0, 0.0)));
        assert_eq!(c.ids().collect::<Vec<_>>(), vec![a, d]);
        let e = c.insert(Point::new(3.0, 0.0));
        assert!(e > d, "ids are never reused");
        assert_eq!(c.remove(b), None);
    }

    #[test]
    #[should_panic(expected = "duplicate point id")]
    fn duplicate_id_panics() {
        let mut c = Configuration::new();
        c.insert_with_id(PointId(4), Point::ORIGIN);
        c.insert_with_id(PointId(4), Point::ORIGIN);
    }

    #[test]
    fn disk_samples_stay_in_support() {
        let mut rng = RandomSource::new(1);
        let centre = Point::new(2.0, -1.0);
        for _ in 0..10_000 {
            let p = sample_uniform_in_disk(&centre, 0.7, &mut rng);
            assert!(distance(&centre, &p) <= 0.7 + 1e-12);
        }
    }

    #[test]
    fn disk_radial_law() {
        // density 2a on [0,1]: mean 2/3, P(a <= 1/2) = 1/4
        let mut rng = RandomSource::new(2);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let mut inside = 0u64;
        for _ in 0..n {
            let a = distance(&Point::ORIGIN, &sample_uniform_in_disk(&Point::ORIGIN, 1.0, &mut rng));
            sum += a;
            sum2 += a * a;
            if a <= 0.5 {
                inside += 1;
            }
        }
        let nf = n as f64;
        let mean = sum / nf;
        let se = ((sum2 / nf - mean * mean) / nf).sqrt();
        assert!((mean - 2.0 / 3.0).abs() <= 3.0 * se, "mean {mean} se {se}");
        let p = inside as f64 / nf;
        let se_p = (0.25 * 0.75 / nf).sqrt();
        assert!((p - 0.25).abs() <= 3.0 * se_p, "p {p}");
    }

    #[test]
    fn empty_coverage() {
        let mut rng = RandomSource::new(0);
        let prof = coverage_profile(&Configuration::new(), 1.0, 100, &mut rng);
        assert_eq!(prof.total_area, 0.0);
        assert!(prof.layer_areas.is_empty());
    }

    #[test]
    fn single_disk_coverage() {
        let mut rng = RandomSource::new(4);
        let prof = coverage_profile(&config(&[(0.3, 0.2)]), 1.0, 200_000, &mut rng);
        assert_eq!(prof.layer_areas.len(), 1);
        assert!((prof.total_area - PI).abs() <= 3.0 * prof.total_area_std_error());
        assert_eq!(prof.layer_areas[0], prof.total_area);
    }

    #[test]
    fn disjoint_pair_coverage() {
        let mut rng = RandomSource::new(5);
        let prof = coverage_profile(&config(&[(0.0, 0.0), (2.5, 0.0)]), 1.0, 200_000, &mut rng);
        assert!((prof.total_area - 2.0 * PI).abs() <= 3.0 * prof.total_area_std_error());
        assert_eq!(prof.layer_areas[1], 0.0);
    }

    #[test]
    fn lens_pair_coverage() {
        // union 2pi - (2pi/3 - sqrt3/2) = 5.054815, double layer = lens = 1.228370
        let lens = 2.0 * PI / 3.0 - 3f64.sqrt() / 2.0;
        assert!((lens_area(1.0, 1.0) - lens).abs() < 1e-12);
        assert!((two_disk_union_area(1.0, 1.0) - 5.054815).abs() < 1e-6);
        assert!((lens - 1.228370).abs() < 1e-6);
        let mut rng = RandomSource::new(6);
        let prof = coverage_profile(&config(&[(0.0, 0.0), (1.0, 0.0)]), 1.0, 400_000, &mut rng);
        assert!((prof.total_area - 5.054815).abs() <= 3.0 * prof.total_area_std_error());
        assert!((prof.layer(1) - 3.826446).abs() <= 3.0 * prof.layer_std_error(1));
        assert!((prof.layer(2) - 1.228370).abs() <= 3.0 * prof.layer_std_error(2));
    }

    #[test]
    fn lens_limits() {
        assert!((lens_area(0.0, 1.0) - PI).abs() < 1e-12);
        assert_eq!(lens_area(2.0, 1.0), 0.0);
        assert_eq!(lens_area(3.0, 1.0), 0.0);
    }

    #[test]
    fn sample_near_empty_is_error() {
        let mut rng = RandomSource::new(0);
        assert_eq!(
            sample_point_near(&Configuration::new(), 1.0, &mut rng),
            Err(Error::EmptyConfiguration)
        );
    }

    #[test]
    fn sample_near_cover_counts() {
        let mut rng = RandomSource::new(8);
        let single = config(&[(1.0, 1.0)]);
        let disjoint = config(&[(0.0, 0.0), (2.0, 0.0)]);
        for _ in 0..10_000 {
            assert_eq!(sample_point_near(&single, 1.0, &mut rng).unwrap().1, 1);
            // Tangent disks share a single boundary point, hit with probability 0.
            assert_eq!(sample_point_near(&disjoint, 1.0, &mut rng).unwrap().1, 1);
        }
    }
}
