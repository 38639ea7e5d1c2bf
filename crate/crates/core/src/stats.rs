//! Small statistical helpers shared by the samplers, the verification
//! report and the test suites.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
}

impl MeanEstimate {
    /// Is `target` within `sigmas` standard errors of the mean?
    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.std_error
    }
}

/// Streaming mean and variance (Welford).
#[derive(Debug, Clone, Default)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn estimate(&self) -> MeanEstimate {
        MeanEstimate {
            mean: self.mean(),
            std_error: (self.variance() / self.n.max(1) as f64).sqrt(),
            n: self.n,
        }
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Clamp so the interval always contains p despite rounding at p = 0 or 1.
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Outcome of a chi-square test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquareTest {
    fn from_statistic(statistic: f64, dof: usize) -> Self {
        let p_value = if dof == 0 {
            1.0
        } else {
            let dist = ChiSquared::new(dof as f64).expect("positive dof");
            1.0 - dist.cdf(statistic)
        };
        Self {
            statistic,
            dof,
            p_value,
        }
    }

    /// Not rejected at significance level `alpha`.
    pub fn accepts(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

/// Goodness of fit of observed counts against expected counts.
///
/// Adjacent bins are pooled left to right until each pooled bin expects at
/// least 5 observations; a short remainder is folded into the last bin.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> ChiSquareTest {
    assert_eq!(observed.len(), expected.len());
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&ob, &ex) in observed.iter().zip(expected) {
        o += ob as f64;
        e += ex;
        if e >= 5.0 {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => bins.push((o, e)),
        }
    }
    let statistic = bins
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    ChiSquareTest::from_statistic(statistic, bins.len().saturating_sub(1))
}

/// Two-sample chi-square homogeneity test on two histograms over the same
/// bins. Bins are pooled left to right until the pooled bin holds at least
/// 10 observations across both samples.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> ChiSquareTest {
    let len = a.len().max(b.len());
    let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0) as f64;
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut ca, mut cb) = (0.0, 0.0);
    for i in 0..len {
        ca += get(a, i);
        cb += get(b, i);
        if ca + cb >= 10.0 {
            bins.push((ca, cb));
            ca = 0.0;
            cb = 0.0;
        }
    }
    if ca + cb > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += ca;
                last.1 += cb;
            }
            None => bins.push((ca, cb)),
        }
    }
    let na: f64 = bins.iter().map(|b| b.0).sum();
    let nb: f64 = bins.iter().map(|b| b.1).sum();
    if na == 0.0 || nb == 0.0 {
        return ChiSquareTest::from_statistic(0.0, 0);
    }
    let ka = (nb / na).sqrt();
    let kb = (na / nb).sqrt();
    let statistic = bins
        .iter()
        .map(|&(x, y)| {
            let d = ka * x - kb * y;
            d * d / (x + y)
        })
        .sum();
    ChiSquareTest::from_statistic(statistic, bins.len().saturating_sub(1))
}

/// Histogram of non-negative integer values, `hist[k]` = number of `k`s.
pub fn histogram<I: IntoIterator<Item = usize>>(values: I) -> Vec<u64> {
    let mut hist = Vec::new();
    for v in values {
        if v >= hist.len() {
            hist.resize(v + 1, 0);
        }
        hist[v] += 1;
    }
    hist
}

/// Kolmogorov-Smirnov test of `samples` against Uniform(lo, hi).
/// Returns the statistic and an asymptotic p-value.
pub fn ks_uniform(samples: &[f64], lo: f64, hi: f64) -> (f64, f64) {
    let mut xs: Vec<f64> = samples.iter().map(|x| (x - lo) / (hi - lo)).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let hi_gap = (i + 1) as f64 / n - x;
            let lo_gap = x - i as f64 / n;
            hi_gap.max(lo_gap)
        })
        .fold(0.0, f64::max);
    (d, kolmogorov_survival((n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d))
}

fn kolmogorov_survival(t: f64) -> f64 {
    if t < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = 2.0 * (-1f64).powf(j - 1.0) * (-2.0 * j * j * t * t).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate() {
        for (s, n) in [(0, 10), (10, 10), (5, 10), (199, 200), (200, 200)] {
            let (lo, hi) = wilson_interval(s, n, Z_95);
            let p = s as f64 / n as f64;
            assert!(lo <= p && p <= hi, "{s}/{n}: [{lo}, {hi}]");
            assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        }
        // Textbook value: 200/200 gives a lower bound of about 0.9812.
        let (lo, hi) = wilson_interval(200, 200, Z_95);
        assert!((lo - 0.981_155).abs() < 1e-5, "{lo}");
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn gof_exact_fit_has_p_one() {
        let t = chi_square_gof(&[10, 20, 30], &[10.0, 20.0, 30.0]);
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.dof, 2);
        assert!((t.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gof_detects_gross_mismatch() {
        let t = chi_square_gof(&[100, 0], &[50.0, 50.0]);
        assert!(t.p_value < 1e-10);
    }

    #[test]
    fn two_sample_identical_histograms() {
        let t = chi_square_two_sample(&[5, 10, 20, 10], &[5, 10, 20, 10]);
        assert_eq!(t.statistic, 0.0);
        let t = chi_square_two_sample(&[100, 0], &[0, 100]);
        assert!(t.p_value < 1e-10);
    }

    #[test]
    fn histogram_counts() {
        assert_eq!(histogram([0, 2, 2, 1]), vec![1, 1, 2]);
        assert!(histogram(std::iter::empty()).is_empty());
    }

    #[test]
    fn ks_on_grid_is_accepted() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let (d, p) = ks_uniform(&xs, 0.0, 1.0);
        assert!(d < 1e-3 + 1e-12);
        assert!(p > 0.99);
        let skewed: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!(ks_uniform(&skewed, 0.0, 1.0).1 < 1e-6);
    }

    #[test]
    fn running_stats_matches_direct() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        let s: RunningStats = xs.iter().copied().collect();
        assert_eq!(s.mean(), 3.5);
        assert!((s.variance() - 7.0).abs() < 1e-12);
    }
}
