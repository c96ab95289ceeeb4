//! Estimators with standard errors, and the pass/fail rule.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Discrete, DiscreteCDF, Normal, Poisson};

/// Number of batches used for batch-means standard errors.
pub const BATCHES: usize = 50;

/// How a report decides pass/fail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tolerance {
    /// `|est − ref| ≤ k · max(se, floor)`
    Sigmas { k: f64, floor: f64 },
    Absolute { tol: f64 },
    Relative { tol: f64 },
    /// `est ≤ bound`
    AtMost { bound: f64 },
}

impl Tolerance {
    pub fn sigmas(k: f64) -> Tolerance {
        Tolerance::Sigmas { k, floor: 0.0 }
    }

    pub fn is_statistical(&self) -> bool {
        matches!(self, Tolerance::Sigmas { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatReport {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub reference: f64,
    pub z_score: f64,
    pub pass: bool,
    pub tolerance: Tolerance,
    pub runtime: f64,
}

impl StatReport {
    pub fn new(name: impl Into<String>, estimate: f64, std_error: f64, reference: f64, tolerance: Tolerance) -> StatReport {
        let diff = estimate - reference;
        let z_score = if std_error > 0.0 { diff / std_error } else if diff == 0.0 { 0.0 } else { f64::INFINITY.copysign(diff) };
        let pass = match tolerance {
            Tolerance::Sigmas { k, floor } => diff.abs() <= k * std_error.max(floor),
            Tolerance::Absolute { tol } => diff.abs() <= tol,
            Tolerance::Relative { tol } => diff.abs() <= tol * reference.abs(),
            Tolerance::AtMost { bound } => estimate <= bound,
        };
        StatReport {
            name: name.into(),
            estimate,
            std_error,
            reference,
            z_score,
            pass: pass && estimate.is_finite(),
            tolerance,
            runtime: 0.0,
        }
    }

    /// An exact check: reference is the expected value, error is the residual.
    pub fn exact(name: impl Into<String>, estimate: f64, reference: f64, tol: f64) -> StatReport {
        StatReport::new(name, estimate, 0.0, reference, Tolerance::Absolute { tol })
    }
}

/// Failures tolerated among `n` three-sigma tests: one per started hundred, none for
/// families smaller than twenty.
pub fn allowed_failures(n: usize) -> usize {
    if n < 20 {
        0
    } else {
        n.div_ceil(100)
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Split `0..len` into at most `BATCHES` contiguous nearly equal ranges.
fn batches(len: usize) -> Vec<std::ops::Range<usize>> {
    let b = BATCHES.min(len);
    (0..b).map(|i| (i * len / b)..((i + 1) * len / b)).collect()
}

/// Sample mean with a batch-means standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    assert!(xs.len() >= 2, "need at least two samples");
    let m = mean(xs);
    let means: Vec<f64> = batches(xs.len()).into_iter().map(|r| mean(&xs[r])).collect();
    (m, (variance(&means) / means.len() as f64).sqrt())
}

pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (mx, my) = (mean(xs), mean(ys));
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Covariance with a batch-means standard error.
pub fn covariance_se(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert!(xs.len() >= 4);
    let c = covariance(xs, ys);
    let covs: Vec<f64> = batches(xs.len())
        .into_iter()
        .map(|r| covariance(&xs[r.clone()], &ys[r]))
        .collect();
    (c, (variance(&covs) / covs.len() as f64).sqrt())
}

/// Pearson correlation; its standard error under independence is `1/√n`.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    covariance(xs, ys) / (variance(xs) * variance(ys)).sqrt()
}

pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    Poisson::new(lambda).expect("positive mean").pmf(k)
}

/// Total variation between the empirical law of `counts` and `Poisson(lambda)` on
/// `{0..=top}`, with all mass above `top` folded into the last bin.
pub fn poisson_tv(counts: &[u64], lambda: f64, top: u64) -> f64 {
    let dist = Poisson::new(lambda).expect("positive mean");
    let mut emp = vec![0.0; top as usize + 1];
    for &c in counts {
        emp[c.min(top) as usize] += 1.0;
    }
    let n = counts.len() as f64;
    (0..=top)
        .map(|k| {
            let p = if k == top { dist.sf(top - 1) } else { dist.pmf(k) };
            (emp[k as usize] / n - p).abs()
        })
        .sum::<f64>()
        / 2.0
}

/// Kolmogorov–Smirnov distance of a sample from the standard normal.
pub fn ks_normal(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let z = Normal::standard();
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = z.cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Least-squares slope of `ys` on `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    covariance(xs, ys) / variance(xs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn verdicts() {
        assert!(StatReport::new("a", 1.0, 0.1, 1.25, Tolerance::sigmas(3.0)).pass);
        assert!(!StatReport::new("a", 1.0, 0.1, 1.35, Tolerance::sigmas(3.0)).pass);
        assert!(StatReport::new("a", 1.0, 0.0, 1.05, Tolerance::Sigmas { k: 3.0, floor: 0.02 }).pass);
        assert!(StatReport::new("a", 3.9, 0.0, 4.0, Tolerance::Relative { tol: 0.05 }).pass);
        assert!(!StatReport::new("a", 3.7, 0.0, 4.0, Tolerance::Relative { tol: 0.05 }).pass);
        assert!(StatReport::new("a", 0.001, 0.0, 0.0, Tolerance::AtMost { bound: 0.002 }).pass);
        assert!(!StatReport::new("a", f64::NAN, 1.0, 0.0, Tolerance::sigmas(3.0)).pass);
        assert_eq!(StatReport::new("a", 2.0, 0.5, 1.0, Tolerance::sigmas(3.0)).z_score, 2.0);
        assert_eq!(allowed_failures(3), 0);
        assert_eq!(allowed_failures(60), 1);
        assert_eq!(allowed_failures(101), 2);
    }

    #[test]
    fn tv_of_exact_frequencies_is_small() {
        let lambda = 3.0;
        let mut counts = Vec::new();
        for k in 0..30u64 {
            let reps = (poisson_pmf(lambda, k) * 100_000.0).round() as usize;
            counts.extend(std::iter::repeat_n(k, reps));
        }
        assert!(poisson_tv(&counts, lambda, 20) < 1e-3);
        assert!(poisson_tv(&vec![0; 100], lambda, 20) > 0.9);
    }

    #[test]
    fn standard_errors_are_calibrated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut zs = Vec::new();
        for _ in 0..200 {
            let x: Vec<f64> = (0..1000).map(|_| StandardNormal.sample(&mut rng)).collect();
            let y: Vec<f64> = x.iter().map(|&a| 0.5 * a + rng.random::<f64>()).collect();
            let (m, se) = mean_se(&x);
            zs.push(m / se);
            let (c, cse) = covariance_se(&x, &y);
            zs.push((c - 0.5) / cse);
        }
        let v = variance(&zs);
        assert!((v - 1.0).abs() < 0.2, "{v}");
    }

    #[test]
    fn ks_detects_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x: Vec<f64> = (0..5000).map(|_| StandardNormal.sample(&mut rng)).collect();
        assert!(ks_normal(&x) < 0.03);
        let y: Vec<f64> = x.iter().map(|a| a + 0.3).collect();
        assert!(ks_normal(&y) > 0.08);
    }

    proptest! {
        #[test]
        fn slope_recovers_lines(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
            let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            prop_assert!((slope(&xs, &ys) - a).abs() < 1e-9);
        }

        #[test]
        fn tv_is_a_distance(counts in proptest::collection::vec(0u64..40, 1..200), lambda in 0.1f64..10.0) {
            let tv = poisson_tv(&counts, lambda, 20);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&tv));
        }
    }
}
