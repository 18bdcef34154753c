//! Classical goodness-of-fit and comparison tests.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ExactSum;
use crate::special::{chi_square_sf, kolmogorov_sf};
use crate::{Error, Result};

/// Expected count below which neighbouring chi-square bins are pooled.
const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
    /// Degrees of freedom, for chi-square tests.
    pub dof: Option<f64>,
}

/// Pearson chi-square test of `observed` counts against cell probabilities.
///
/// The last cell is the upper tail and `probabilities` should sum to 1.
/// Cells are pooled left to right until each expects at least 5; a short
/// remainder joins the last pool.
pub fn chi_square_gof(observed: &[u64], probabilities: &[f64]) -> Result<TestOutcome> {
    if observed.len() != probabilities.len() || observed.is_empty() {
        return Err(Error::InvalidConfig("observed and expected cells differ in number".into()));
    }
    let total = observed.iter().sum::<u64>() as f64;
    let mut pools: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probabilities) {
        obs += o as f64;
        exp += p * total;
        if exp >= MIN_EXPECTED {
            pools.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match pools.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => pools.push((obs, exp)),
        }
    }
    if pools.len() < 2 {
        return Err(Error::TooFewSamples { min: 2, got: pools.len() });
    }
    let statistic: ExactSum = pools.iter().map(|&(o, e)| (o - e) * (o - e) / e).collect();
    let statistic = statistic.value();
    let dof = (pools.len() - 1) as f64;
    Ok(TestOutcome { statistic, p_value: chi_square_sf(statistic, dof), dof: Some(dof) })
}

/// `P(N = k) = p (1−p)^{k−1}` for `k = 1..cells−1`, then the tail `P(N ≥ cells)`.
pub fn geometric_probabilities(p: f64, cells: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(cells);
    let mut tail = 1.0;
    for _ in 1..cells {
        let mass = tail * p;
        out.push(mass);
        tail -= mass;
    }
    out.push(tail.max(0.0));
    out
}

/// One-sample Kolmogorov–Smirnov test against a continuous `cdf`.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<TestOutcome> {
    if samples.is_empty() {
        return Err(Error::TooFewSamples { min: 1, got: 0 });
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(TestOutcome { statistic: d, p_value: kolmogorov_sf(d, xs.len()), dof: None })
}

/// Sample mean and its standard error.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().copied().collect::<ExactSum>().value() / m;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).collect::<ExactSum>().value() / (m - 1.0);
    (mean, libm::sqrt(var / m))
}

/// Welch z-statistic for equal means of two independent samples.
pub fn two_sample_z(a: &[f64], b: &[f64]) -> f64 {
    let (ma, sa) = mean_and_stderr(a);
    let (mb, sb) = mean_and_stderr(b);
    let se = libm::sqrt(sa * sa + sb * sb);
    if se == 0.0 {
        return if ma == mb { 0.0 } else { f64::INFINITY };
    }
    (ma - mb) / se
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{RngStream, StreamKind};

    #[test]
    fn chi_square_reference_value() {
        // scipy.stats.chisquare([16, 18, 16, 14, 12, 12], [16, 16, 16, 16, 16, 8])
        let obs = [16, 18, 16, 14, 12, 12];
        let probs = [16.0 / 88.0, 16.0 / 88.0, 16.0 / 88.0, 16.0 / 88.0, 16.0 / 88.0, 8.0 / 88.0];
        let t = chi_square_gof(&obs, &probs).unwrap();
        assert!((t.statistic - 3.5).abs() < 1e-12);
        assert!((t.p_value - 0.6233876277495822).abs() < 1e-9);
        assert_eq!(t.dof, Some(5.0));
    }

    #[test]
    fn sparse_cells_are_pooled() {
        let probs = geometric_probabilities(0.5, 12);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let obs = [50, 25, 12, 7, 3, 2, 1, 0, 0, 0, 0, 0];
        let t = chi_square_gof(&obs, &probs).unwrap();
        // expected 50, 25, 12.5, 6.25, then 6.25 pooled across the tail
        assert_eq!(t.dof, Some(4.0));
        assert!(t.p_value > 0.9);
    }

    #[test]
    fn ks_detects_wrong_rate() {
        let mut rng = RngStream::new(3, StreamKind::Synthetic, 0);
        let xs: Vec<f64> = (0..5000).map(|_| rng.exp1()).collect();
        let good = ks_test(&xs, |x| 1.0 - libm::exp(-x)).unwrap();
        assert!(good.p_value > 1e-3);
        let bad = ks_test(&xs, |x| 1.0 - libm::exp(-1.2 * x)).unwrap();
        assert!(bad.p_value < 1e-6);
    }

    #[test]
    fn ks_reference_value() {
        // scipy.stats.kstest([0.1, 0.4, 0.7], 'uniform') → D = 0.3, exact p = 0.886
        let t = ks_test(&[0.1, 0.4, 0.7], |x| x).unwrap();
        assert!((t.statistic - 0.3).abs() < 1e-12);
        assert!(t.p_value > 0.8);
    }

    #[test]
    fn two_sample_z_is_zero_for_identical_samples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(two_sample_z(&a, &a), 0.0);
        let b = [2.0, 3.0, 4.0, 5.0];
        assert!(two_sample_z(&a, &b) < 0.0);
    }
}
