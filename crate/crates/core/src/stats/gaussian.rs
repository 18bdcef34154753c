//! Complex-Gaussian fit: mean, covariance, component normality and the
//! characteristic function on a fixed grid.

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexSampleStats, ExactSum};
use crate::special::{normal_cdf, normal_quantile, normal_sf};
use crate::{Error, Result};

/// Smallest sample accepted by [`gaussian_fit`].
pub const MIN_FIT_SAMPLES: usize = 1000;

/// Radii (in target standard deviations) and directions of the
/// characteristic-function grid.
const CHARFN_RADII: [f64; 3] = [0.5, 1.0, 2.0];
const CHARFN_DIRECTIONS: usize = 4;

/// Bivariate normal law of `(Re Z, Im Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTarget {
    pub mean: Complex64,
    pub cov: [[f64; 2]; 2],
}

impl GaussianTarget {
    /// `𝒩_ℂ(0, σ²)`: independent components of variance `σ²/2`.
    pub fn circular(sigma_squared: f64) -> Self {
        let v = sigma_squared / 2.0;
        Self { mean: Complex64::new(0.0, 0.0), cov: [[v, 0.0], [0.0, v]] }
    }

    /// `E e^{i(λ Re Z + μ Im Z)}`.
    pub fn characteristic_function(&self, lambda: f64, mu: f64) -> Complex64 {
        let [[a, b], [_, d]] = self.cov;
        let quad = lambda * lambda * a + 2.0 * lambda * mu * b + mu * mu * d;
        let phase = lambda * self.mean.re + mu * self.mean.im;
        Complex64::from_polar(libm::exp(-quad / 2.0), phase)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianFitReport {
    pub samples: usize,
    pub target: GaussianTarget,
    pub mean_emp: Complex64,
    /// Standardized deviations of the component means.
    pub mean_z: [f64; 2],
    pub cov_emp: [[f64; 2]; 2],
    pub cov_target: [[f64; 2]; 2],
    /// Standardized deviations of `(Var Re, Var Im, Cov)`.
    pub cov_z: [f64; 3],
    /// Anderson–Darling p-values of the real and imaginary parts.
    pub component_normality_pvalues: [f64; 2],
    /// Largest standardized deviation of the empirical characteristic function.
    pub charfn_max_z: f64,
    pub charfn_passed: bool,
    pub alpha: f64,
    pub z_crit: f64,
    pub passed: bool,
}

/// Fit against `𝒩_ℂ(0, σ²)`.
pub fn gaussian_fit(samples: &[Complex64], sigma_squared: f64, alpha: f64) -> Result<GaussianFitReport> {
    if !(sigma_squared > 0.0) {
        return Err(Error::InvalidConfig("σ² must be positive".into()));
    }
    gaussian_fit_target(samples, &GaussianTarget::circular(sigma_squared), alpha)
}

/// Fit against an arbitrary bivariate normal target.
///
/// Means and covariance entries pass when within `z_crit = Φ^{-1}(1 − α/2)`
/// asymptotic standard errors (computed under the target); each component
/// must also pass an Anderson–Darling test at level `α`.
pub fn gaussian_fit_target(samples: &[Complex64], target: &GaussianTarget, alpha: f64) -> Result<GaussianFitReport> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples { min: MIN_FIT_SAMPLES, got: samples.len() });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig("alpha must lie in (0, 1)".into()));
    }
    let m = samples.len() as f64;
    let st = ComplexSampleStats::from_samples(samples);
    let z_crit = normal_quantile(1.0 - alpha / 2.0);
    let [[a, b], [_, d]] = target.cov;

    let mean_z = [
        (st.mean.re - target.mean.re) / libm::sqrt(a / m),
        (st.mean.im - target.mean.im) / libm::sqrt(d / m),
    ];
    let se_var = |v: f64| libm::sqrt(2.0 / m) * v;
    let se_cov = libm::sqrt((a * d + b * b) / m);
    let cov_z = [
        (st.cov[0][0] - a) / se_var(a),
        (st.cov[1][1] - d) / se_var(d),
        (st.cov[0][1] - b) / se_cov,
    ];

    let re: Vec<f64> = samples.iter().map(|z| z.re).collect();
    let im: Vec<f64> = samples.iter().map(|z| z.im).collect();
    let p_re = anderson_darling_normal(&re).1;
    let p_im = anderson_darling_normal(&im).1;

    let charfn_max_z = charfn_deviation(samples, target);
    let grid = (CHARFN_RADII.len() * CHARFN_DIRECTIONS * 2) as f64;
    let charfn_passed = charfn_max_z < normal_quantile(1.0 - alpha / (2.0 * grid));

    let passed = mean_z.iter().all(|z| z.abs() < z_crit)
        && cov_z.iter().all(|z| z.abs() < z_crit)
        && p_re > alpha
        && p_im > alpha;
    Ok(GaussianFitReport {
        samples: samples.len(),
        target: *target,
        mean_emp: st.mean,
        mean_z,
        cov_emp: st.cov,
        cov_target: target.cov,
        cov_z,
        component_normality_pvalues: [p_re, p_im],
        charfn_max_z,
        charfn_passed,
        alpha,
        z_crit,
        passed,
    })
}

/// Max over the grid and over real/imaginary parts of
/// `|φ̂(λ, μ) − φ(λ, μ)| / se`.
fn charfn_deviation(samples: &[Complex64], target: &GaussianTarget) -> f64 {
    let m = samples.len() as f64;
    let scale = libm::sqrt((target.cov[0][0] + target.cov[1][1]) / 2.0);
    let mut worst: f64 = 0.0;
    for &r in &CHARFN_RADII {
        for j in 0..CHARFN_DIRECTIONS {
            let angle = core::f64::consts::PI * j as f64 / CHARFN_DIRECTIONS as f64;
            let (lambda, mu) = (r / scale * libm::cos(angle), r / scale * libm::sin(angle));
            let cos_sum: ExactSum = samples.iter().map(|z| libm::cos(lambda * z.re + mu * z.im)).collect();
            let sin_sum: ExactSum = samples.iter().map(|z| libm::sin(lambda * z.re + mu * z.im)).collect();
            let phi = target.characteristic_function(lambda, mu);
            let phi2 = target.characteristic_function(2.0 * lambda, 2.0 * mu);
            let var_cos = ((1.0 + phi2.re) / 2.0 - phi.re * phi.re).max(1e-300);
            let var_sin = ((1.0 - phi2.re) / 2.0 - phi.im * phi.im).max(1e-300);
            let z_cos = (cos_sum.value() / m - phi.re) / libm::sqrt(var_cos / m);
            let z_sin = (sin_sum.value() / m - phi.im) / libm::sqrt(var_sin / m);
            worst = worst.max(z_cos.abs()).max(z_sin.abs());
        }
    }
    worst
}

/// Anderson–Darling test of normality with estimated mean and variance.
///
/// Returns the unadjusted statistic `A²` and the p-value of the
/// small-sample adjusted `A*² = A²(1 + 0.75/n + 2.25/n²)` from the
/// D'Agostino–Stephens approximation.
pub fn anderson_darling_normal(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let nf = n as f64;
    let mean = xs.iter().copied().collect::<ExactSum>().value() / nf;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).collect::<ExactSum>().value() / (nf - 1.0);
    let sd = libm::sqrt(var);
    let mut ys: Vec<f64> = xs.iter().map(|x| (x - mean) / sd).collect();
    ys.sort_by(f64::total_cmp);
    let mut s = ExactSum::new();
    for i in 0..n {
        let lower = libm::log(normal_cdf(ys[i]));
        let upper = libm::log(normal_sf(ys[n - 1 - i]));
        s.add((2 * i + 1) as f64 * (lower + upper));
    }
    let a2 = -nf - s.value() / nf;
    let a = a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
    let p = if a >= 0.6 {
        libm::exp(1.2937 - 5.709 * a + 0.0186 * a * a)
    } else if a >= 0.34 {
        libm::exp(0.9177 - 4.279 * a - 1.38 * a * a)
    } else if a >= 0.2 {
        1.0 - libm::exp(-8.318 + 42.796 * a - 59.938 * a * a)
    } else {
        1.0 - libm::exp(-13.436 + 101.14 * a - 223.73 * a * a)
    };
    (a2, p.clamp(0.0, 1.0))
}
