//! Exact first and second moments of walk functionals at finite horizons.
//!
//! These give the finite-`n` targets that Monte Carlo estimates are compared
//! against, and hence the finite-`n` bias relative to the limit theorems.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{abs_square_recursion, running_product, square_recursion};

/// `E X`, `E|X|²` and `E X²` of a complex random variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexMoments {
    pub mean: Complex64,
    pub abs_second: f64,
    pub second: Complex64,
}

impl ComplexMoments {
    /// Moments of `s·X` for real `s`.
    pub fn scaled(self, s: f64) -> Self {
        Self { mean: self.mean * s, abs_second: self.abs_second * s * s, second: self.second * s * s }
    }

    /// Covariance matrix of `(Re X, Im X)`.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let m = self.mean;
        let var_re = 0.5 * (self.abs_second + self.second.re) - m.re * m.re;
        let var_im = 0.5 * (self.abs_second - self.second.re) - m.im * m.im;
        let cov = 0.5 * self.second.im - m.re * m.im;
        [[var_re, cov], [cov, var_im]]
    }
}

/// Moments of `S_n`: `(a_n, u_n, q_n)`.
pub fn endpoint_moments(phi1: Complex64, phi2: Complex64, n: u64) -> ComplexMoments {
    let i = n as usize - 1;
    ComplexMoments {
        mean: running_product(phi1, n)[i],
        abs_second: abs_square_recursion(phi1, n)[i],
        second: square_recursion(phi1, phi2, n)[i],
    }
}

/// Moments of `D = S_n − (n/N)^{Φ_1} S_N` for `n ≤ N`.
///
/// Uses `E(S_N | F_n) = (a_N / a_n) S_n`, so only the one-time moment
/// sequences are needed.
pub fn residual_moments(phi1: Complex64, phi2: Complex64, n: u64, big_n: u64) -> ComplexMoments {
    assert!(n >= 1 && n <= big_n, "need 1 ≤ n ≤ N");
    let a = running_product(phi1, big_n);
    let u = abs_square_recursion(phi1, big_n);
    let q = square_recursion(phi1, phi2, big_n);
    let (i, j) = (n as usize - 1, big_n as usize - 1);
    let c = (phi1 * libm::log(n as f64 / big_n as f64)).exp();
    let r = a[j] / a[i];
    ComplexMoments {
        mean: a[i] - c * a[j],
        abs_second: u[i] - 2.0 * (c * r).re * u[i] + c.norm_sqr() * u[j],
        second: q[i] - 2.0 * c * r * q[i] + c * c * q[j],
    }
}
