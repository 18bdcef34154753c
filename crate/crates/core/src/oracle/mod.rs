//! Exact, simulation-free moment computations.
//!
//! Everything here is a deterministic function of the Fourier coefficients
//! `Φ_k`. The running products and recursions are exact up to rounding and
//! serve as the reference values for the Monte Carlo checks in [`crate::stats`].

mod enumerate;
mod finite;
mod limits;

pub use enumerate::{enumerate_exact, enumerate_exact_power, ExactDistribution, MAX_ENUMERATION_N};
pub use finite::{endpoint_moments, residual_moments, ComplexMoments};
pub use limits::{continuous_moments, w_moments, ContinuousMoments, WMoments};

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::gamma_ratio;
use crate::{Error, Result};

/// Largest `n` at which `normalizer_a` insists on Gamma-ratio agreement.
pub const GAMMA_CHECK_MAX_N: u64 = 100_000;
/// Relative agreement required between running product and Gamma ratio.
pub const GAMMA_CHECK_TOLERANCE: f64 = 1e-8;

/// `a_m = Π_{j<m} (1 + φ/j)` for `m = 1..n`, without any pole check.
pub fn running_product(phi: Complex64, n: u64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n as usize);
    let mut a = Complex64::new(1.0, 0.0);
    for j in 1..=n {
        out.push(a);
        a *= 1.0 + phi / j as f64;
    }
    out
}

/// Martingale normalizer with its Gamma-function cross-check at the last index.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    /// `a_1, …, a_n`
    pub values: Vec<Complex64>,
    /// `Γ(n + φ) / (Γ(n) Γ(1 + φ))`
    pub gamma_ratio: Complex64,
    pub relative_error: f64,
}

pub fn normalizer_a(phi: Complex64, n: u64) -> Result<Normalizer> {
    if n == 0 {
        return Err(Error::HorizonTooShort { min: 1, got: 0 });
    }
    if (phi + 1.0).norm() == 0.0 {
        return Err(Error::NormalizerPole);
    }
    let values = running_product(phi, n);
    let last = values[values.len() - 1];
    let gamma_ratio = gamma_ratio(phi, n);
    let relative_error = (last - gamma_ratio).norm() / last.norm();
    if n <= GAMMA_CHECK_MAX_N && !(relative_error <= GAMMA_CHECK_TOLERANCE) {
        return Err(Error::GammaMismatch(relative_error));
    }
    Ok(Normalizer { values, gamma_ratio, relative_error })
}

/// `u_m = E|S_m^{(k)}|²` for `m = 1..n`, driven by `φ = Φ_k`.
pub fn abs_square_recursion(phi: Complex64, n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize);
    let mut u = 1.0;
    for m in 1..=n {
        out.push(u);
        u = u * (1.0 + 2.0 * phi.re / m as f64) + 1.0;
    }
    out
}

/// `q_m = E(S_m²)` for `m = 1..n`.
pub fn square_recursion(phi1: Complex64, phi2: Complex64, n: u64) -> Vec<Complex64> {
    let a2 = running_product(phi2, n);
    let mut out = Vec::with_capacity(n as usize);
    let mut q = Complex64::new(1.0, 0.0);
    for m in 1..=n {
        out.push(q);
        let mf = m as f64;
        q = q * (1.0 + 2.0 * phi1 / mf) + phi2 / mf * a2[m as usize - 1];
    }
    out
}

/// `v_m = Σ_{j<m} 1/|a_{j+1}|²` for `m = 1..n`, from a running product.
pub fn bracket_normalizer(a: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len());
    let mut v = 0.0;
    out.push(v);
    for next in &a[1..] {
        v += 1.0 / next.norm_sqr();
        out.push(v);
    }
    out
}

/// Exact moment sequences for one law; index `m − 1` holds time `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub phi: Complex64,
    pub phi2: Complex64,
    pub a_seq: Vec<Complex64>,
    pub u_seq: Vec<f64>,
    pub q_seq: Vec<Complex64>,
    pub v_seq: Vec<f64>,
}

impl MomentTable {
    pub fn build(phi1: Complex64, phi2: Complex64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::HorizonTooShort { min: 1, got: 0 });
        }
        let a_seq = running_product(phi1, n);
        let v_seq = bracket_normalizer(&a_seq);
        Ok(Self {
            phi: phi1,
            phi2,
            u_seq: abs_square_recursion(phi1, n),
            q_seq: square_recursion(phi1, phi2, n),
            a_seq,
            v_seq,
        })
    }

    pub fn len(&self) -> usize {
        self.a_seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_seq.is_empty()
    }
}

/// `H_n = Σ_{j≤n} 1/j`, summed from the small terms up.
pub fn harmonic(n: u64) -> f64 {
    (1..=n).rev().map(|j| 1.0 / j as f64).sum()
}
