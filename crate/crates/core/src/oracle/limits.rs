//! Closed-form moments of the continuous-time additive functionals and of
//! the martingale limit `W`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::{AngleLaw, Regime};
use crate::{Error, Result, TIE_TOLERANCE};

/// Mean, second moments and `(Re W, Im W)` covariance of the limit `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WMoments {
    pub mean: Complex64,
    /// `E(W²)`
    pub second: Complex64,
    /// `E|W|²`
    pub abs_second: f64,
    /// `[[σ², ρ], [ρ, τ²]]`
    pub cov: [[f64; 2]; 2],
}

pub fn w_moments(law: &AngleLaw) -> Result<WMoments> {
    let class = law.classify_regime()?;
    if class.regime != Regime::Superdiffusive {
        return Err(Error::RegimeMismatch { expected: "superdiffusive", actual: class.regime.name() });
    }
    let phi1 = law.phi(1);
    let phi2 = law.phi(2);
    let denom = 2.0 * phi1 - phi2;
    if denom.norm() <= TIE_TOLERANCE {
        return Err(Error::DegenerateWMoments);
    }
    let r2 = 2.0 * phi1.re;
    let inv = 1.0 / (r2 - 1.0);
    let tilt = (phi2 / denom).re;
    let sigma2 = 0.5 * (inv + tilt);
    let tau2 = 0.5 * (inv - tilt);
    let rho = (phi1 / denom).im;
    Ok(WMoments {
        mean: Complex64::new(1.0, 0.0),
        second: 2.0 * phi1 / denom,
        abs_second: r2 / (r2 - 1.0),
        cov: [[sigma2, rho], [rho, tau2]],
    })
}

/// `(E Z_k(t), E|Z_k(t)|², E Z_k(t)²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousMoments {
    pub mean: Complex64,
    pub abs_second: f64,
    pub second: Complex64,
}

pub fn continuous_moments(law: &AngleLaw, k: u32, t: f64) -> Result<ContinuousMoments> {
    if k == 0 {
        return Err(Error::ZeroFourierIndex);
    }
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let phi = law.phi(k);
    let phi_2k = law.phi(2 * k);
    let et = libm::exp(t);
    let r2 = 2.0 * phi.re;
    let abs_second = if (phi.re - 0.5).abs() <= TIE_TOLERANCE {
        (t + 1.0) * et
    } else {
        (r2 * libm::exp(r2 * t) - et) / (r2 - 1.0)
    };
    let gap = 2.0 * phi - phi_2k;
    let second = if gap.norm() <= TIE_TOLERANCE {
        (1.0 + 2.0 * phi * t) * (2.0 * phi * t).exp()
    } else {
        (2.0 * phi * (2.0 * phi * t).exp() - phi_2k * (phi_2k * t).exp()) / gap
    };
    Ok(ContinuousMoments { mean: (phi * t).exp(), abs_second, second })
}
