use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::{Regime, RegimeClassification};
use crate::walk::ErwPath;
use crate::{Error, Result, TIE_TOLERANCE};

/// Shortest path accepted by [`spiral_fit`].
pub const MIN_SPIRAL_LEN: u64 = 1 << 12;
const ORIGIN_GUARD: f64 = 1e-9;

/// Least-squares log-spiral fit over the tail of a path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpiralFit {
    /// Slope of `log|S_m|` against `log m`; estimates `Re Φ_1`.
    pub slope_logmod: f64,
    /// Slope of the unwrapped `arg S_m` against `log m`; estimates `Im Φ_1`.
    pub slope_arg: f64,
    /// Root mean square of both fits' residuals.
    pub residual_rms: f64,
}

/// Fits `log S_m ≈ c + Φ log m` over `m ∈ [n/4, n]`.
pub fn spiral_fit(path: &ErwPath, phi1: Complex64) -> Result<SpiralFit> {
    let class = RegimeClassification::from_phi1(phi1, TIE_TOLERANCE);
    if class.regime != Regime::Superdiffusive {
        return Err(Error::RegimeMismatch { expected: "superdiffusive", actual: class.regime.name() });
    }
    let n = path.len() as u64;
    if n < MIN_SPIRAL_LEN {
        return Err(Error::HorizonTooShort { min: MIN_SPIRAL_LEN, got: n });
    }
    let window = (n / 4).max(1)..=n;
    if let Some(m) = window.clone().find(|&m| path.position(m as usize).norm() < ORIGIN_GUARD) {
        return Err(Error::NearOrigin(m));
    }

    let count = (n - n / 4 + 1) as f64;
    let (mut sx, mut sxx, mut sy, mut sxy, mut sa, mut sxa) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let mut arg = Unwrapper::new(path.position(*window.start() as usize));
    for m in window.clone() {
        let s = path.position(m as usize);
        let unwrapped = arg.next(s);
        let x = libm::log(m as f64);
        let y = libm::log(s.norm());
        sx += x;
        sxx += x * x;
        sy += y;
        sxy += x * y;
        sa += unwrapped;
        sxa += x * unwrapped;
    }
    let det = count * sxx - sx * sx;
    let slope_logmod = (count * sxy - sx * sy) / det;
    let slope_arg = (count * sxa - sx * sa) / det;
    let icpt_logmod = (sy - slope_logmod * sx) / count;
    let icpt_arg = (sa - slope_arg * sx) / count;

    let mut arg = Unwrapper::new(path.position(*window.start() as usize));
    let mut sq = 0.0;
    for m in window {
        let s = path.position(m as usize);
        let unwrapped = arg.next(s);
        let x = libm::log(m as f64);
        let r1 = libm::log(s.norm()) - icpt_logmod - slope_logmod * x;
        let r2 = unwrapped - icpt_arg - slope_arg * x;
        sq += r1 * r1 + r2 * r2;
    }
    Ok(SpiralFit { slope_logmod, slope_arg, residual_rms: libm::sqrt(sq / count) })
}

/// Continuous argument by nearest-branch continuation.
struct Unwrapper {
    prev_raw: f64,
    value: f64,
}

impl Unwrapper {
    fn new(start: Complex64) -> Self {
        let a = start.arg();
        Self { prev_raw: a, value: a }
    }

    fn next(&mut self, z: Complex64) -> f64 {
        let raw = z.arg();
        let mut jump = raw - self.prev_raw;
        if jump > PI {
            jump -= TAU;
        } else if jump < -PI {
            jump += TAU;
        }
        self.prev_raw = raw;
        self.value += jump;
        self.value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::AngleLaw;
    use crate::walk::simulate_path;

    #[test]
    fn straight_line() {
        let law = AngleLaw::constant(0.0).unwrap();
        let path = simulate_path(&law, 1 << 12, 0, 0).unwrap();
        let fit = spiral_fit(&path, law.phi(1)).unwrap();
        assert!((fit.slope_logmod - 1.0).abs() < 1e-9);
        assert!(fit.slope_arg.abs() < 1e-12);
        assert!(fit.residual_rms < 1e-9);
    }

    #[test]
    fn constant_rotation_spirals() {
        let law = AngleLaw::constant(0.3).unwrap();
        let path = simulate_path(&law, 1 << 16, 12, 0).unwrap();
        let fit = spiral_fit(&path, law.phi(1)).unwrap();
        assert!((fit.slope_logmod - libm::cos(0.3)).abs() < 0.05, "{fit:?}");
        assert!((fit.slope_arg - libm::sin(0.3)).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn rejects_non_superdiffusive_and_short_paths() {
        let law = AngleLaw::constant(PI / 3.0 + 0.1).unwrap();
        let path = simulate_path(&law, 1 << 12, 0, 0).unwrap();
        assert!(matches!(spiral_fit(&path, law.phi(1)), Err(Error::RegimeMismatch { .. })));
        let law = AngleLaw::constant(0.1).unwrap();
        let path = simulate_path(&law, 100, 0, 0).unwrap();
        assert!(matches!(spiral_fit(&path, law.phi(1)), Err(Error::HorizonTooShort { .. })));
    }
}
