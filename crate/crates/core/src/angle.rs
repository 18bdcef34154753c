//! Rotation-angle laws on `[0, 2π)` and their Fourier coefficients.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::rng::RngStream;
use crate::{Error, Result, TIE_TOLERANCE};

/// Probabilities of a discrete law must sum to one within this tolerance.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;
/// Slack allowed on `hi ≤ lo + 2π` for uniform laws written with rounded 2π.
const WIDTH_SLACK: f64 = 1e-9;

/// Reduce an angle to `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = num_traits::Euclid::rem_euclid(&theta, &TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LawKind {
    Constant { theta: f64 },
    Discrete { atoms: Vec<(f64, f64)> },
    /// Uniform on `[lo, lo + width)` taken mod 2π, `0 < width ≤ 2π`.
    UniformInterval { lo: f64, width: f64 },
}

/// Law of the i.i.d. rotation angles θ_m.
///
/// Immutable once built. Discrete and constant laws cache the rotations
/// `e^{iθ_j}` so that sampling a rotation costs one uniform draw and no
/// trigonometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LawSpec", into = "LawSpec")]
pub struct AngleLaw {
    kind: LawKind,
    rotations: Vec<Complex64>,
    cumulative: Vec<f64>,
}

/// Tagged-record form used in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum LawSpec {
    Constant { theta: f64 },
    Discrete { atoms: Vec<[f64; 2]> },
    Uniform { lo: f64, hi: f64 },
}

impl TryFrom<LawSpec> for AngleLaw {
    type Error = Error;

    fn try_from(spec: LawSpec) -> Result<Self> {
        match spec {
            LawSpec::Constant { theta } => AngleLaw::constant(theta),
            LawSpec::Discrete { atoms } => {
                AngleLaw::discrete(atoms.into_iter().map(|[a, p]| (a, p)).collect())
            }
            LawSpec::Uniform { lo, hi } => AngleLaw::uniform(lo, hi),
        }
    }
}

impl From<AngleLaw> for LawSpec {
    fn from(law: AngleLaw) -> Self {
        match law.kind {
            LawKind::Constant { theta } => LawSpec::Constant { theta },
            LawKind::Discrete { atoms } => LawSpec::Discrete {
                atoms: atoms.into_iter().map(|(a, p)| [a, p]).collect(),
            },
            LawKind::UniformInterval { lo, width } => LawSpec::Uniform { lo, hi: lo + width },
        }
    }
}

/// `Φ_k = E e^{ikθ}` for some `k ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficient {
    pub k: u32,
    pub value: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Diffusive,
    Critical,
    Superdiffusive,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Diffusive => "diffusive",
            Regime::Critical => "critical",
            Regime::Superdiffusive => "superdiffusive",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which limit theorem applies, with the limiting variance where one exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeClassification {
    pub regime: Regime,
    pub phi1: Complex64,
    /// `1/(1 − 2 Re Φ_1)` or `1/(2 Re Φ_1 − 1)`; absent at criticality.
    pub sigma_squared: Option<f64>,
}

impl RegimeClassification {
    pub fn from_phi1(phi1: Complex64, tol: f64) -> Self {
        let gap = phi1.re - 0.5;
        let (regime, sigma_squared) = if gap < -tol {
            (Regime::Diffusive, Some(1.0 / (1.0 - 2.0 * phi1.re)))
        } else if gap > tol {
            (Regime::Superdiffusive, Some(1.0 / (2.0 * phi1.re - 1.0)))
        } else {
            (Regime::Critical, None)
        };
        Self { regime, phi1, sigma_squared }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyCheck {
    pub nondegenerate: bool,
    pub re_phi2: f64,
}

impl AngleLaw {
    pub fn constant(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidLaw(format!("non-finite angle {theta}")));
        }
        let theta = reduce_angle(theta);
        Ok(Self {
            kind: LawKind::Constant { theta },
            rotations: alloc::vec![Complex64::from_polar(1.0, theta)],
            cumulative: alloc::vec![1.0],
        })
    }

    /// Atoms are `(angle, probability)`; zero-probability atoms are kept so
    /// that atom indices stay stable.
    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidLaw("discrete law without atoms".into()));
        }
        let mut total = 0.0;
        let mut cumulative = Vec::with_capacity(atoms.len());
        let mut reduced = Vec::with_capacity(atoms.len());
        for &(theta, p) in &atoms {
            if !theta.is_finite() || !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidLaw(format!("bad atom ({theta}, {p})")));
            }
            total += p;
            cumulative.push(total);
            reduced.push((reduce_angle(theta), p));
        }
        if (total - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::InvalidLaw(format!("probabilities sum to {total}, not 1")));
        }
        let rotations = reduced.iter().map(|&(t, _)| Complex64::from_polar(1.0, t)).collect();
        Ok(Self { kind: LawKind::Discrete { atoms: reduced }, rotations, cumulative })
    }

    /// Uniform law on `[lo, hi)`, requiring `lo < hi ≤ lo + 2π`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi || hi > lo + TAU + WIDTH_SLACK {
            return Err(Error::InvalidLaw(format!("need lo < hi ≤ lo + 2π, got [{lo}, {hi})")));
        }
        let width = (hi - lo).min(TAU);
        Ok(Self {
            kind: LawKind::UniformInterval { lo: reduce_angle(lo), width },
            rotations: Vec::new(),
            cumulative: Vec::new(),
        })
    }

    /// Lattice law `{0: p, π/2: q, π: r, 3π/2: s}`.
    pub fn quarter_turns(p: f64, q: f64, r: f64, s: f64) -> Result<Self> {
        Self::discrete(alloc::vec![(0.0, p), (PI / 2.0, q), (PI, r), (1.5 * PI, s)])
    }

    pub fn kind(&self) -> &LawKind {
        &self.kind
    }

    /// Atoms of a law with finite support, `None` for uniform laws.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match &self.kind {
            LawKind::Constant { theta } => Some(alloc::vec![(*theta, 1.0)]),
            LawKind::Discrete { atoms } => Some(atoms.clone()),
            LawKind::UniformInterval { .. } => None,
        }
    }

    /// `Φ_k` in closed form, checked `k ≥ 1`.
    pub fn fourier_coefficient(&self, k: u32) -> Result<FourierCoefficient> {
        if k == 0 {
            return Err(Error::ZeroFourierIndex);
        }
        Ok(FourierCoefficient { k, value: self.phi(k) })
    }

    /// `Φ_k` in closed form; `phi(0) = 1`.
    pub fn phi(&self, k: u32) -> Complex64 {
        let kf = k as f64;
        match &self.kind {
            LawKind::Constant { theta } => Complex64::from_polar(1.0, kf * theta),
            LawKind::Discrete { atoms } => atoms
                .iter()
                .map(|&(theta, p)| Complex64::from_polar(p, kf * theta))
                .sum(),
            LawKind::UniformInterval { lo, width } => {
                if k == 0 {
                    return Complex64::new(1.0, 0.0);
                }
                let i = Complex64::i();
                let start = Complex64::from_polar(1.0, kf * lo);
                let arc = Complex64::from_polar(1.0, kf * width) - 1.0;
                start * arc / (i * kf * width)
            }
        }
    }

    pub fn validate_nondegenerate(&self) -> NondegeneracyCheck {
        let re_phi2 = self.phi(2).re;
        NondegeneracyCheck { nondegenerate: re_phi2 < 1.0 - TIE_TOLERANCE, re_phi2 }
    }

    pub fn classify_regime(&self) -> Result<RegimeClassification> {
        self.classify_regime_with(TIE_TOLERANCE)
    }

    pub fn classify_regime_with(&self, tol: f64) -> Result<RegimeClassification> {
        let check = self.validate_nondegenerate();
        if !check.nondegenerate {
            return Err(Error::Degenerate { re_phi2: check.re_phi2 });
        }
        Ok(RegimeClassification::from_phi1(self.phi(1), tol))
    }

    /// Index of the atom drawn for one step; uniform laws have no atoms and
    /// always return 0 without consuming randomness.
    #[inline]
    pub fn sample_atom_index(&self, rng: &mut RngStream) -> usize {
        match &self.kind {
            LawKind::Constant { .. } | LawKind::UniformInterval { .. } => 0,
            LawKind::Discrete { atoms } => {
                let u = rng.uniform();
                match self.cumulative.iter().position(|&c| u < c) {
                    Some(j) => j,
                    // u ≥ the rounded total: fall back to the last atom that carries mass
                    None => atoms.iter().rposition(|&(_, p)| p > 0.0).unwrap_or(0),
                }
            }
        }
    }

    pub fn sample_angle(&self, rng: &mut RngStream) -> f64 {
        match &self.kind {
            LawKind::Constant { theta } => *theta,
            LawKind::Discrete { atoms } => atoms[self.sample_atom_index(rng)].0,
            LawKind::UniformInterval { lo, width } => reduce_angle(lo + rng.uniform() * width),
        }
    }

    /// `e^{iθ}` for one draw of θ; consumes exactly the draws of `sample_angle`.
    #[inline]
    pub fn sample_rotation(&self, rng: &mut RngStream) -> Complex64 {
        match &self.kind {
            LawKind::Constant { .. } => self.rotations[0],
            LawKind::Discrete { .. } => self.rotations[self.sample_atom_index(rng)],
            LawKind::UniformInterval { .. } => Complex64::from_polar(1.0, self.sample_angle(rng)),
        }
    }

    /// Law of `2π − θ`; conjugates every `Φ_k`.
    pub fn reflected(&self) -> Self {
        let flip = |t: f64| reduce_angle(TAU - t);
        match &self.kind {
            LawKind::Constant { theta } => Self::constant(flip(*theta)),
            LawKind::Discrete { atoms } => {
                Self::discrete(atoms.iter().map(|&(t, p)| (flip(t), p)).collect())
            }
            LawKind::UniformInterval { lo, width } => {
                let new_lo = TAU - lo - width;
                Self::uniform(new_lo, new_lo + width)
            }
        }
        .expect("reflection of a valid law is valid")
    }
}
