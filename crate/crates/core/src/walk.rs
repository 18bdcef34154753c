//! Discrete-time walk simulation.
//!
//! Steps are 1-based: `step_1 = 1` and, for `m ≥ 2`, `step_m = step_{I_m} e^{iθ_m}`
//! with `I_m` uniform on `{1, …, m−1}`. Per step the stream is consumed in a
//! fixed order, `I_m` first and then `θ_m`, so that the lattice and complex
//! simulations driven by the same stream coincide.

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::AngleLaw;
use crate::oracle::running_product;
use crate::rng::RngStream;
use crate::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A realized complex walk. Index `m − 1` of each vector holds time `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErwPath {
    steps: Vec<Complex64>,
    positions: Vec<Complex64>,
    law: AngleLaw,
    seed: u64,
    path_index: u64,
}

impl ErwPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Complex64] {
        &self.steps
    }

    /// `S_1, …, S_n`.
    pub fn positions(&self) -> &[Complex64] {
        &self.positions
    }

    /// `S_m` for `1 ≤ m ≤ n`.
    pub fn position(&self, m: usize) -> Complex64 {
        self.positions[m - 1]
    }

    pub fn endpoint(&self) -> Complex64 {
        *self.positions.last().expect("paths have at least one step")
    }

    pub fn law(&self) -> &AngleLaw {
        &self.law
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path_index(&self) -> u64 {
        self.path_index
    }

    /// `S_m^{(k)} = Σ_{j ≤ m} step_j^k` for `m = 1..n`.
    pub fn step_powers(&self, k: u32) -> Vec<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        self.steps
            .iter()
            .map(|s| {
                acc += s.powu(k);
                acc
            })
            .collect()
    }
}

/// Uniform memory index `I_m ∈ {1, …, m−1}` (1-based).
#[inline]
fn draw_memory_index(rng: &mut RngStream, m: u64) -> usize {
    rng.index(1, m) as usize
}

pub fn simulate_path(law: &AngleLaw, n: u64, seed: u64, path_index: u64) -> Result<ErwPath> {
    if n == 0 {
        return Err(Error::HorizonTooShort { min: 1, got: 0 });
    }
    let mut rng = RngStream::walk(seed, path_index);
    let n_us = n as usize;
    let mut steps = Vec::with_capacity(n_us);
    let mut positions = Vec::with_capacity(n_us);
    steps.push(ONE);
    positions.push(ONE);
    let mut pos = ONE;
    for m in 2..=n {
        let i = draw_memory_index(&mut rng, m);
        let step = steps[i - 1] * law.sample_rotation(&mut rng);
        steps.push(step);
        pos += step;
        positions.push(pos);
    }
    Ok(ErwPath { steps, positions, law: law.clone(), seed, path_index })
}

/// Probabilities of moving forward, left, backward and right relative to
/// the remembered step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
}

impl LatticeParams {
    pub fn new(p: f64, q: f64, r: f64, s: f64) -> Result<Self> {
        let params = Self { p, q, r, s };
        params.law()?;
        Ok(params)
    }

    /// The equivalent quarter-turn angle law.
    pub fn law(&self) -> Result<AngleLaw> {
        AngleLaw::quarter_turns(self.p, self.q, self.r, self.s)
    }

    /// `Φ_1 = p − r + i(q − s)`.
    pub fn phi1(&self) -> Complex64 {
        Complex64::new(self.p - self.r, self.q - self.s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticePath {
    pub positions: Vec<[i64; 2]>,
    pub params: LatticeParams,
}

const DIRECTIONS: [[i64; 2]; 4] = [[1, 0], [0, 1], [-1, 0], [0, -1]];

/// Walk on `Z²`; with the same `(seed, path_index)` it is the exact integer
/// image of `simulate_path` under the quarter-turn law.
pub fn lattice_simulate(
    params: LatticeParams,
    n: u64,
    seed: u64,
    path_index: u64,
) -> Result<LatticePath> {
    if n == 0 {
        return Err(Error::HorizonTooShort { min: 1, got: 0 });
    }
    let law = params.law()?;
    let mut rng = RngStream::walk(seed, path_index);
    let mut dirs: Vec<u8> = Vec::with_capacity(n as usize);
    let mut positions = Vec::with_capacity(n as usize);
    dirs.push(0);
    let mut pos = [1i64, 0];
    positions.push(pos);
    for m in 2..=n {
        let i = draw_memory_index(&mut rng, m);
        let turn = law.sample_atom_index(&mut rng) as u8;
        let dir = (dirs[i - 1] + turn) % 4;
        dirs.push(dir);
        let d = DIRECTIONS[dir as usize];
        pos = [pos[0] + d[0], pos[1] + d[1]];
        positions.push(pos);
    }
    Ok(LatticePath { positions, params })
}

/// Predictable brackets of `M_n = S_n / a_n`; index `m − 1` holds time `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticVariationTrace {
    /// `⟨M⟩_m`
    pub bracket_complex: Vec<Complex64>,
    /// `⟨M, M̄⟩_m`
    pub bracket_modulus: Vec<f64>,
}

/// Evaluates both brackets along the realized path, with `Φ_2` taken from
/// the path's law.
pub fn quadratic_variations(path: &ErwPath, phi1: Complex64) -> QuadraticVariationTrace {
    let n = path.len();
    let phi2 = path.law().phi(2);
    let a = running_product(phi1, n as u64);
    let s2 = path.step_powers(2);
    let mut bracket_complex = Vec::with_capacity(n);
    let mut bracket_modulus = Vec::with_capacity(n);
    let mut bc = Complex64::new(0.0, 0.0);
    let mut bm = 0.0;
    bracket_complex.push(bc);
    bracket_modulus.push(bm);
    for k in 1..n {
        let kf = k as f64;
        let drift = phi1 * path.position(k) / kf;
        let next = a[k];
        bm += (1.0 - drift.norm_sqr()) / next.norm_sqr();
        bc += (phi2 * s2[k - 1] / kf - drift * drift) / (next * next);
        bracket_complex.push(bc);
        bracket_modulus.push(bm);
    }
    QuadraticVariationTrace { bracket_complex, bracket_modulus }
}

/// Realized increments `ΔM_k = (ΔS_k − Φ_1 S_k / k) / a_{k+1}`, `k = 1..n−1`.
pub fn martingale_increments(path: &ErwPath, phi1: Complex64) -> Vec<Complex64> {
    let n = path.len();
    let a = running_product(phi1, n as u64);
    (1..n)
        .map(|k| (path.steps()[k] - phi1 * path.position(k) / k as f64) / a[k])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{PI, TAU};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn first_position_is_one() {
        let law = AngleLaw::uniform(0.0, TAU).unwrap();
        let p = simulate_path(&law, 1, 0, 0).unwrap();
        assert_eq!(p.positions(), &[ONE]);
        assert!(simulate_path(&law, 0, 0, 0).is_err());
    }

    #[test]
    fn deterministic_laws() {
        let zero = AngleLaw::constant(0.0).unwrap();
        assert_eq!(simulate_path(&zero, 10, 5, 1).unwrap().endpoint(), c(10.0, 0.0));
        let flip = AngleLaw::constant(PI).unwrap();
        assert!(simulate_path(&flip, 2, 5, 1).unwrap().endpoint().norm() < 1e-15);
    }

    #[test]
    fn step_powers_examples() {
        let law = AngleLaw::uniform(0.0, TAU).unwrap();
        let p = simulate_path(&law, 50, 1, 2).unwrap();
        assert_eq!(p.step_powers(1), p.positions());
        let zero = simulate_path(&AngleLaw::constant(0.0).unwrap(), 20, 1, 2).unwrap();
        for k in 1..4 {
            for (m, v) in zero.step_powers(k).iter().enumerate() {
                assert_eq!(*v, c((m + 1) as f64, 0.0));
            }
        }
    }

    #[test]
    fn quarter_turn_squares_take_both_signs() {
        // steps (1, i, i·step_{I_3}); S_3^{(2)} = 1 − 1 + (i step_{I_3})² ∈ {−1, +1}
        let law = AngleLaw::constant(PI / 2.0).unwrap();
        let mut seen = [0usize; 2];
        for idx in 0..2000 {
            let v = simulate_path(&law, 3, 17, idx).unwrap().step_powers(2)[2];
            assert!(v.im.abs() < 1e-12);
            if (v.re - 1.0).abs() < 1e-12 {
                seen[0] += 1;
            } else {
                assert!((v.re + 1.0).abs() < 1e-12);
                seen[1] += 1;
            }
        }
        // binomial(2000, 1/2): 5 standard deviations ≈ 112
        assert!((seen[0] as i64 - 1000).abs() < 112, "{seen:?}");
    }

    #[test]
    fn uniform_law_mean_endpoint_is_one() {
        let law = AngleLaw::uniform(0.0, TAU).unwrap();
        let m = 10_000;
        let n = 1000;
        let mut acc = c(0.0, 0.0);
        for idx in 0..m {
            acc += simulate_path(&law, n, 2024, idx).unwrap().endpoint();
        }
        let mean = acc / m as f64;
        // Var S_n = n per complex value, n/2 per component
        let se = libm::sqrt(n as f64 / 2.0 / m as f64);
        assert!((mean.re - 1.0).abs() < 5.0 * se && mean.im.abs() < 5.0 * se, "{mean}");
    }

    #[test]
    fn lattice_examples() {
        let fwd = lattice_simulate(LatticeParams::new(1.0, 0.0, 0.0, 0.0).unwrap(), 5, 0, 0).unwrap();
        assert_eq!(*fwd.positions.last().unwrap(), [5, 0]);
        let left = lattice_simulate(LatticeParams::new(0.0, 1.0, 0.0, 0.0).unwrap(), 2, 0, 0).unwrap();
        assert_eq!(left.positions, alloc::vec![[1, 0], [1, 1]]);
        assert!(LatticeParams::new(0.5, 0.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn lattice_couples_with_complex_walk() {
        let params = LatticeParams::new(0.4, 0.3, 0.2, 0.1).unwrap();
        let law = params.law().unwrap();
        for idx in 0..20 {
            let lat = lattice_simulate(params, 64, 99, idx).unwrap();
            let cpx = simulate_path(&law, 64, 99, idx).unwrap();
            for (l, z) in lat.positions.iter().zip(cpx.positions()) {
                assert_eq!(*l, [libm::round(z.re) as i64, libm::round(z.im) as i64]);
                assert!((z.re - l[0] as f64).abs() < 1e-9 && (z.im - l[1] as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn bracket_examples() {
        let law = AngleLaw::uniform(0.0, TAU).unwrap();
        let p = simulate_path(&law, 100, 3, 0).unwrap();
        let qv = quadratic_variations(&p, c(0.0, 0.0));
        for (m, v) in qv.bracket_modulus.iter().enumerate() {
            assert!((v - m as f64).abs() < 1e-9);
        }
        let det = simulate_path(&AngleLaw::constant(0.0).unwrap(), 100, 3, 0).unwrap();
        let qv = quadratic_variations(&det, ONE);
        assert!(qv.bracket_modulus.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn brackets_are_predictable_sums_of_increment_moments() {
        // For the quarter-turn law, E(|ΔM_k|² | F_k) is an explicit finite sum;
        // recompute it by direct enumeration of (I, θ) and compare.
        let law = AngleLaw::quarter_turns(0.4, 0.3, 0.2, 0.1).unwrap();
        let phi1 = law.phi(1);
        let path = simulate_path(&law, 40, 8, 3).unwrap();
        let a = running_product(phi1, 40);
        let atoms = law.atoms().unwrap();
        let mut bm = 0.0;
        let mut bc = c(0.0, 0.0);
        let qv = quadratic_variations(&path, phi1);
        for k in 1..40usize {
            let sk = path.position(k);
            for i in 1..=k {
                for &(theta, p) in &atoms {
                    let step = path.steps()[i - 1] * Complex64::from_polar(1.0, theta);
                    let dm = (step - phi1 * sk / k as f64) / a[k];
                    let w = p / k as f64;
                    bm += w * dm.norm_sqr();
                    bc += w * dm * dm;
                }
            }
            assert!((qv.bracket_modulus[k] - bm).abs() < 1e-10);
            assert!((qv.bracket_complex[k] - bc).norm() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn path_invariants(seed in 0u64..10_000, idx in 0u64..100, theta in 0.0..TAU, n in 1u64..300) {
            let law = AngleLaw::discrete(alloc::vec![(theta, 0.5), (0.0, 0.5)]).unwrap();
            let p = simulate_path(&law, n, seed, idx).unwrap();
            prop_assert_eq!(p.positions()[0], ONE);
            let mut acc = c(0.0, 0.0);
            for (s, z) in p.steps().iter().zip(p.positions()) {
                prop_assert!((s.norm() - 1.0).abs() < 1e-12);
                acc += s;
                prop_assert!((acc - z).norm() < 1e-9);
            }
            prop_assert_eq!(&p, &simulate_path(&law, n, seed, idx).unwrap());
            let qv = quadratic_variations(&p, law.phi(1));
            prop_assert!(qv.bracket_modulus.windows(2).all(|w| w[1] >= w[0] - 1e-12));
            prop_assert!(qv.bracket_modulus.iter().all(|&v| v >= 0.0));
        }
    }
}
