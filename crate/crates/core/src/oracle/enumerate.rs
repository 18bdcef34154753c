//! Brute-force distribution of `S_n` over every `(I_2..I_n, θ_2..θ_n)` outcome.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::angle::AngleLaw;
use crate::{Error, Result};

/// Longest horizon accepted by [`enumerate_exact`].
pub const MAX_ENUMERATION_N: u64 = 8;

const MAX_DENOMINATOR: u64 = 1_000_000;
const RATIONAL_TOLERANCE: f64 = 1e-15;
const GROUPING_TOLERANCE: f64 = 1e-12;
const QUANTUM: f64 = 1e-9;

/// Finite support with exact rational probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub support: Vec<(Complex64, Ratio<i128>)>,
    pub n: u64,
}

impl ExactDistribution {
    pub fn total_probability(&self) -> Ratio<i128> {
        self.support.iter().map(|(_, p)| *p).sum()
    }

    /// Probability of the support point within `1e-12` of `z`, zero if none.
    pub fn probability_of(&self, z: Complex64) -> Ratio<i128> {
        self.support
            .iter()
            .filter(|(x, _)| (x - z).norm() <= GROUPING_TOLERANCE)
            .map(|(_, p)| *p)
            .sum()
    }

    pub fn mean(&self) -> Complex64 {
        self.expect(|z| z)
    }

    pub fn abs_second(&self) -> f64 {
        self.expect(|z| Complex64::new(z.norm_sqr(), 0.0)).re
    }

    pub fn second(&self) -> Complex64 {
        self.expect(|z| z * z)
    }

    fn expect(&self, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.support.iter().map(|&(z, p)| f(z) * to_f64(p)).sum()
    }
}

fn to_f64(p: Ratio<i128>) -> f64 {
    *p.numer() as f64 / *p.denom() as f64
}

/// Exact law of `S_n`.
pub fn enumerate_exact(law: &AngleLaw, n: u64) -> Result<ExactDistribution> {
    enumerate_exact_power(law, n, 1)
}

/// Exact law of `S_n^{(k)} = Σ_j (ΔS_j)^k`.
pub fn enumerate_exact_power(law: &AngleLaw, n: u64, k: u32) -> Result<ExactDistribution> {
    if n == 0 {
        return Err(Error::HorizonTooShort { min: 1, got: 0 });
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::EnumerationTooLarge(n));
    }
    let atoms = law
        .atoms()
        .ok_or_else(|| Error::NotEnumerable("continuous angle law".into()))?;
    let (weights, denom) = common_denominator(&atoms)?;
    let outcomes: Vec<(Complex64, u128)> = atoms
        .iter()
        .zip(&weights)
        .filter(|(_, &w)| w > 0)
        .map(|(&(theta, _), &w)| (Complex64::from_polar(1.0, theta), w as u128))
        .collect();

    let mut total: u128 = 1;
    for m in 1..n as u128 {
        total = total
            .checked_mul(m)
            .and_then(|t| t.checked_mul(denom as u128))
            .filter(|&t| t <= i128::MAX as u128)
            .ok_or_else(|| Error::NotEnumerable(format!("denominator overflow at n = {n}")))?;
    }

    let mut leaves: BTreeMap<(i64, i64), (Complex64, u128)> = BTreeMap::new();
    let mut steps = Vec::with_capacity(n as usize);
    steps.push(Complex64::new(1.0, 0.0));
    descend(&outcomes, n as usize, k, &mut steps, 1, &mut leaves);

    let mut support: Vec<(Complex64, u128)> = Vec::new();
    for (_, (z, w)) in leaves {
        match support.iter_mut().find(|(x, _)| (*x - z).norm() <= QUANTUM) {
            Some(slot) => slot.1 += w,
            None => support.push((z, w)),
        }
    }
    let support = support
        .into_iter()
        .map(|(z, w)| (z, Ratio::new(w as i128, total as i128)))
        .collect();
    Ok(ExactDistribution { support, n })
}

fn descend(
    outcomes: &[(Complex64, u128)],
    n: usize,
    k: u32,
    steps: &mut Vec<Complex64>,
    weight: u128,
    leaves: &mut BTreeMap<(i64, i64), (Complex64, u128)>,
) {
    let m = steps.len();
    if m == n {
        let z: Complex64 = steps.iter().map(|s| s.powu(k)).sum();
        let key = (libm::round(z.re / QUANTUM) as i64, libm::round(z.im / QUANTUM) as i64);
        leaves.entry(key).or_insert((z, 0)).1 += weight;
        return;
    }
    for i in 0..m {
        for &(rot, w) in outcomes {
            steps.push(steps[i] * rot);
            descend(outcomes, n, k, steps, weight * w, leaves);
            steps.pop();
        }
    }
}

/// Integer weights `w_j` and `D` with `p_j ≈ w_j / D` and `Σ w_j = D`.
fn common_denominator(atoms: &[(f64, f64)]) -> Result<(Vec<u64>, u64)> {
    let fractions = atoms
        .iter()
        .map(|&(_, p)| {
            rational_approximation(p).ok_or_else(|| {
                Error::NotEnumerable(format!("probability {p} has no small rational form"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut denom: u64 = 1;
    for &(_, d) in &fractions {
        denom = lcm(denom, d)
            .filter(|&l| l <= MAX_DENOMINATOR)
            .ok_or_else(|| Error::NotEnumerable("common denominator too large".into()))?;
    }
    let weights: Vec<u64> = fractions.iter().map(|&(p, d)| p * (denom / d)).collect();
    if weights.iter().sum::<u64>() != denom {
        return Err(Error::NotEnumerable("rational probabilities do not sum to 1".into()));
    }
    Ok((weights, denom))
}

/// First continued-fraction convergent `p/q` with `q ≤ 10^6` within `1e-15`.
fn rational_approximation(x: f64) -> Option<(u64, u64)> {
    if !(0.0..=1.0).contains(&x) {
        return None;
    }
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut rest = x;
    loop {
        let a = libm::floor(rest);
        let a_int = a as u64;
        let h2 = a_int.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a_int.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_DENOMINATOR {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= RATIONAL_TOLERANCE {
            return Some((h1, k1));
        }
        let frac = rest - a;
        if frac == 0.0 {
            return None;
        }
        rest = 1.0 / frac;
    }
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    (a / x).checked_mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{abs_square_recursion, running_product, square_recursion};
    use core::f64::consts::PI;

    fn r(a: i128, b: i128) -> Ratio<i128> {
        Ratio::new(a, b)
    }

    #[test]
    fn coin_flip_law_at_three() {
        let law = AngleLaw::discrete(alloc::vec![(0.0, 0.5), (PI, 0.5)]).unwrap();
        let d = enumerate_exact(&law, 3).unwrap();
        assert_eq!(d.probability_of(Complex64::new(3.0, 0.0)), r(1, 4));
        assert_eq!(d.probability_of(Complex64::new(1.0, 0.0)), r(1, 2));
        assert_eq!(d.probability_of(Complex64::new(-1.0, 0.0)), r(1, 4));
        assert_eq!(d.total_probability(), r(1, 1));
        assert!((d.mean() - 1.0).norm() < 1e-15);
        assert!((d.abs_second() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn quarter_turn_constant_at_three() {
        let law = AngleLaw::constant(PI / 2.0).unwrap();
        let d = enumerate_exact(&law, 3).unwrap();
        assert_eq!(d.support.len(), 2);
        assert_eq!(d.probability_of(Complex64::new(1.0, 2.0)), r(1, 2));
        assert_eq!(d.probability_of(Complex64::new(0.0, 1.0)), r(1, 2));
        let sq = enumerate_exact_power(&law, 3, 2).unwrap();
        assert_eq!(sq.probability_of(Complex64::new(1.0, 0.0)), r(1, 2));
        assert_eq!(sq.probability_of(Complex64::new(-1.0, 0.0)), r(1, 2));
    }

    #[test]
    fn horizon_one_is_a_point_mass() {
        let law = AngleLaw::quarter_turns(0.4, 0.3, 0.2, 0.1).unwrap();
        let d = enumerate_exact(&law, 1).unwrap();
        assert_eq!(d.support, alloc::vec![(Complex64::new(1.0, 0.0), r(1, 1))]);
    }

    #[test]
    fn rejects_what_it_cannot_enumerate() {
        let law = AngleLaw::quarter_turns(0.4, 0.3, 0.2, 0.1).unwrap();
        assert_eq!(enumerate_exact(&law, 9), Err(Error::EnumerationTooLarge(9)));
        let uniform = AngleLaw::uniform(0.0, 1.0).unwrap();
        assert!(matches!(enumerate_exact(&uniform, 3), Err(Error::NotEnumerable(_))));
        let irrational = AngleLaw::discrete(alloc::vec![(0.0, 1.0 / PI), (1.0, 1.0 - 1.0 / PI)]).unwrap();
        assert!(matches!(enumerate_exact(&irrational, 3), Err(Error::NotEnumerable(_))));
    }

    #[test]
    fn rational_approximation_recovers_simple_fractions() {
        assert_eq!(rational_approximation(0.1), Some((1, 10)));
        assert_eq!(rational_approximation(0.75), Some((3, 4)));
        assert_eq!(rational_approximation(1.0), Some((1, 1)));
        assert_eq!(rational_approximation(0.0), Some((0, 1)));
        assert_eq!(rational_approximation(1.0 / 3.0), Some((1, 3)));
    }

    #[test]
    fn moments_match_recursions() {
        let laws = [
            AngleLaw::discrete(alloc::vec![(0.0, 0.5), (PI, 0.5)]).unwrap(),
            AngleLaw::discrete(alloc::vec![(0.0, 0.75), (PI, 0.25)]).unwrap(),
            AngleLaw::quarter_turns(0.4, 0.3, 0.2, 0.1).unwrap(),
            AngleLaw::constant(PI / 2.0).unwrap(),
            AngleLaw::discrete(alloc::vec![(PI / 3.0, 0.5), (PI, 0.25), (5.0, 0.25)]).unwrap(),
        ];
        for law in &laws {
            let (phi1, phi2) = (law.phi(1), law.phi(2));
            let a = running_product(phi1, 6);
            let u = abs_square_recursion(phi1, 6);
            let q = square_recursion(phi1, phi2, 6);
            let a2 = running_product(phi2, 6);
            for n in 1..=6u64 {
                let i = n as usize - 1;
                let d = enumerate_exact(law, n).unwrap();
                assert_eq!(d.total_probability(), r(1, 1));
                assert!(d.support.iter().all(|(z, _)| z.norm() <= n as f64 + 1e-12));
                assert!((d.mean() - a[i]).norm() < 1e-12);
                assert!((d.abs_second() - u[i]).abs() < 1e-12);
                assert!((d.second() - q[i]).norm() < 1e-12);
                let d2 = enumerate_exact_power(law, n, 2).unwrap();
                assert!((d2.mean() - a2[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn one_step_conditional_drift_is_exact() {
        // E(S_{n+1} | path) = S_n (1 + Φ_1/n), checked on every path to n = 5.
        let law = AngleLaw::quarter_turns(0.4, 0.3, 0.2, 0.1).unwrap();
        let phi1 = law.phi(1);
        let atoms = law.atoms().unwrap();
        fn paths(n: usize, atoms: &[(f64, f64)], acc: &mut Vec<Vec<Complex64>>, cur: &mut Vec<Complex64>) {
            if cur.len() == n {
                acc.push(cur.clone());
                return;
            }
            for i in 0..cur.len() {
                for &(t, _) in atoms {
                    cur.push(cur[i] * Complex64::from_polar(1.0, t));
                    paths(n, atoms, acc, cur);
                    cur.pop();
                }
            }
        }
        let mut all = Vec::new();
        paths(5, &atoms, &mut all, &mut alloc::vec![Complex64::new(1.0, 0.0)]);
        for steps in all {
            let n = steps.len();
            let s_n: Complex64 = steps.iter().sum();
            let mut next = Complex64::new(0.0, 0.0);
            for s in &steps {
                for &(t, p) in &atoms {
                    next += (s_n + s * Complex64::from_polar(1.0, t)) * (p / n as f64);
                }
            }
            assert!((next - s_n * (1.0 + phi1 / n as f64)).norm() < 1e-12);
        }
    }
}
