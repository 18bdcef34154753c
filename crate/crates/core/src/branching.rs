//! Yule-embedded branching process.
//!
//! Particles live on the unit circle and each reproduces at unit rate; a
//! child sits at its parent's phase rotated by an independent angle. The
//! process is simulated through its jump chain: with `m` particles alive the
//! next birth comes after an `Exp(m)` wait and the parent is uniform among
//! the living. Per birth the draws are, in order, the exponential wait, the
//! parent index, then the angle. The founder is born at time 0 at phase 1.

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::AngleLaw;
use crate::rng::RngStream;
use crate::{Error, Result, TIE_TOLERANCE};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Smallest particle count accepted by [`estimate_limits`].
pub const MIN_LIMIT_HORIZON: u64 = 1 << 10;

/// A realized run, covering every birth up to `len()` particles.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchingRun {
    birth_times: Vec<f64>,
    phases: Vec<Complex64>,
    next_birth: f64,
    law: AngleLaw,
    seed: u64,
    path_index: u64,
}

impl BranchingRun {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// `τ_1 = 0 < τ_2 < …`
    pub fn birth_times(&self) -> &[f64] {
        &self.birth_times
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    /// Time of the first birth not recorded; the population is known on
    /// `[0, horizon())`.
    pub fn horizon(&self) -> f64 {
        self.next_birth
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

    /// `N_t`.
    pub fn population(&self, t: f64) -> Result<u64> {
        self.alive(t).map(|n| n as u64)
    }

    fn alive(&self, t: f64) -> Result<usize> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        if t >= self.next_birth {
            return Err(Error::BeyondHorizon { t, horizon: self.next_birth });
        }
        Ok(self.birth_times.partition_point(|&b| b <= t))
    }
}

/// Jump-chain state shared by the run builders.
struct Grower<'a> {
    law: &'a AngleLaw,
    rng: RngStream,
    time: f64,
    phases: Vec<Complex64>,
}

impl<'a> Grower<'a> {
    fn new(law: &'a AngleLaw, rng: RngStream) -> Self {
        Self { law, rng, time: 0.0, phases: alloc::vec![ONE] }
    }

    #[inline]
    fn wait(&mut self) -> f64 {
        self.time + self.rng.exp1() / self.phases.len() as f64
    }

    #[inline]
    fn birth(&mut self, at: f64) {
        self.time = at;
        let parent = self.rng.index(0, self.phases.len() as u64) as usize;
        let child = self.phases[parent] * self.law.sample_rotation(&mut self.rng);
        self.phases.push(child);
    }
}

/// Run with exactly `n_max` particles.
pub fn simulate_branching(law: &AngleLaw, n_max: u64, seed: u64, path_index: u64) -> Result<BranchingRun> {
    if n_max == 0 {
        return Err(Error::HorizonTooShort { min: 1, got: 0 });
    }
    let mut g = Grower::new(law, RngStream::branching(seed, path_index));
    let mut birth_times = Vec::with_capacity(n_max as usize);
    birth_times.push(0.0);
    g.phases.reserve(n_max as usize);
    while (g.phases.len() as u64) < n_max {
        let at = g.wait();
        g.birth(at);
        birth_times.push(at);
    }
    let next_birth = g.wait();
    Ok(BranchingRun { birth_times, phases: g.phases, next_birth, law: law.clone(), seed, path_index })
}

/// Run covering every birth in `[0, t_max]`; shares its draws with
/// [`simulate_branching`] for the same `(seed, path_index)`.
pub fn simulate_branching_until(law: &AngleLaw, t_max: f64, seed: u64, path_index: u64) -> Result<BranchingRun> {
    if t_max < 0.0 || t_max.is_nan() {
        return Err(Error::NegativeTime(t_max));
    }
    let mut g = Grower::new(law, RngStream::branching(seed, path_index));
    let mut birth_times = alloc::vec![0.0];
    let next_birth = loop {
        let at = g.wait();
        if at > t_max {
            break at;
        }
        g.birth(at);
        birth_times.push(at);
    };
    Ok(BranchingRun { birth_times, phases: g.phases, next_birth, law: law.clone(), seed, path_index })
}

/// `Z_k(t) = Σ_{u alive at t} X_u^k`.
pub fn additive_functional(run: &BranchingRun, k: u32, t: f64) -> Result<Complex64> {
    let alive = run.alive(t)?;
    Ok(run.phases[..alive].iter().map(|x| x.powu(k)).sum())
}

/// `Z_1(τ_n)`, the sum of the first `n` phases.
pub fn embedded_walk(run: &BranchingRun, n: u64) -> Result<Complex64> {
    if n == 0 || n > run.len() as u64 {
        return Err(Error::BeyondRunSize { n, size: run.len() as u64 });
    }
    Ok(run.phases[..n as usize].iter().sum())
}

/// Finite-horizon estimates of `W` and `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimates {
    pub w_hat: Complex64,
    pub e_hat: f64,
    pub horizon_t: f64,
    pub horizon_n: u64,
}

/// `ŵ = e^{−Φ_1 τ_n} Z_1(τ_n)` and `ê = n e^{−τ_n}` at the last birth.
pub fn estimate_limits(run: &BranchingRun, phi1: Complex64) -> Result<LimitEstimates> {
    require_superdiffusive(phi1)?;
    let n = run.len() as u64;
    if n < MIN_LIMIT_HORIZON {
        return Err(Error::HorizonTooShort { min: MIN_LIMIT_HORIZON, got: n });
    }
    let tau = run.birth_times[run.len() - 1];
    let z: Complex64 = run.phases.iter().sum();
    Ok(LimitEstimates {
        w_hat: z * (-phi1 * tau).exp(),
        e_hat: n as f64 * libm::exp(-tau),
        horizon_t: tau,
        horizon_n: n,
    })
}

/// The same estimates at a fixed time `t` instead of a birth time.
pub fn estimate_limits_at(run: &BranchingRun, phi1: Complex64, t: f64) -> Result<LimitEstimates> {
    require_superdiffusive(phi1)?;
    let n = run.alive(t)?;
    let z: Complex64 = run.phases[..n].iter().sum();
    Ok(LimitEstimates {
        w_hat: z * (-phi1 * t).exp(),
        e_hat: n as f64 * libm::exp(-t),
        horizon_t: t,
        horizon_n: n as u64,
    })
}

fn require_superdiffusive(phi1: Complex64) -> Result<()> {
    let class = crate::angle::RegimeClassification::from_phi1(phi1, TIE_TOLERANCE);
    if class.regime != crate::angle::Regime::Superdiffusive {
        return Err(Error::RegimeMismatch { expected: "superdiffusive", actual: class.regime.name() });
    }
    Ok(())
}

/// `R_t = e^{−t/2} (Z_1(t) − e^{Φ_1 t} w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: Complex64,
    pub t: f64,
}

pub fn residual(run: &BranchingRun, t: f64, w: Complex64, phi1: Complex64) -> Result<Residual> {
    let z = additive_functional(run, 1, t)?;
    Ok(Residual { value: libm::exp(-t / 2.0) * (z - (phi1 * t).exp() * w), t })
}

/// Population and `Z_1` at an early time `t` and a late time `t + Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoHorizonSample {
    pub t: f64,
    pub late_t: f64,
    pub z1: Complex64,
    pub population: u64,
    pub late_z1: Complex64,
    pub late_population: u64,
}

impl TwoHorizonSample {
    /// `e^{−Φ_1 (t+Δ)} Z_1(t+Δ)`.
    pub fn w_hat(&self, phi1: Complex64) -> Complex64 {
        self.late_z1 * (-phi1 * self.late_t).exp()
    }

    /// `R_t` with `W` replaced by [`Self::w_hat`].
    pub fn residual(&self, phi1: Complex64) -> Residual {
        let value = libm::exp(-self.t / 2.0) * (self.z1 - (phi1 * self.t).exp() * self.w_hat(phi1));
        Residual { value, t: self.t }
    }
}

/// Runs to time `t`, then grows the subtree of every particle alive at `t`
/// independently for a further `delta`.
///
/// By the branching property and the memorylessness of the clocks this has
/// the law of one run observed at `t` and `t + delta`. A subtree's size at
/// age `delta` is geometric with parameter `e^{−delta}` and independent of
/// its jump chain, so each subtree costs one geometric draw plus its parent
/// and angle draws, and its phases stay hot in cache. Consumes the draws of
/// [`simulate_branching_until`] first.
pub fn simulate_two_horizons(
    law: &AngleLaw,
    t: f64,
    delta: f64,
    seed: u64,
    path_index: u64,
) -> Result<TwoHorizonSample> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    if delta < 0.0 || delta.is_nan() {
        return Err(Error::NegativeTime(delta));
    }
    let mut g = Grower::new(law, RngStream::branching(seed, path_index));
    loop {
        let at = g.wait();
        if at > t {
            break;
        }
        g.birth(at);
    }
    let mut main = core::mem::take(&mut g.phases);
    let z1: Complex64 = main.iter().sum();
    let population = main.len() as u64;

    // log(1 − e^{−Δ}); zero-length subtrees are single particles
    let log_q = libm::log1p(-libm::exp(-delta));
    let mut late_z1 = Complex64::new(0.0, 0.0);
    let mut late_population = 0u64;
    for x in main.drain(..) {
        let size = if delta == 0.0 {
            1
        } else {
            1 + libm::floor(libm::log(1.0 - g.rng.uniform()) / log_q) as u64
        };
        g.phases.clear();
        g.phases.push(ONE);
        while (g.phases.len() as u64) < size {
            g.birth(0.0);
        }
        late_z1 += x * g.phases.iter().sum::<Complex64>();
        late_population += size;
    }
    Ok(TwoHorizonSample { t, late_t: t + delta, z1, population, late_z1, late_population })
}
