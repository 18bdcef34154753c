use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Executor;
use crate::angle::{AngleLaw, Regime, RegimeClassification};
use crate::oracle::running_product;
use crate::walk::simulate_path;
use crate::{Error, Result, TIE_TOLERANCE};

/// Acceptance tolerances; relative unless stated otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Component variance in the diffusive regime.
    pub variance: f64,
    /// Component variance in the critical regime.
    pub log_variance: f64,
    /// `E|W|²` against its closed form.
    pub w_abs_second: f64,
    /// Residual component variance in the superdiffusive regime.
    pub residual_variance: f64,
    /// Absolute bound on the `(Re, Im)` covariance.
    pub cross_covariance: f64,
    /// Mean tests, in standard errors.
    pub mean_stderrs: f64,
    /// Mixed CLT variance ratio.
    pub mixed_variance: f64,
    /// Bracket ratio `⟨M, M̄⟩_n / v_n`.
    pub bracket: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            variance: 0.05,
            log_variance: 0.10,
            w_abs_second: 0.10,
            residual_variance: 0.10,
            cross_covariance: 0.03,
            mean_stderrs: 5.0,
            mixed_variance: 0.10,
            bracket: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub law: AngleLaw,
    /// Horizon `n`.
    pub n: u64,
    /// Number of paths `M`.
    pub paths: u64,
    pub seed: u64,
    /// Path indices used are `first_path .. first_path + paths`.
    #[serde(default)]
    pub first_path: u64,
    #[serde(default)]
    pub regime_override: Option<Regime>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// `N / n` for the two-horizon estimate of `W`.
    #[serde(default = "default_horizon_ratio")]
    pub horizon_ratio: u64,
    #[serde(default = "default_tie")]
    pub tie_tolerance: f64,
}

fn default_alpha() -> f64 {
    1e-3
}

fn default_horizon_ratio() -> u64 {
    64
}

fn default_tie() -> f64 {
    TIE_TOLERANCE
}

impl CampaignConfig {
    pub fn new(law: AngleLaw, n: u64, paths: u64, seed: u64) -> Self {
        Self {
            law,
            n,
            paths,
            seed,
            first_path: 0,
            regime_override: None,
            tolerances: Tolerances::default(),
            alpha: default_alpha(),
            horizon_ratio: default_horizon_ratio(),
            tie_tolerance: default_tie(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths < 2 {
            return Err(Error::InvalidConfig("paths must be at least 2".into()));
        }
        if self.n < 2 {
            return Err(Error::InvalidConfig("n must be at least 2".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig("alpha must lie in (0, 1)".into()));
        }
        if self.horizon_ratio < 1 {
            return Err(Error::InvalidConfig("horizon_ratio must be at least 1".into()));
        }
        if !(self.tie_tolerance >= 0.0) {
            return Err(Error::InvalidConfig("tie_tolerance must be nonnegative".into()));
        }
        Ok(())
    }

    /// Classification under the configured tie tolerance, or the override.
    ///
    /// An override must be compatible with the sign of `Re Φ_1 − 1/2`
    /// wherever the target variance depends on it.
    pub fn regime(&self) -> Result<RegimeClassification> {
        let mut class = self.law.classify_regime_with(self.tie_tolerance)?;
        if let Some(regime) = self.regime_override {
            let r = class.phi1.re;
            class.sigma_squared = match regime {
                Regime::Diffusive if r < 0.5 => Some(1.0 / (1.0 - 2.0 * r)),
                Regime::Superdiffusive if r > 0.5 => Some(1.0 / (2.0 * r - 1.0)),
                Regime::Critical => None,
                _ => {
                    return Err(Error::InvalidConfig(alloc::format!(
                        "regime override {regime} is incompatible with Re Φ_1 = {r}"
                    )))
                }
            };
            class.regime = regime;
        }
        Ok(class)
    }
}

/// Per-path endpoint data of a campaign, in path-index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMatrix {
    pub n: u64,
    pub seed: u64,
    pub first_path: u64,
    /// `S_n`
    pub endpoints: Vec<Complex64>,
    /// `S_n^{(2)}`
    pub power2: Vec<Complex64>,
    /// `⟨M, M̄⟩_n`
    pub bracket_modulus: Vec<f64>,
    /// `⟨M⟩_n`
    pub bracket_complex: Vec<Complex64>,
}

impl SampleMatrix {
    pub fn len(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endpoints.is_empty()
    }

    /// Appends a batch simulated on the next range of path indices.
    pub fn append(&mut self, other: SampleMatrix) -> Result<()> {
        if other.n != self.n || other.seed != self.seed || other.first_path != self.first_path + self.len() as u64 {
            return Err(Error::InvalidConfig("batches are not contiguous runs of one campaign".into()));
        }
        self.endpoints.extend(other.endpoints);
        self.power2.extend(other.power2);
        self.bracket_modulus.extend(other.bracket_modulus);
        self.bracket_complex.extend(other.bracket_complex);
        Ok(())
    }
}

struct PathRecord {
    endpoint: Complex64,
    power2: Complex64,
    bracket_modulus: f64,
    bracket_complex: Complex64,
}

/// Simulates `config.paths` walks and records their endpoint functionals.
pub fn run_campaign<E: Executor>(config: &CampaignConfig, exec: &E) -> Result<SampleMatrix> {
    config.validate()?;
    let n = config.n;
    let phi1 = config.law.phi(1);
    let phi2 = config.law.phi(2);
    // 1/|a_{k+1}|² and 1/a_{k+1}² for k = 1..n−1
    let a = running_product(phi1, n);
    let inv_abs: Vec<f64> = a[1..].iter().map(|x| 1.0 / x.norm_sqr()).collect();
    let inv_sq: Vec<Complex64> = a[1..].iter().map(|x| 1.0 / (x * x)).collect();
    let law = &config.law;
    let records = exec.try_map_indices(config.first_path..config.first_path + config.paths, |idx| {
        let path = simulate_path(law, n, config.seed, idx)?;
        let steps = path.steps();
        let positions = path.positions();
        let (mut bm, mut bc) = (0.0, Complex64::new(0.0, 0.0));
        let mut s2 = Complex64::new(0.0, 0.0);
        for k in 1..n as usize {
            s2 += steps[k - 1] * steps[k - 1];
            let drift = phi1 * positions[k - 1] / k as f64;
            bm += (1.0 - drift.norm_sqr()) * inv_abs[k - 1];
            bc += (phi2 * s2 / k as f64 - drift * drift) * inv_sq[k - 1];
        }
        s2 += steps[n as usize - 1] * steps[n as usize - 1];
        Ok(PathRecord { endpoint: path.endpoint(), power2: s2, bracket_modulus: bm, bracket_complex: bc })
    })?;
    Ok(SampleMatrix {
        n,
        seed: config.seed,
        first_path: config.first_path,
        endpoints: records.iter().map(|r| r.endpoint).collect(),
        power2: records.iter().map(|r| r.power2).collect(),
        bracket_modulus: records.iter().map(|r| r.bracket_modulus).collect(),
        bracket_complex: records.iter().map(|r| r.bracket_complex).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ExactSum, Sequential};
    use crate::walk::quadratic_variations;
    use core::f64::consts::{PI, TAU};

    #[test]
    fn two_paths_are_reproducible() {
        let law = AngleLaw::uniform(0.0, TAU).unwrap();
        let cfg = CampaignConfig::new(law, 50, 2, 9);
        let a = run_campaign(&cfg, &Sequential).unwrap();
        let b = run_campaign(&cfg, &Sequential).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a, b);
    }

    #[test]
    fn records_match_path_level_functions() {
        let law = AngleLaw::quarter_turns(0.4, 0.3, 0.2, 0.1).unwrap();
        let cfg = CampaignConfig::new(law.clone(), 200, 3, 4);
        let s = run_campaign(&cfg, &Sequential).unwrap();
        for i in 0..3 {
            let path = simulate_path(&law, 200, 4, i as u64).unwrap();
            let qv = quadratic_variations(&path, law.phi(1));
            assert_eq!(s.endpoints[i], path.endpoint());
            assert!((s.power2[i] - path.step_powers(2)[199]).norm() < 1e-9);
            assert!((s.bracket_modulus[i] - qv.bracket_modulus[199]).abs() < 1e-9);
            assert!((s.bracket_complex[i] - qv.bracket_complex[199]).norm() < 1e-9);
        }
    }

    #[test]
    fn batches_merge_exactly() {
        let law = AngleLaw::constant(PI / 4.0).unwrap();
        let mut whole_cfg = CampaignConfig::new(law, 64, 30, 2);
        let whole = run_campaign(&whole_cfg, &Sequential).unwrap();
        whole_cfg.paths = 12;
        let mut left = run_campaign(&whole_cfg, &Sequential).unwrap();
        whole_cfg.first_path = 12;
        whole_cfg.paths = 18;
        let right = run_campaign(&whole_cfg, &Sequential).unwrap();
        let mean = |v: &[Complex64]| v.iter().map(|z| z.re).collect::<ExactSum>().value() / v.len() as f64;
        let weighted = (12.0 * mean(&left.endpoints) + 18.0 * mean(&right.endpoints)) / 30.0;
        assert!((weighted - mean(&whole.endpoints)).abs() < 1e-12);
        left.append(right).unwrap();
        assert_eq!(left, whole);
    }

    #[test]
    fn config_validation() {
        let law = AngleLaw::uniform(0.0, TAU).unwrap();
        let mut cfg = CampaignConfig::new(law, 10, 1, 0);
        assert!(cfg.validate().is_err());
        cfg.paths = 2;
        cfg.alpha = 1.0;
        assert!(cfg.validate().is_err());
        cfg.alpha = 0.01;
        assert!(cfg.validate().is_ok());
        cfg.regime_override = Some(Regime::Superdiffusive);
        assert!(cfg.regime().is_err());
        cfg.regime_override = Some(Regime::Critical);
        assert_eq!(cfg.regime().unwrap().regime, Regime::Critical);
    }
}
