//! Regime verifications and the individual checks they are built from.
//!
//! Monte Carlo estimates of asymptotic quantities carry a finite-horizon
//! bias. Where the exact finite-horizon value is available from the
//! oracles, the estimate reported in a criterion is
//! `raw − (exact finite value − asymptotic value)` and `raw_estimate` keeps
//! the uncorrected number.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    chi_square_gof, gaussian_fit_target, geometric_probabilities, ks_test, mean_and_stderr, run_campaign,
    two_sample_z, CampaignConfig, ComplexSampleStats, Executor, GaussianFitReport, GaussianTarget, ExactSum,
};
use crate::angle::{AngleLaw, Regime, RegimeClassification};
use crate::branching::{
    additive_functional, embedded_walk, estimate_limits, simulate_branching, simulate_branching_until,
    simulate_two_horizons,
};
use crate::oracle::{
    abs_square_recursion, bracket_normalizer, continuous_moments, endpoint_moments, enumerate_exact, harmonic,
    residual_moments, running_product, square_recursion, w_moments, ComplexMoments,
};
use crate::special::gamma_ratio;
use crate::walk::{lattice_simulate, martingale_increments, simulate_path, LatticeParams};
use crate::{Error, Result};

/// Horizon of the exact critical-rate identity.
pub const CRITICAL_ORACLE_N: u64 = 1_000_000;
/// Accepted range of `u_n / (n ln n)` at [`CRITICAL_ORACLE_N`].
pub const CRITICAL_RATE_BAND: (f64, f64) = (1.035, 1.049);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// `|estimate − target| ≤ tolerance`
    Within,
    /// `estimate < target`
    Below,
    /// `estimate > target`
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub criterion: String,
    pub target: f64,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub tolerance: f64,
    pub comparison: Comparison,
    /// Monte Carlo value before finite-horizon bias subtraction.
    pub raw_estimate: Option<f64>,
    pub passed: bool,
}

impl CriterionResult {
    pub fn within(criterion: impl Into<String>, target: f64, estimate: f64, stderr: Option<f64>, tolerance: f64) -> Self {
        Self {
            criterion: criterion.into(),
            target,
            estimate,
            stderr,
            tolerance,
            comparison: Comparison::Within,
            raw_estimate: None,
            passed: (estimate - target).abs() <= tolerance,
        }
    }

    pub fn below(criterion: impl Into<String>, bound: f64, estimate: f64, stderr: Option<f64>) -> Self {
        Self {
            criterion: criterion.into(),
            target: bound,
            estimate,
            stderr,
            tolerance: 0.0,
            comparison: Comparison::Below,
            raw_estimate: None,
            passed: estimate < bound,
        }
    }

    pub fn above(criterion: impl Into<String>, bound: f64, estimate: f64, stderr: Option<f64>) -> Self {
        Self {
            criterion: criterion.into(),
            target: bound,
            estimate,
            stderr,
            tolerance: 0.0,
            comparison: Comparison::Above,
            raw_estimate: None,
            passed: estimate > bound,
        }
    }

    /// Pass/fail from an external decision, recorded as `estimate ∈ {0, 1}`.
    pub fn flag(criterion: impl Into<String>, passed: bool) -> Self {
        let mut c = Self::within(criterion, 1.0, if passed { 1.0 } else { 0.0 }, None, 0.0);
        c.passed = passed;
        c
    }

    fn with_raw(mut self, raw: f64) -> Self {
        self.raw_estimate = Some(raw);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub name: String,
    pub report: GaussianFitReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub title: String,
    pub regime: Option<RegimeClassification>,
    /// Checks that decide `passed`.
    pub criteria: Vec<CriterionResult>,
    /// Reported alongside, never deciding `passed`.
    pub diagnostics: Vec<CriterionResult>,
    pub fits: Vec<NamedFit>,
    pub passed: bool,
}

impl VerificationReport {
    fn new(title: impl Into<String>, regime: Option<RegimeClassification>) -> Self {
        Self { title: title.into(), regime, criteria: Vec::new(), diagnostics: Vec::new(), fits: Vec::new(), passed: false }
    }

    fn finish(mut self) -> Self {
        self.passed = !self.criteria.is_empty() && self.criteria.iter().all(|c| c.passed);
        self
    }

    /// Criteria that failed.
    pub fn failures(&self) -> impl Iterator<Item = &CriterionResult> {
        self.criteria.iter().filter(|c| !c.passed)
    }
}

/// Runs the verification matching the configured regime.
pub fn verify<E: Executor>(config: &CampaignConfig, exec: &E) -> Result<VerificationReport> {
    match config.regime()?.regime {
        Regime::Diffusive => verify_diffusive(config, exec),
        Regime::Critical => verify_critical(config, exec),
        Regime::Superdiffusive => verify_superdiffusive(config, exec),
    }
}

fn require(config: &CampaignConfig, expected: Regime) -> Result<RegimeClassification> {
    config.validate()?;
    let class = config.regime()?;
    if class.regime != expected {
        return Err(Error::RegimeMismatch { expected: expected.name(), actual: class.regime.name() });
    }
    Ok(class)
}

/// Variance and covariance criteria for a scaled complex sample, with the
/// exact finite-horizon bias removed.
fn component_criteria(
    report: &mut VerificationReport,
    label: &str,
    st: &ComplexSampleStats,
    exact_cov: [[f64; 2]; 2],
    asymptotic_variance: f64,
    rel_tol: f64,
    cross_tol: f64,
) {
    let m = st.count as f64;
    for (c, part) in [(0, "Re"), (1, "Im")] {
        let raw = st.cov[c][c];
        let corrected = raw - (exact_cov[c][c] - asymptotic_variance);
        let se = raw * libm::sqrt(2.0 / (m - 1.0));
        report.criteria.push(
            CriterionResult::within(
                format!("{label}: Var {part} vs asymptotic σ²/2"),
                asymptotic_variance,
                corrected,
                Some(se),
                rel_tol * asymptotic_variance,
            )
            .with_raw(raw),
        );
    }
    let raw = st.cov[0][1];
    let se = libm::sqrt((st.cov[0][0] * st.cov[1][1] + raw * raw) / m);
    report.diagnostics.push(
        CriterionResult::within(format!("{label}: Cov(Re, Im) vs finite-n exact"), exact_cov[0][1], raw, Some(se), cross_tol),
    );
    report.criteria.push(
        CriterionResult::within(format!("{label}: |Cov(Re, Im)| vs 0"), 0.0, raw - exact_cov[0][1], Some(se), cross_tol)
            .with_raw(raw),
    );
}

fn normality_criteria(out: &mut Vec<CriterionResult>, label: &str, fit: &GaussianFitReport) {
    for (p, part) in fit.component_normality_pvalues.iter().zip(["Re", "Im"]) {
        out.push(CriterionResult::above(format!("{label}: normality p-value {part}"), fit.alpha, *p, None));
    }
}

fn exact_target(m: &ComplexMoments) -> GaussianTarget {
    GaussianTarget { mean: m.mean, cov: m.covariance() }
}

/// `S_n/√n → 𝒩_ℂ(0, 1/(1 − 2 Re Φ_1))`.
pub fn verify_diffusive<E: Executor>(config: &CampaignConfig, exec: &E) -> Result<VerificationReport> {
    let class = require(config, Regime::Diffusive)?;
    let sigma2 = class.sigma_squared.unwrap_or(f64::NAN);
    let (phi1, phi2) = (config.law.phi(1), config.law.phi(2));
    let n = config.n;
    let scale = 1.0 / libm::sqrt(n as f64);
    let samples = run_campaign(config, exec)?;
    let xs: Vec<Complex64> = samples.endpoints.iter().map(|z| z * scale).collect();
    let st = ComplexSampleStats::from_samples(&xs);
    let exact = endpoint_moments(phi1, phi2, n).scaled(scale);
    let tol = config.tolerances;

    let mut report = VerificationReport::new("diffusive CLT: S_n / √n", Some(class));
    component_criteria(&mut report, "S_n/√n", &st, exact.covariance(), sigma2 / 2.0, tol.variance, tol.cross_covariance);
    let fit = gaussian_fit_target(&xs, &exact_target(&exact), config.alpha)?;
    normality_criteria(&mut report.criteria, "S_n/√n", &fit);
    report.criteria.push(CriterionResult::flag("S_n/√n: Gaussian fit against finite-n exact mean and covariance", fit.passed));
    report.fits.push(NamedFit { name: "S_n/√n".into(), report: fit });

    let u = abs_square_recursion(phi1, n)[n as usize - 1] / n as f64;
    report.diagnostics.push(CriterionResult::within("oracle E|S_n|²/n vs σ²", sigma2, u, None, tol.variance * sigma2));
    Ok(report.finish())
}

/// `S_n/√(n ln n) → 𝒩_ℂ(0, 1)`.
pub fn verify_critical<E: Executor>(config: &CampaignConfig, exec: &E) -> Result<VerificationReport> {
    let class = require(config, Regime::Critical)?;
    let (phi1, phi2) = (config.law.phi(1), config.law.phi(2));
    let n = config.n;
    let tol = config.tolerances;
    let mut report = VerificationReport::new("critical CLT: S_n / √(n ln n)", Some(class));

    let big = CRITICAL_ORACLE_N;
    let u_big = abs_square_recursion(phi1, big)[big as usize - 1];
    let nh = big as f64 * harmonic(big);
    report.criteria.push(CriterionResult::below("oracle: relative error of u_n vs n·H_n at n = 10^6", 1e-9, (u_big - nh).abs() / nh, None));
    let (lo, hi) = CRITICAL_RATE_BAND;
    let rate = u_big / (big as f64 * libm::log(big as f64));
    report.criteria.push(CriterionResult::within("oracle: u_n / (n ln n) at n = 10^6", (lo + hi) / 2.0, rate, None, (hi - lo) / 2.0));

    let scale = 1.0 / libm::sqrt(n as f64 * libm::log(n as f64));
    let samples = run_campaign(config, exec)?;
    let xs: Vec<Complex64> = samples.endpoints.iter().map(|z| z * scale).collect();
    let st = ComplexSampleStats::from_samples(&xs);
    let exact = endpoint_moments(phi1, phi2, n).scaled(scale);
    component_criteria(&mut report, "S_n/√(n ln n)", &st, exact.covariance(), 0.5, tol.log_variance, tol.cross_covariance);
    // the cross-covariance bound is a diagnostic here: only variances are claimed at log rate
    if let Some(c) = report.criteria.pop() {
        report.diagnostics.push(c);
    }
    let u = abs_square_recursion(phi1, n)[n as usize - 1];
    report.diagnostics.push(CriterionResult::within(
        "oracle u_n / (n ln n) at campaign n",
        1.0,
        u / (n as f64 * libm::log(n as f64)),
        None,
        tol.log_variance,
    ));
    let fit = gaussian_fit_target(&xs, &exact_target(&exact), config.alpha)?;
    normality_criteria(&mut report.diagnostics, "S_n/√(n ln n)", &fit);
    report.diagnostics.push(CriterionResult::flag("Gaussian fit against finite-n exact mean and covariance", fit.passed));
    report.fits.push(NamedFit { name: "S_n/√(n ln n)".into(), report: fit });
    Ok(report.finish())
}

/// W moments, the residual CLT and the a.s. convergence proxy.
///
/// `config.n` is the residual horizon and `N = horizon_ratio · n` the
/// horizon of the `W` estimates. The moment test uses the branching
/// estimate `e^{−Φ_1 τ_N} Z_1(τ_N)`, whose mean is exactly 1; the walk
/// estimate `S_N N^{−Φ_1}` has mean `a_N N^{−Φ_1} → 1/Γ(1 + Φ_1)` and is
/// checked against its exact moments instead.
pub fn verify_superdiffusive<E: Executor>(config: &CampaignConfig, exec: &E) -> Result<VerificationReport> {
    let class = require(config, Regime::Superdiffusive)?;
    let law = &config.law;
    let (phi1, phi2) = (law.phi(1), law.phi(2));
    let w = w_moments(law)?;
    let tol = config.tolerances;
    let n = config.n;
    let big = n.checked_mul(config.horizon_ratio).ok_or_else(|| Error::InvalidConfig("N = K·n overflows".into()))?;
    let paths = config.first_path..config.first_path + config.paths;
    let mut report = VerificationReport::new("superdiffusive limits: W and the residual CLT", Some(class));

    let branch_w = exec.try_map_indices(paths.clone(), |idx| {
        let run = simulate_branching(law, big, config.seed, idx)?;
        Ok(estimate_limits(&run, phi1)?.w_hat)
    })?;
    let bst = ComplexSampleStats::from_samples(&branch_w);
    let [se_re, se_im] = bst.mean_stderr();
    report.criteria.push(CriterionResult::within("branching ŵ: mean Re vs 1", 1.0, bst.mean.re, Some(se_re), tol.mean_stderrs * se_re));
    report.criteria.push(CriterionResult::within("branching ŵ: mean Im vs 0", 0.0, bst.mean.im, Some(se_im), tol.mean_stderrs * se_im));
    let abs2: Vec<f64> = branch_w.iter().map(|z| z.norm_sqr()).collect();
    let (abs2_mean, abs2_se) = mean_and_stderr(&abs2);
    report.criteria.push(CriterionResult::within(
        "branching ŵ: mean |ŵ|² vs E|W|²",
        w.abs_second,
        abs2_mean,
        Some(abs2_se),
        tol.w_abs_second * w.abs_second,
    ));

    let c = (phi1 * libm::log(n as f64 / big as f64)).exp();
    let walk = exec.try_map_indices(paths, |idx| {
        let path = simulate_path(law, big, config.seed, idx)?;
        Ok((path.position(n as usize), path.endpoint()))
    })?;
    let norm_big = (-phi1 * libm::log(big as f64)).exp();
    let walk_w: Vec<Complex64> = walk.iter().map(|&(_, s)| s * norm_big).collect();
    let wst = ComplexSampleStats::from_samples(&walk_w);
    let exact_w = endpoint_moments(phi1, phi2, big);
    let exact_w_mean = exact_w.mean * norm_big;
    let [se_re, se_im] = wst.mean_stderr();
    report.diagnostics.push(CriterionResult::within("walk ŵ: mean Re vs exact a_N N^{−Φ_1}", exact_w_mean.re, wst.mean.re, Some(se_re), tol.mean_stderrs * se_re));
    report.diagnostics.push(CriterionResult::within("walk ŵ: mean Im vs exact a_N N^{−Φ_1}", exact_w_mean.im, wst.mean.im, Some(se_im), tol.mean_stderrs * se_im));
    let walk_abs2: Vec<f64> = walk_w.iter().map(|z| z.norm_sqr()).collect();
    let (wa_mean, wa_se) = mean_and_stderr(&walk_abs2);
    let exact_abs2 = exact_w.abs_second * norm_big.norm_sqr();
    report.diagnostics.push(CriterionResult::within("walk ŵ: mean |ŵ|² vs exact u_N N^{−2Re Φ_1}", exact_abs2, wa_mean, Some(wa_se), tol.mean_stderrs * wa_se));

    let scale = 1.0 / libm::sqrt(n as f64);
    let residuals: Vec<Complex64> = walk.iter().map(|&(s_n, s_big)| (s_n - c * s_big) * scale).collect();
    let rst = ComplexSampleStats::from_samples(&residuals);
    let exact_r = residual_moments(phi1, phi2, n, big).scaled(scale);
    let sigma2 = class.sigma_squared.unwrap_or(f64::NAN);
    component_criteria(&mut report, "residual (S_n − n^{Φ_1} ŵ)/√n", &rst, exact_r.covariance(), sigma2 / 2.0, tol.residual_variance, tol.cross_covariance);
    if let Some(c) = report.criteria.pop() {
        report.diagnostics.push(c);
    }
    let fit = gaussian_fit_target(&residuals, &exact_target(&exact_r), config.alpha)?;
    normality_criteria(&mut report.diagnostics, "residual", &fit);
    report.diagnostics.push(CriterionResult::flag("residual: Gaussian fit against finite-n exact mean and covariance", fit.passed));
    report.fits.push(NamedFit { name: "residual".into(), report: fit });

    // a.s. proxy on the first path: sup over dyadic m ≥ 2^j of |S_m m^{−Φ_1} − ŵ|
    let path = simulate_path(law, big, config.seed, config.first_path)?;
    let w_hat = path.endpoint() * norm_big;
    let levels = 63 - big.leading_zeros() as usize;
    let dev: Vec<f64> = (0..=levels)
        .map(|i| {
            let m = 1u64 << i;
            (path.position(m as usize) * (-phi1 * libm::log(m as f64)).exp() - w_hat).norm()
        })
        .collect();
    let sups: Vec<f64> = (0..dev.len()).map(|j| dev[j..].iter().copied().fold(0.0, f64::max)).collect();
    let shrinking = sups.windows(2).all(|w| w[1] <= w[0]) && sups[sups.len() - 2] < sups[0];
    report.diagnostics.push(CriterionResult::flag("a.s. proxy: dyadic sup deviation non-increasing in j", shrinking));
    Ok(report.finish())
}

/// Two-sample comparison of `Z_1(τ_n)` with `S_n`; all `|z| < z_max`.
pub fn verify_embedding<E: Executor>(law: &AngleLaw, n: u64, paths: u64, seed: u64, z_max: f64, exec: &E) -> Result<VerificationReport> {
    let branch = exec.try_map_indices(0..paths, |idx| embedded_walk(&simulate_branching(law, n, seed, idx)?, n))?;
    let walk = exec.try_map_indices(0..paths, |idx| Ok(simulate_path(law, n, seed, idx)?.endpoint()))?;
    let mut report = VerificationReport::new(format!("embedding: Z_1(τ_{n}) vs S_{n}"), None);
    type Feature = (&'static str, fn(Complex64) -> f64);
    let features: [Feature; 5] = [
        ("Re", |z| z.re),
        ("Im", |z| z.im),
        ("Re²", |z| z.re * z.re),
        ("Im²", |z| z.im * z.im),
        ("Re·Im", |z| z.re * z.im),
    ];
    for (name, f) in features {
        let a: Vec<f64> = branch.iter().map(|&z| f(z)).collect();
        let b: Vec<f64> = walk.iter().map(|&z| f(z)).collect();
        let z = two_sample_z(&a, &b);
        report.criteria.push(CriterionResult::below(format!("|z| for mean {name}"), z_max, z.abs(), None));
    }
    Ok(report.finish())
}

/// `E Z_1(t)`, `E|Z_1(t)|²` against closed forms, and `N_1` against the
/// geometric law.
pub fn verify_branching_moments<E: Executor>(
    laws: &[AngleLaw],
    t: f64,
    paths: u64,
    seed: u64,
    alpha: f64,
    mean_stderrs: f64,
    exec: &E,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(format!("branching moments at t = {t}"), None);
    for (li, law) in laws.iter().enumerate() {
        let exact = continuous_moments(law, 1, t)?;
        let runs = exec.try_map_indices(0..paths, |idx| {
            let run = simulate_branching_until(law, t.max(1.0), seed, idx)?;
            Ok((additive_functional(&run, 1, t)?, run.population(1.0)?))
        })?;
        let zs: Vec<Complex64> = runs.iter().map(|r| r.0).collect();
        let st = ComplexSampleStats::from_samples(&zs);
        let [se_re, se_im] = st.mean_stderr();
        report.criteria.push(CriterionResult::within(format!("law {li}: mean Re Z_1(t) vs Re e^{{tΦ_1}}"), exact.mean.re, st.mean.re, Some(se_re), mean_stderrs * se_re));
        report.criteria.push(CriterionResult::within(format!("law {li}: mean Im Z_1(t) vs Im e^{{tΦ_1}}"), exact.mean.im, st.mean.im, Some(se_im), mean_stderrs * se_im));
        let abs2: Vec<f64> = zs.iter().map(|z| z.norm_sqr()).collect();
        let (mean, se) = mean_and_stderr(&abs2);
        report.criteria.push(CriterionResult::within(format!("law {li}: mean |Z_1(t)|² vs closed form"), exact.abs_second, mean, Some(se), mean_stderrs * se));

        let cells = 40;
        let mut counts = alloc::vec![0u64; cells];
        for &(_, n1) in &runs {
            counts[(n1 as usize).min(cells) - 1] += 1;
        }
        let chi = chi_square_gof(&counts, &geometric_probabilities(libm::exp(-1.0), cells))?;
        report.criteria.push(CriterionResult::above(format!("law {li}: N_1 geometric chi-square p-value"), alpha, chi.p_value, None));
    }
    Ok(report.finish())
}

/// `E|R_t|²/(N_t e^{−t}) → 1/(2Re Φ_1 − 1)` and Gaussianity of
/// `R_t/√(N_t e^{−t})`, with `W` read at `t + ln K`.
///
/// With `W` replaced by its value at `t + Δ` the exact mean of the ratio
/// is `(1 − e^{−(2Re Φ_1 − 1)Δ})/(2Re Φ_1 − 1)` for every `t`; that bias is
/// subtracted and the Gaussian fit targets the same finite-`Δ` variance.
#[allow(clippy::too_many_arguments)]
pub fn verify_mixed_clt<E: Executor>(
    law: &AngleLaw,
    t: f64,
    horizon_ratio: u64,
    paths: u64,
    seed: u64,
    alpha: f64,
    rel_tol: f64,
    exec: &E,
) -> Result<VerificationReport> {
    let class = law.classify_regime()?;
    if class.regime != Regime::Superdiffusive {
        return Err(Error::RegimeMismatch { expected: "superdiffusive", actual: class.regime.name() });
    }
    let phi1 = law.phi(1);
    let delta = libm::log(horizon_ratio as f64);
    let samples = exec.try_map_indices(0..paths, |idx| simulate_two_horizons(law, t, delta, seed, idx))?;
    let e_t = libm::exp(-t);
    let xi: Vec<Complex64> = samples
        .iter()
        .map(|s| s.residual(phi1).value / libm::sqrt(s.population as f64 * e_t))
        .collect();
    let ratio: Vec<f64> = xi.iter().map(|z| z.norm_sqr()).collect();
    let (raw, se) = mean_and_stderr(&ratio);
    let g = 2.0 * phi1.re - 1.0;
    let asymptotic = 1.0 / g;
    let finite = -libm::expm1(-g * delta) / g;

    let mut report = VerificationReport::new(format!("mixed CLT at t = {t}, W read at t + ln {horizon_ratio}"), Some(class));
    report.criteria.push(
        CriterionResult::within("mean |R_t|²/(N_t e^{−t}) vs 1/(2Re Φ_1 − 1)", asymptotic, raw - (finite - asymptotic), Some(se), rel_tol * asymptotic)
            .with_raw(raw),
    );
    let fit = gaussian_fit_target(&xi, &GaussianTarget::circular(finite), alpha)?;
    report.criteria.push(CriterionResult::flag("R_t/√(N_t e^{−t}) passes the Gaussian fit", fit.passed));
    report.diagnostics.push(CriterionResult::flag("characteristic function on the grid", fit.charfn_passed));
    report.fits.push(NamedFit { name: "R_t/√(N_t e^{−t})".into(), report: fit });
    let e_hat: Vec<f64> = samples.iter().map(|s| s.population as f64 * e_t).collect();
    let ks = ks_test(&e_hat, |x| -libm::expm1(-x))?;
    report.diagnostics.push(CriterionResult::above("e^{−t} N_t vs Exp(1), KS p-value", alpha, ks.p_value, None));
    Ok(report.finish())
}

/// `⟨M, M̄⟩_n / v_n → 1` and `⟨M⟩_n / v_n → 0` across paths.
pub fn verify_quadratic_variation<E: Executor>(config: &CampaignConfig, exec: &E) -> Result<VerificationReport> {
    config.validate()?;
    let n = config.n;
    let samples = run_campaign(config, exec)?;
    let v = bracket_normalizer(&running_product(config.law.phi(1), n))[n as usize - 1];
    let modulus: Vec<f64> = samples.bracket_modulus.iter().map(|b| b / v).collect();
    let complex: Vec<f64> = samples.bracket_complex.iter().map(|b| b.norm() / v).collect();
    let (mm, ms) = mean_and_stderr(&modulus);
    let (cm, cs) = mean_and_stderr(&complex);
    let tol = config.tolerances.bracket;
    let mut report = VerificationReport::new(format!("quadratic variations at n = {n}"), None);
    report.criteria.push(CriterionResult::within("mean ⟨M, M̄⟩_n / v_n vs 1", 1.0, mm, Some(ms), tol));
    report.criteria.push(CriterionResult::below("mean |⟨M⟩_n| / v_n", tol, cm, Some(cs)));
    Ok(report.finish())
}

/// Lattice and complex walks on shared streams agree position by position.
pub fn verify_coupling(params: LatticeParams, n: u64, paths: u64, seed: u64) -> Result<VerificationReport> {
    let law = params.law()?;
    let mut worst: f64 = 0.0;
    let mut mismatches = 0u64;
    for idx in 0..paths {
        let lattice = lattice_simulate(params, n, seed, idx)?;
        let complex = simulate_path(&law, n, seed, idx)?;
        for (l, z) in lattice.positions.iter().zip(complex.positions()) {
            let err = (Complex64::new(l[0] as f64, l[1] as f64) - z).norm();
            worst = worst.max(err);
            if l[0] != libm::round(z.re) as i64 || l[1] != libm::round(z.im) as i64 {
                mismatches += 1;
            }
        }
    }
    let mut report = VerificationReport::new(format!("lattice coupling, {paths} paths × n = {n}"), None);
    report.criteria.push(CriterionResult::within("positions differing after rounding", 0.0, mismatches as f64, None, 0.0));
    report.diagnostics.push(CriterionResult::below("max |lattice − complex|", 1e-9, worst, None));
    Ok(report.finish())
}

/// Enumerated moments against the recursions for `n ≤ n_max`.
pub fn verify_exact_oracles(laws: &[AngleLaw], n_max: u64, tolerance: f64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(format!("exact enumeration vs recursions, n ≤ {n_max}"), None);
    for (li, law) in laws.iter().enumerate() {
        let (phi1, phi2) = (law.phi(1), law.phi(2));
        let a = running_product(phi1, n_max);
        let u = abs_square_recursion(phi1, n_max);
        let q = square_recursion(phi1, phi2, n_max);
        let mut worst: f64 = 0.0;
        for n in 1..=n_max {
            let i = n as usize - 1;
            let d = enumerate_exact(law, n)?;
            if d.total_probability() != num_rational::Ratio::from_integer(1) {
                worst = f64::INFINITY;
            }
            worst = worst
                .max((d.mean() - a[i]).norm())
                .max((d.abs_second() - u[i]).abs())
                .max((d.second() - q[i]).norm());
        }
        report.criteria.push(CriterionResult::within(format!("law {li}: max moment error"), 0.0, worst, None, tolerance));
    }
    Ok(report.finish())
}

/// Running product against `Γ(n + Φ)/(Γ(n)Γ(1 + Φ))` for every `n ≤ n_max`.
pub fn verify_gamma_identity(phis: &[Complex64], n_max: u64, tolerance: f64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(format!("Gamma-ratio identity, n ≤ {n_max}"), None);
    for &phi in phis {
        let a = running_product(phi, n_max);
        let worst = a
            .iter()
            .enumerate()
            .map(|(i, x)| (x - gamma_ratio(phi, i as u64 + 1)).norm() / x.norm())
            .fold(0.0, f64::max);
        report.criteria.push(CriterionResult::within(format!("Φ = {phi}: max relative error"), 0.0, worst, None, tolerance));
    }
    Ok(report.finish())
}

/// Path average of `Σ_k |ΔM_k|⁴ / v_n²`.
pub fn lindeberg_ratio<E: Executor>(law: &AngleLaw, n: u64, paths: u64, seed: u64, exec: &E) -> Result<f64> {
    let phi1 = law.phi(1);
    let v = bracket_normalizer(&running_product(phi1, n))[n as usize - 1];
    let sums = exec.try_map_indices(0..paths, |idx| {
        let path = simulate_path(law, n, seed, idx)?;
        Ok(martingale_increments(&path, phi1).iter().map(|d| d.norm_sqr() * d.norm_sqr()).collect::<ExactSum>().value())
    })?;
    Ok(sums.iter().copied().collect::<ExactSum>().value() / paths as f64 / (v * v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Sequential;
    use core::f64::consts::{PI, TAU};

    #[test]
    fn coupling_and_oracles() {
        let params = LatticeParams::new(0.4, 0.3, 0.2, 0.1).unwrap();
        assert!(verify_coupling(params, 256, 20, 1).unwrap().passed);
        let laws = [AngleLaw::quarter_turns(0.4, 0.3, 0.2, 0.1).unwrap(), AngleLaw::constant(PI / 2.0).unwrap()];
        assert!(verify_exact_oracles(&laws, 5, 1e-12).unwrap().passed);
        let phis = [Complex64::new(0.5, 0.0), Complex64::new(0.2, 0.2)];
        assert!(verify_gamma_identity(&phis, 2000, 1e-8).unwrap().passed);
    }

    #[test]
    fn regime_mismatch_is_an_error() {
        let cfg = CampaignConfig::new(AngleLaw::constant(PI / 4.0).unwrap(), 64, 10, 0);
        assert!(matches!(verify_diffusive(&cfg, &Sequential), Err(Error::RegimeMismatch { .. })));
        let cfg = CampaignConfig::new(AngleLaw::discrete(alloc::vec![(0.0, 0.5), (PI, 0.5)]).unwrap(), 64, 10, 0);
        assert!(matches!(verify(&cfg, &Sequential), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn small_diffusive_campaign() {
        let cfg = CampaignConfig::new(AngleLaw::uniform(0.0, TAU).unwrap(), 256, 20_000, 5);
        let report = verify(&cfg, &Sequential).unwrap();
        assert!(report.passed, "{:#?}", report.criteria);
    }

    #[test]
    fn lindeberg_ratio_vanishes() {
        let law = AngleLaw::quarter_turns(0.4, 0.3, 0.2, 0.1).unwrap();
        let r: Vec<f64> = [1u64 << 8, 1 << 11, 1 << 14]
            .iter()
            .map(|&n| lindeberg_ratio(&law, n, 40, 3, &Sequential).unwrap())
            .collect();
        assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
    }

    #[test]
    fn bracket_ratio_for_the_uniform_law() {
        let mut cfg = CampaignConfig::new(AngleLaw::uniform(0.0, TAU).unwrap(), 1 << 12, 100, 2);
        cfg.tolerances.bracket = 0.1;
        assert!(verify_quadratic_variation(&cfg, &Sequential).unwrap().passed);
    }

    #[test]
    fn criterion_constructors() {
        assert!(CriterionResult::within("x", 1.0, 1.05, None, 0.1).passed);
        assert!(!CriterionResult::within("x", 1.0, 1.2, None, 0.1).passed);
        assert!(CriterionResult::below("x", 1.0, 0.5, None).passed);
        assert!(!CriterionResult::above("x", 1.0, 0.5, None).passed);
        assert!(!CriterionResult::flag("x", false).passed);
    }
}
