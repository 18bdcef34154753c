//! Subcommand dispatch.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spiral_erw_core::angle::{AngleLaw, Regime};
use spiral_erw_core::branching::{embedded_walk, estimate_limits_at, simulate_branching};
use spiral_erw_core::oracle::MomentTable;
use spiral_erw_core::stats::{
    verify, verify_branching_moments, verify_coupling, verify_embedding, verify_mixed_clt,
    verify_quadratic_variation, Executor, VerificationReport,
};
use spiral_erw_core::walk::{lattice_simulate, simulate_path};

use crate::config::{Config, FlagOverrides, SEED_ENV};
use crate::output::{self, BranchingRecord, Metadata};
use crate::Rayon;

/// Exit status for a verification that ran but did not pass.
pub const EXIT_FAILED: u8 = 1;
/// Exit status for configuration and usage errors.
pub const EXIT_ERROR: u8 = 2;

/// Steps per path in `figure`.
pub const FIGURE_STEPS: u64 = 1000;

#[derive(Debug, Parser)]
#[command(name = "spiral-erw", version, about = "Planar elephant random walk with random rotations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub paths: Option<u64>,
    #[arg(long, global = true)]
    pub n: Option<u64>,
    /// Override a configuration key, e.g. `--set tolerances.variance=0.1`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate walk paths to `paths.csv` (and `lattice.csv` with a lattice config).
    Simulate,
    /// Write the exact moment table to `moments.csv`.
    Oracle,
    /// Simulate branching runs to `branching.jsonl`.
    Branching,
    /// Print the regime classification as JSON.
    Regime,
    /// Run a verification, writing `report.json` and `summary.csv`.
    Verify {
        #[arg(long, value_enum, default_value_t = Check::Regime)]
        check: Check,
    },
    /// Three 1000-step paths around the critical rotation π/3.
    Figure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// The limit theorem matching the law's regime.
    Regime,
    Embedding,
    BranchingMoments,
    MixedClt,
    QuadraticVariation,
    Coupling,
}

/// Runs the parsed invocation and returns the process exit status.
pub fn run(cli: Cli) -> Result<u8> {
    let env_seed = std::env::var(SEED_ENV).ok();
    let flags = FlagOverrides { n: cli.global.n, paths: cli.global.paths, seed: cli.global.seed };
    let config = Config::load(cli.global.config.as_deref(), &cli.global.sets, flags, env_seed.as_deref())?;
    let meta = Metadata { config_sha256: config.hash(), seed: config.seed };
    let out = cli.global.out.as_path();
    if !matches!(cli.command, Command::Regime) {
        std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    }
    match cli.command {
        Command::Simulate => simulate(&config, &meta, out),
        Command::Oracle => oracle(&config, &meta, out),
        Command::Branching => branching(&config, &meta, out),
        Command::Regime => regime(&config, &meta),
        Command::Verify { check } => run_verify(&config, &meta, out, check),
        Command::Figure => figure(&config, &meta, out),
    }
}

fn simulate(config: &Config, meta: &Metadata, out: &Path) -> Result<u8> {
    let law = config.law()?;
    let paths = Rayon.try_map_indices(0..config.paths, |idx| simulate_path(&law, config.n, config.seed, idx))?;
    output::write_paths_csv(&out.join("paths.csv"), meta, &paths)?;
    if let Some(params) = config.lattice {
        let lattice = Rayon.try_map_indices(0..config.paths, |idx| {
            lattice_simulate(params, config.n, config.seed, idx).map(|p| (idx, p))
        })?;
        output::write_lattice_csv(&out.join("lattice.csv"), meta, &lattice)?;
    }
    Ok(0)
}

fn oracle(config: &Config, meta: &Metadata, out: &Path) -> Result<u8> {
    let law = config.law()?;
    let table = MomentTable::build(law.phi(1), law.phi(2), config.n)?;
    output::write_moment_table_csv(&out.join("moments.csv"), meta, &table)?;
    Ok(0)
}

fn branching(config: &Config, meta: &Metadata, out: &Path) -> Result<u8> {
    let law = config.law()?;
    let class = law.classify_regime_with(config.tie_tolerance)?;
    let phi1 = law.phi(1);
    let n = config.n;
    let records = Rayon.try_map_indices(0..config.paths, |idx| {
        let run = simulate_branching(&law, n, config.seed, idx)?;
        let tau = run.birth_times()[n as usize - 1];
        let z1 = embedded_walk(&run, n)?;
        let w = match class.regime {
            Regime::Superdiffusive => Some(estimate_limits_at(&run, phi1, tau)?.w_hat),
            _ => None,
        };
        Ok(BranchingRecord {
            path_id: idx,
            n,
            tau_n: tau,
            z1_re: z1.re,
            z1_im: z1.im,
            w_re: w.map(|w| w.re),
            w_im: w.map(|w| w.im),
            e: n as f64 * (-tau).exp(),
        })
    })?;
    output::write_branching_jsonl(&out.join("branching.jsonl"), meta, &records)?;
    Ok(0)
}

#[derive(Serialize)]
struct RegimeOutput {
    regime: Regime,
    phi1_re: f64,
    phi1_im: f64,
    sigma_squared: Option<f64>,
}

fn regime(config: &Config, meta: &Metadata) -> Result<u8> {
    let class = config.classification()?;
    let value = RegimeOutput {
        regime: class.regime,
        phi1_re: class.phi1.re,
        phi1_im: class.phi1.im,
        sigma_squared: class.sigma_squared,
    };
    println!("{}", output::to_json_line(meta, &value)?);
    Ok(0)
}

fn run_verify(config: &Config, meta: &Metadata, out: &Path, check: Check) -> Result<u8> {
    // Rejects degenerate laws before any simulation.
    let class = config.classification()?;
    let campaign = config.campaign()?;
    let started = Instant::now();
    let report = match check {
        Check::Regime => verify(&campaign, &Rayon)?,
        Check::Embedding => verify_embedding(&campaign.law, config.n, config.paths, config.seed, 4.0, &Rayon)?,
        Check::BranchingMoments => verify_branching_moments(
            std::slice::from_ref(&campaign.law),
            config.time,
            config.paths,
            config.seed,
            config.alpha,
            config.tolerances.mean_stderrs,
            &Rayon,
        )?,
        Check::MixedClt => {
            if class.regime != Regime::Superdiffusive {
                bail!("the mixed CLT needs a superdiffusive law, this one is {}", class.regime);
            }
            verify_mixed_clt(
                &campaign.law,
                config.time,
                config.horizon_ratio,
                config.paths,
                config.seed,
                config.alpha,
                config.tolerances.mixed_variance,
                &Rayon,
            )?
        }
        Check::QuadraticVariation => verify_quadratic_variation(&campaign, &Rayon)?,
        Check::Coupling => {
            let params = config.lattice.context("the coupling check needs a [lattice] table")?;
            verify_coupling(params, config.n, config.paths, config.seed)?
        }
    };
    eprintln!("{}: {:.1} s", report.title, started.elapsed().as_secs_f64());
    print_report(&report);
    output::write_json(&out.join("report.json"), meta, &report)?;
    output::write_summary_csv(&out.join("summary.csv"), meta, &report)?;
    Ok(if report.passed { 0 } else { EXIT_FAILED })
}

fn print_report(report: &VerificationReport) {
    println!("{}", report.title);
    for c in &report.criteria {
        println!("  [{}] {}: estimate {:.6} target {:.6}", if c.passed { "ok" } else { "FAIL" }, c.criterion, c.estimate, c.target);
    }
    println!("{}", if report.passed { "PASS" } else { "FAIL" });
}

/// File stems and rotation angles written by `figure`.
pub fn figure_laws() -> [(&'static str, f64); 3] {
    let third = std::f64::consts::FRAC_PI_3;
    [("figure_below", third - 0.1), ("figure_critical", third), ("figure_above", third + 0.1)]
}

fn figure(config: &Config, meta: &Metadata, out: &Path) -> Result<u8> {
    for (stem, theta) in figure_laws() {
        let law = AngleLaw::constant(theta)?;
        let path = simulate_path(&law, FIGURE_STEPS, config.seed, 0)?;
        output::write_path_csv(&out.join(format!("{stem}.csv")), meta, &path)?;
    }
    Ok(0)
}
