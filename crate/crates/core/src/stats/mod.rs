//! Monte Carlo campaigns and statistical verification of the limit theorems.
//!
//! Samples are produced path by path from independent seeded streams and
//! reduced with exact summation, so every reported number is a function of
//! the configuration alone, not of the order in which an [`Executor`]
//! finished the work.

mod campaign;
mod gaussian;
mod hypothesis;
mod spiral;
mod sum;
mod verify;

pub use campaign::{run_campaign, CampaignConfig, SampleMatrix, Tolerances};
pub use gaussian::{anderson_darling_normal, gaussian_fit, gaussian_fit_target, GaussianFitReport, GaussianTarget};
pub use hypothesis::{
    chi_square_gof, geometric_probabilities, ks_test, mean_and_stderr, two_sample_z, TestOutcome,
};
pub use spiral::{spiral_fit, SpiralFit};
pub use sum::{ComplexSampleStats, ExactSum};
pub use verify::{
    lindeberg_ratio, verify, verify_branching_moments, verify_coupling, verify_critical, verify_diffusive,
    verify_embedding, verify_exact_oracles, verify_gamma_identity, verify_mixed_clt, verify_quadratic_variation,
    verify_superdiffusive, Comparison, CriterionResult, VerificationReport,
};

use alloc::vec::Vec;
use core::ops::Range;

use crate::Result;

/// Runs independent per-index jobs and returns their results in index order.
pub trait Executor {
    fn map_indices<T, F>(&self, range: Range<u64>, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;

    /// [`Executor::map_indices`] for fallible jobs, failing on the first error
    /// in index order.
    fn try_map_indices<T, F>(&self, range: Range<u64>, job: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> Result<T> + Sync + Send,
    {
        self.map_indices(range, job).into_iter().collect()
    }
}

/// Runs every job on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_indices<T, F>(&self, range: Range<u64>, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        range.map(job).collect()
    }
}
