//! Planar elephant random walk with random rotations.
//!
//! The walk starts at `S_1 = 1` and at every later time `m` repeats a
//! uniformly chosen earlier step, rotated by an independent angle drawn from
//! an [`AngleLaw`](angle::AngleLaw). Everything the asymptotic theory of this
//! process depends on is reachable from here:
//!
//! * [`angle`]: rotation laws, their Fourier coefficients `Φ_k` and the
//!   diffusive / critical / superdiffusive classification,
//! * [`walk`]: seeded path simulation (complex and `Z²` lattice forms),
//!   step-power sums and predictable quadratic variations,
//! * [`oracle`]: exact, simulation-free moment sequences and brute-force
//!   enumeration for short horizons,
//! * [`branching`]: the Yule-embedded branching process and its additive
//!   martingales,
//! * [`stats`]: Monte Carlo campaigns and the statistical verification of
//!   the three limit regimes.
//!
//! The crate is `no_std` and only needs `alloc`; IO, configuration and the
//! command-line driver live in the `spiral-erw` companion crate.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod angle;
pub mod branching;
mod error;
pub mod oracle;
pub mod rng;
pub mod special;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Tolerance used for every "is this exactly 1/2 / exactly equal" decision.
pub const TIE_TOLERANCE: f64 = 1e-12;
