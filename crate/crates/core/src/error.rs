use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid angle law: {0}")]
    InvalidLaw(String),
    #[error("Fourier index must be at least 1")]
    ZeroFourierIndex,
    #[error("law violates the nondegeneracy assumption P(θ ∈ {{0, π}}) < 1 (Re Φ_2 = {re_phi2})")]
    Degenerate { re_phi2: f64 },
    #[error("horizon must be at least {min}, got {got}")]
    HorizonTooShort { min: u64, got: u64 },
    #[error("normalizer undefined for Φ = -1")]
    NormalizerPole,
    #[error("running product and Gamma ratio disagree: relative error {0:e}")]
    GammaMismatch(f64),
    #[error("exact enumeration supports n ≤ 8, got {0}")]
    EnumerationTooLarge(u64),
    #[error("exact enumeration needs finitely many atoms with rational probabilities: {0}")]
    NotEnumerable(String),
    #[error("regime mismatch: expected {expected}, law is {actual}")]
    RegimeMismatch { expected: &'static str, actual: &'static str },
    #[error("2Φ_1 = Φ_2: moments of W are not defined by the closed form")]
    DegenerateWMoments,
    #[error("time {t} is outside the simulated horizon [0, {horizon})")]
    BeyondHorizon { t: f64, horizon: f64 },
    #[error("index {n} exceeds run size {size}")]
    BeyondRunSize { n: u64, size: u64 },
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("too few samples: need at least {min}, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("path passes within 1e-9 of the origin at m = {0}, log-spiral fit undefined")]
    NearOrigin(u64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
