//! Exact tools for toric multiplier-ideal singularities.
//!
//! The centerpiece decides whether a toric weight `log max |z_i|^{a_i}`,
//! with exponents `a_i` in a multiquadratic number field, admits decreasing
//! equisingular approximations with analytic singularities, and emits a
//! machine-checkable certificate either way. Supporting modules compute the
//! monomial staircase of `I(t*phi)`, the scaling margin `epsilon_0`, rational
//! approximation sequences with per-term staircase certificates, and
//! closed-form / Monte-Carlo integral cross-checks on the polydisc.
//!
//! Module map:
//! - [`numbers`]: exact arithmetic in `Q(sqrt(d_1),...,sqrt(d_k))`
//! - [`staircase`]: lattice-point computations for the monomial ideal
//! - [`decision`]: the approximability trichotomy and its certificates
//! - [`approximation`]: construction and verification of the sequence
//! - [`oracle`]: integral identities, shell probes, concavity checks
//! - [`cli`]: command-line front end
//!
//! ```
//! use equising::{decide, Caps, SurdNumber, WeightSpec};
//!
//! let a: SurdNumber = "1+sqrt(2)".parse()?;
//! let b: SurdNumber = "1+1/2*sqrt(2)".parse()?;
//! let weight = WeightSpec::diagonal(vec![a, b])?;
//! let verdict = decide(&weight, &Caps::default())?;
//! assert!(verdict.maximal);
//! assert!(verdict.reverify(&weight, &Caps::default())?);
//! # Ok::<(), equising::Error>(())
//! ```

pub mod approximation;
pub mod cli;
pub mod decision;
pub mod numbers;
pub mod oracle;
pub(crate) mod serde_util;
pub mod staircase;

pub use crate::decision::{decide, Verdict};
pub use crate::numbers::{NumberError, RationalInterval, SurdNumber};
pub use crate::staircase::{Exponent, Staircase, WeightSpec};

/// Resource caps shared by the engines. Every cap is a guard against
/// runaway cost, not a correctness bound; defaults cover desk-scale inputs.
#[derive(Clone, Debug)]
pub struct Caps {
    /// Largest admitted enumeration box (product of per-axis ranges).
    pub max_box: u64,
    /// Hard precision ceiling for interval sign refinement, in bits.
    pub max_bits: u32,
    /// Largest prime support admitted by field inversion.
    pub max_primes: usize,
    /// Largest denominator admitted for rational approximants.
    pub max_denominator: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_box: 100_000_000,
            max_bits: numbers::DEFAULT_MAX_BITS,
            max_primes: numbers::DEFAULT_MAX_PRIMES,
            max_denominator: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Number(#[from] NumberError),
    #[error("weight {index} is not positive")]
    NonPositiveWeight { index: usize },
    #[error("invalid weight specification: {0}")]
    InvalidWeight(String),
    #[error("scale factor must be positive")]
    NonPositiveScale,
    #[error("exponent has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("enumeration box of size {size} exceeds cap {cap}")]
    BoxTooLarge { size: u128, cap: u64 },
    #[error("approximation sequences require an approximable weight")]
    NotApproximableInput,
    #[error("epsilon {epsilon} exceeds the margin epsilon0 = {epsilon0}")]
    EpsilonTooLarge { epsilon: String, epsilon0: String },
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("approximant denominator exceeded cap {cap}")]
    DenominatorCap { cap: u64 },
    #[error("certificate mismatch at term {term}: {detail}")]
    CertificateMismatch { term: usize, detail: String },
    #[error("monotonicity violation at term {term}, sample point {point:?}")]
    MonotonicityViolation { term: usize, point: Vec<f64> },
    #[error("exponent is a member: sum of (alpha_i+1)/a_i exceeds the scale")]
    PreconditionMemberExponent,
    #[error("non-integrable term with exponent {alpha:?}")]
    NonIntegrableTerm { alpha: Vec<u64> },
    #[error("degenerate region: {accepted} of {samples} samples accepted")]
    DegenerateRegion { accepted: u64, samples: u64 },
    #[error("at least {min} Monte Carlo samples required, got {got}")]
    TooFewSamples { min: u64, got: u64 },
    #[error("grid must be a nonempty list of rationals in (0, 1]")]
    InvalidGrid,
    #[error("{0}")]
    InvalidInput(String),
}
