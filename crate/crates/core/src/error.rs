//! Error types shared across the crate.
//!
//! Every variant renders as a single `Kind: detail` line so front ends can
//! surface it verbatim as a machine-parsable failure reason.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A supposedly coprime sequence contains a pair with a common factor.
    #[error("CoprimalityViolation: ({0},{1}) share gcd {2}")]
    CoprimalityViolation(u64, u64, u64),

    /// An interior-collision identity failed for a pair of step sizes.
    #[error("CollisionFound: {0}")]
    CollisionFound(String),

    /// A binomial moment identity disagreed with direct summation.
    #[error("IdentityViolation: moment_sum(n={n}, r={r}) direct {direct} != closed form {closed}")]
    IdentityViolation { n: u64, r: u32, direct: String, closed: String },

    /// Two code parameters share a factor.
    #[error("NotCoprime: ({0},{1})")]
    NotCoprime(u64, u64),

    /// A parameter is below its minimum.
    #[error("TooSmall: {0}")]
    TooSmall(String),

    /// The length exponent is below 3.
    #[error("BadExponent: q={0} < 3")]
    BadExponent(u32),

    /// The parameter list is not sorted non-decreasing.
    #[error("NotSorted: {0:?}")]
    NotSorted(Vec<u64>),

    /// The code length N must be even unless explicitly overridden.
    #[error("OddProduct: N={0} is odd (pass the odd-N override to accept)")]
    OddProduct(u64),

    /// A supported weight exceeds the number of qubits.
    #[error("WeightOverflow: weight {weight} > m = {m}")]
    WeightOverflow { weight: u64, m: String },

    /// Integer arithmetic left the supported 64-bit range.
    #[error("Overflow: {0}")]
    Overflow(String),

    /// Dense simulation requested above the hard qubit cap.
    #[error("TooLarge: m={0} exceeds the dense-oracle cap of 14 qubits")]
    TooLarge(usize),

    /// Two dense objects have incompatible dimensions.
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),

    /// Corrupted codespaces overlap, so no truncated recovery exists.
    #[error("NotCorrectable: {0}")]
    NotCorrectable(String),

    /// An operator annihilates the entire codespace.
    #[error("RankDeficient: {0}")]
    RankDeficient(String),

    /// A density operator fails its trace or positivity checks.
    #[error("BadDensity: {0}")]
    BadDensity(String),

    /// A γ evaluation grid leaves the open interval (0, 1).
    #[error("GridOutOfRange: {0}")]
    GridOutOfRange(String),

    /// A descriptor document could not be parsed.
    #[error("BadDescriptor: {0}")]
    BadDescriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
