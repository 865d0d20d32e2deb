//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`enum@Error`]; the CLI maps
//! the variants onto its exit-code contract (invalid input, unresolved
//! computation, missing external data).

use num_bigint::BigInt;
use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A cofactor resisted the configured factoring effort. Carries the
    /// partial factorization so callers can still report "unresolved
    /// survivors" instead of silently dropping primes.
    #[error("factorization incomplete: cofactor {residual} unfactored after effort {effort}")]
    FactorizationIncomplete {
        residual: BigInt,
        partial: Vec<(BigInt, u32)>,
        effort: u64,
    },

    /// Reduction mod ℓ hit a denominator divisible by ℓ.
    #[error("non-integral reduction: denominator not invertible modulo {ell}")]
    NonIntegralReduction { ell: u64 },

    /// The claimed identity A² + d·B⁶ = Cⁿ fails.
    #[error("not a solution: {a}^2 + {d}*{b}^6 != {c}^{n}")]
    NotASolution { a: BigInt, b: BigInt, c: BigInt, d: u64, n: u32 },

    /// The Granville radical r = u² + d·v⁶ lies in {−1, 0, 1}, where the
    /// family degenerates.
    #[error("degenerate radical r = {r}; the family needs |r| >= 2")]
    DegenerateRadical { r: BigInt },

    /// Inputs fall outside the conductor classification's case list.
    #[error("no conductor case covers d = {d} with v2(d) = {v2}, v3(d) = {v3}")]
    UnhandledCase { d: u64, v2: u32, v3: u32 },

    /// The supplied curve table does not cover a required conductor.
    #[error("curve table does not cover conductor {missing}")]
    IncompleteTable { missing: u64 },

    /// An operation that needs Δ ≠ 0 received a singular model.
    #[error("singular model: discriminant vanishes")]
    SingularModel,

    /// Point counting refused a field larger than the configured cap.
    #[error("field of size {q} exceeds the point-counting cap {cap}")]
    FieldTooLarge { q: u64, cap: u64 },

    /// Newform data lacks an eigenvalue or character value at ℓ.
    #[error("form {label}: no eigenvalue data at ell = {ell}")]
    MissingEigenvalue { label: String, ell: u64 },

    /// Structured data failed a cross-check (e.g. stored c-invariants
    /// disagree with the a-invariants).
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    /// A theorem's hypothesis is violated by the inputs.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// A bounded scan ended without a witness.
    #[error("scan exhausted at limit {limit} without a witness")]
    ScanExhausted { limit: u64 },

    /// Network access failed or was disabled while no cached data exists.
    #[error("network unavailable: {0}")]
    NetworkUnavailable(String),

    /// A data file failed to parse; reports position and field.
    #[error("parse error at {path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    /// Loaded data violates a documented invariant.
    #[error("invariant violation in {context}: {msg}")]
    InvariantViolation { context: String, msg: String },

    /// A named bound term has no registered implementation.
    #[error("missing term implementation: {0}")]
    MissingTermImplementation(&'static str),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
