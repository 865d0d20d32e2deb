//! Exact arithmetic foundation.
//!
//! Everything downstream reduces to the primitives here: arbitrary-precision
//! integers and rationals, the imaginary quadratic field K = ℚ(√−d) and its
//! prime splitting, the residue fields 𝔽_ℓ and 𝔽_{ℓ²}, dense polynomials with
//! exact coefficients, number-field elements with resultant-based norms, and
//! integer factorization. All values are immutable and all operations pure.

mod fq;
mod int;
mod nf;
mod poly;
mod polyfactor;
mod quad;

pub use fq::{FqCtx, FqElem};
pub use int::{
    euler_phi, factor, factor_with, is_prime_u64, is_probable_prime, kronecker, kronecker_i64,
    next_prime, small_primes, sqrt_mod_p, FactorSettings,
};
pub use nf::{nf_norm, NumberFieldElem};
pub use poly::{QPoly, ZPoly};
pub use polyfactor::{monic_quadratic_factors, rational_roots};
pub use quad::{
    is_unramified, rational_sqrt, reduce_quad, split_valuations, splitting_type, PrimeSplitting,
    QuadElem, SplitKind,
};
