//! Sieve machinery for the Diophantine equation x² + d·y⁶ = zᵖ over square-free d ≥ 1.
//!
//! The workflow this crate mechanizes: attach to a putative primitive solution
//! (A, B, C) a Frey curve over K = ℚ(√−d) and a second, rational Frey curve;
//! compare their traces of Frobenius against newform eigenvalue data through
//! the base-change rule (Mazur's trick); then remove the survivors with the
//! symplectic argument, the 3-torsion congruence test and explicit
//! irreducibility bounds.
//!
//! Module map:
//! - [`arith`]: exact integers/rationals, the quadratic field K, prime
//!   splitting, finite fields 𝔽_ℓ and 𝔽_{ℓ²}, number-field norms, factoring.
//! - [`ecurve`]: Weierstrass models over a pluggable coefficient domain,
//!   invariants, point counting, 3-torsion search, twists.
//! - [`frey`]: both Frey curves, solution verification, the CM classifier,
//!   the Granville family, conductor profiles and the curve-table search.
//! - [`sieve`]: the Mazur's-trick elimination engine.
//! - [`discard`]: symplectic and 3-torsion post-sieve filters and their
//!   combination into excluded congruence classes of the exponent p.
//! - [`ellenberg`]: high-precision evaluation of the explicit irreducibility
//!   bound and the first-positive-prime search.
//! - [`io`]: file formats, per-case configuration, curve-table ingestion
//!   (with an optional HTTP fetcher) and reproducible reports.

pub mod arith;
pub mod discard;
pub mod ecurve;
pub mod ellenberg;
pub mod error;
pub mod frey;
pub mod io;
pub mod sieve;

pub use error::{Error, Result};
