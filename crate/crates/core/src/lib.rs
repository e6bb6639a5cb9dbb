//! Deterministic primality testing built on explicit and implicit quadratic
//! non-residues.
//!
//! The crate is layered bottom-up:
//!
//! * [`ntcore`]: scalar number theory (Jacobi symbol, modular exponentiation,
//!   integer square roots, prime stepping).
//! * [`quadext`]: arithmetic in `Z_n[sqrt(q)]`.
//! * [`polyring`]: dense polynomials over `Z_n` and quotient rings
//!   `Z_n[x]/<D(x)>`.
//! * [`canonical`]: cyclotomic-derived divisor polynomials and the search for
//!   the canonical parameter `m`.
//! * [`checks`]: the Euler and binomial congruence predicates.
//! * [`algorithms`]: the complete primality tests and their verdicts.
//! * [`certificate`]: JSON rendering and independent re-verification of
//!   verdicts.
//! * [`harness`]: dataset ingestion, batch statistics and brute-force oracles.

pub mod algorithms;
pub mod canonical;
pub mod certificate;
pub mod checks;
pub mod expr;
pub mod harness;
pub mod ntcore;
pub mod polyring;
pub mod quadext;

mod error;

pub use error::{Error, Result};
pub use ntcore::Natural;
