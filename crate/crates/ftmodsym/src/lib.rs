//! Exact modular symbols for Gamma_0(n) over A = Fq[T].
//!
//! The crate computes, with exact integer and rational arithmetic:
//!
//! * the Manin–Teitelbaum presentation of the modular symbol group on
//!   generators indexed by the projective line P^1(A/n), solved by integer
//!   Smith normal form (the brute-force oracle, any level);
//! * the explicit basis of Manin–Teitelbaum symbols for prime levels of odd
//!   degree, together with the constant-depth rewrite of any generator into
//!   that basis and the direct-sum decomposition by degree blocks;
//! * Hecke operators through explicit matrix sets (Heilbronn-style), the
//!   triangular coset definition on cusp paths, the Atkin–Lehner involution,
//!   and the Eisenstein twists eta_m = T_m - (q^deg m + 1);
//! * the winding element, its denominator, Hecke-independence ranks over Q
//!   and F_p, the Eisenstein-ideal index, and the nonvanishing count for
//!   L-values of primitive automorphic cusp forms.
//!
//! Everything is deterministic; all basis-dependent artifacts carry their
//! ordering conventions. There is no floating point anywhere.

pub mod error;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod projective;

pub mod presentation;
pub mod symbols;

pub mod explicit_basis;
pub mod hecke;
pub mod winding;

pub mod json;
pub mod verify;

pub use error::{Error, Result};
pub use field::FqField;
pub use poly::{Degree, Poly};
pub use projective::LevelContext;
