//! Dynamics of shift-like polynomial automorphisms of C^k.
//!
//! The library centers on the family
//!
//! ```text
//! H(z1, ..., zk) = (z1^d + a2 z2 + ... + ak zk, z3, ..., zk, z1)
//! ```
//!
//! acting on C^k with k >= 2, degree d >= 2, and weights a2 != 0, |a2| < d.
//! Around that family it provides:
//!
//! - escape-region membership, orbits, and the closed-form inverse
//!   ([`automorphism`]);
//! - the Böttcher coordinate on the escape region and its functional
//!   equation ([`boettcher`]);
//! - an integer-valued winding invariant of closed curves in the escaping
//!   set, valued in denominator-d^n rationals ([`winding`], [`dyadic`]);
//! - generalized power series in a variable u^(-1) with rational exponents
//!   and polynomial coefficients, with ultrametric valuation ([`genseries`]);
//! - the series change of variable that conjugates H near infinity to a
//!   model skew product, the fixed-point iteration that produces it, deck
//!   transformations of the induced covering, orbit-window refinement, and
//!   asymptotic expansions of escaping first coordinates ([`conjugacy`]);
//! - eligibility classification for the five quadratic normal-form families
//!   in C^3 whose escape dynamics reduce to second- or third-order scalar
//!   recurrences ([`fw3`]);
//! - chart bookkeeping for the blow-up factorization of the induced map at
//!   infinity ([`blowup`]).

pub mod automorphism;
pub mod blowup;
pub mod boettcher;
pub mod conjugacy;
pub mod dyadic;
pub mod fw3;
pub mod genseries;
pub mod winding;

pub use automorphism::{AutomorphismSpec, Orbit, PointClass, SpecError};
