//! Conjugating the escape dynamics to a model skew product.
//!
//! The escape region of H carries covering-space coordinates (v, s_1, ...,
//! s_{k-1}) in which the dynamics becomes the rigid model map
//! omega(v, s) = (v^d, Lambda_i (s_i + sigma(v))). This module builds that
//! model ([`omega`]), solves the functional equation G o omega = H o G by a
//! contracting fixed-point iteration on generalized power series ([`solve`]),
//! realizes the fiber action of Z[1/d]/Z by explicit deck transformations
//! ([`deck`]), and provides the first-coordinate sequence machinery --
//! refinement toward true orbits, the twin diagnostic distance, and the
//! asymptotic evaluator for z_{1,n} ([`seq`]).

pub mod deck;
pub mod omega;
pub mod seq;
pub mod solve;

pub use deck::{deck_action, deck_delta, detect_deck_depth};
pub use omega::{lambda_roots, OmegaModel};
pub use seq::{asymptotic_z1n, fit_twin_parameters, j_distance, SeqWindow};
pub use solve::{
    assemble_big_g, check_conjugacy_numeric, check_conjugacy_series, contraction_report,
    iterate_g, run_conjugacy_analysis, ConjugacyRun, ConjugacySeriesCheck, ContractionReport,
    ContractionRow, NumericConjugacyCheck,
};

use crate::genseries::GenSeriesError;
use num_complex::Complex64;
use thiserror::Error;

/// Failure modes of the conjugacy layer.
#[derive(Debug, Error)]
pub enum ConjugacyError {
    /// A series operation lost every term to truncation or hit an
    /// inconsistent ramification index.
    #[error("series arithmetic failed: {0}")]
    Series(#[from] GenSeriesError),
    /// A sequence window is too short for the requested operation.
    #[error("sequence window needs at least {needed} entries, got {got}")]
    WindowTooShort { needed: usize, got: usize },
    /// A deck angle was given in a base different from the map degree.
    #[error("deck angle has base {theta_base} but the map has degree {d}")]
    DeckBaseMismatch { theta_base: u32, d: u32 },
    /// v'/v is not a d^n-th root of unity within tolerance.
    #[error("v'/v is not a d^n-th root of unity within tolerance (checked n <= {max_depth})")]
    NotDeckRelated { max_depth: u32 },
    /// The asymptotic development needs an expanding base point.
    #[error("asymptotic base point must satisfy |U| > 1, got |U| = {norm}")]
    UNotExpanding { norm: f64 },
    /// A covering-space point must have |v| > 1.
    #[error("model point must satisfy |v| > 1, got |v| = {norm}")]
    VNotExpanding { norm: f64 },
}

/// A point of the covering space (C \ closed unit disc) x C^(k-1).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPoint {
    v: Complex64,
    s: Vec<Complex64>,
}

impl ModelPoint {
    /// Validates |v| > 1 and the fiber dimension k-1.
    pub fn new(v: Complex64, s: Vec<Complex64>) -> Result<Self, ConjugacyError> {
        if !(v.norm() > 1.0) {
            return Err(ConjugacyError::VNotExpanding { norm: v.norm() });
        }
        Ok(Self { v, s })
    }

    /// The base coordinate.
    pub fn v(&self) -> Complex64 {
        self.v
    }

    /// The fiber coordinates s_1..s_{k-1}.
    pub fn s(&self) -> &[Complex64] {
        &self.s
    }
}
