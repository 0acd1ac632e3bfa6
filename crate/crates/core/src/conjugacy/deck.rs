//! The fiber action of Z[1/d]/Z by deck transformations.
//!
//! Two covering-space points over the same orbit differ by v' = v e^(2 pi i
//! theta) with theta = p/d^n, together with the fiber correction
//!
//! ```text
//! Delta_i(v, v') = sum_{m=0}^{n-1} (Lambda_i^(-m) / (k-1))
//!                    * [ T(v^(d^m)) - T(v'^(d^m)) ],
//! ```
//!
//! where T is the numerator of the model map's shared shift (so sigma =
//! T/(k-1)). Terms with m >= n vanish because (v'/v)^(d^m) = 1 there, which
//! is why the sum is finite exactly when theta is d-adically rational. The
//! action
//!
//! ```text
//! F(theta)(v, s_i) = (v e^(2 pi i theta), s_i + Delta_i(v, v e^(2 pi i theta)))
//! ```
//!
//! is a group action: Delta telescopes over concatenation of angles, and
//! conjugating by the model map sends F(theta) to F(d theta mod 1).

use crate::conjugacy::omega::OmegaModel;
use crate::conjugacy::ConjugacyError;
use crate::dyadic::DyadicLike;
use num_complex::Complex64;

/// Largest root-of-unity depth probed when inferring n from v'/v.
pub const MAX_DECK_DEPTH: u32 = 40;

/// Finds the least n <= MAX_DECK_DEPTH with (v'/v)^(d^n) = 1 to within
/// 1e-9, i.e. the depth of the deck element relating the two base points.
pub fn detect_deck_depth(d: u32, v: Complex64, v_prime: Complex64) -> Option<u32> {
    let mut ratio = v_prime / v;
    for n in 0..=MAX_DECK_DEPTH {
        if (ratio - 1.0).norm() <= 1e-9 {
            return Some(n);
        }
        ratio = ratio.powi(d as i32);
    }
    None
}

/// The fiber corrections Delta_i(v, v') for all i = 1..k-1.
///
/// The depth n is inferred from v'/v; an n larger than minimal would only
/// append vanishing terms, so the minimal one is used.
pub fn deck_delta(
    model: &OmegaModel,
    v: Complex64,
    v_prime: Complex64,
) -> Result<Vec<Complex64>, ConjugacyError> {
    let d = model.spec().d();
    let n = detect_deck_depth(d, v, v_prime)
        .ok_or(ConjugacyError::NotDeckRelated { max_depth: MAX_DECK_DEPTH })?;
    let k = model.spec().k();
    let km1 = (k - 1) as f64;
    let lambdas = model.lambdas();

    let mut deltas = vec![Complex64::new(0.0, 0.0); k - 1];
    let mut x = v;
    let mut x_prime = v_prime;
    // lambda_inv_pows[i] tracks Lambda_i^(-m) across the m-loop.
    let mut lambda_inv_pows = vec![Complex64::new(1.0, 0.0); k - 1];
    for _m in 0..n {
        let t_diff = model.t_numeric(x) - model.t_numeric(x_prime);
        for i in 0..k - 1 {
            deltas[i] += lambda_inv_pows[i] / km1 * t_diff;
            lambda_inv_pows[i] /= lambdas[i];
        }
        x = x.powi(d as i32);
        x_prime = x_prime.powi(d as i32);
    }
    Ok(deltas)
}

/// Applies the deck transformation F(theta) to a covering-space point.
///
/// `theta` must be carried in base d (the map degree); its exact depth fixes
/// the number of terms in Delta.
pub fn deck_action(
    model: &OmegaModel,
    theta: &DyadicLike,
    v: Complex64,
    s: &[Complex64],
) -> Result<(Complex64, Vec<Complex64>), ConjugacyError> {
    let d = model.spec().d();
    if theta.base() != d {
        return Err(ConjugacyError::DeckBaseMismatch { theta_base: theta.base(), d });
    }
    assert_eq!(s.len(), model.spec().k() - 1, "fiber point length must be k-1");
    let angle = 2.0 * std::f64::consts::PI * theta.mod_one().to_f64();
    let v_prime = v * Complex64::from_polar(1.0, angle);
    let deltas = deck_delta(model, v, v_prime)?;
    let s_prime = s.iter().zip(&deltas).map(|(si, di)| si + di).collect();
    Ok((v_prime, s_prime))
}
