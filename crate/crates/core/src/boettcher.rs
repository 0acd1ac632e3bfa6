//! The Böttcher coordinate on the escape region.
//!
//! On V+ the first component of H is a dominated perturbation of z1^d:
//!
//! ```text
//! H1(z) = z1^d (1 + w(z)),    w(z) = (a2 z2 + ... + ak zk) / z1^d,
//! ```
//!
//! and the escape radius guarantees |w| <= (|a2|+...+|ak|)/R^(d-1) <= 1/2
//! there. Writing beta = Log(1 + w) (principal branch, |beta| <= log 2),
//! the normalized coordinate
//!
//! ```text
//! phi(z) = z1 * exp( sum_{j>=1} beta(H^(j-1)(z)) / d^j )
//! ```
//!
//! converges geometrically (the j-th increment is at most (log 2)/d^j) and
//! satisfies the functional equation phi(H(z)) = phi(z)^d together with
//! phi(z) ~ z1 deep in the region. Orbits through V+ square up doubly
//! exponentially, so in practice only a handful of increments are ever
//! needed; once |z1| exceeds the overflow guard the remaining tail is far
//! below any representable tolerance and iteration stops.
//!
//! [`first_estimation_table`] compares z_{1,n} against U^(d^n) with
//! U = phi(seed): the difference is of order U_n^e with
//! e = d^(j-k-1) + 1 - d < 0, where j marks the last nonvanishing weight.
//! The table reports the normalized ratios; callers should trust them only
//! while |U_n|^(1-e) * eps_machine stays below the expected constant,
//! because past that point the subtraction z_{1,n} - U_n is pure f64
//! cancellation noise. That cutoff, not overflow, is usually the binding
//! limit at double precision.

use crate::automorphism::AutomorphismSpec;
use num_complex::Complex64;
use thiserror::Error;

/// Iteration cap for the increment sum; (log 2)/d^64 is ~3e-20 even at d=2.
const MAX_INCREMENTS: usize = 64;

/// Beyond this first-coordinate magnitude the correction term underflows
/// any meaningful tolerance and the increment sum is complete.
const OVERFLOW_GUARD: f64 = 1e150;

/// Failure modes of Böttcher-coordinate evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoettcherError {
    /// The coordinate is only defined on the escape region V+.
    #[error("point is not in the escape region V+")]
    NotInEscapeRegion,
    /// The increment sum failed to reach the requested tolerance.
    #[error("no convergence after {iterations} increments (last bound {last_increment:e})")]
    NoConvergence { iterations: usize, last_increment: f64 },
}

/// A converged coordinate value with its convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiResult {
    /// The coordinate phi(z).
    pub value: Complex64,
    /// Number of increments summed.
    pub iterations: usize,
    /// Upper bound on the truncated tail of the increment sum.
    pub tail_bound: f64,
}

/// The relative correction w(z) = (a2 z2 + ... + ak zk)/z1^d.
pub fn correction_term(spec: &AutomorphismSpec, z: &[Complex64]) -> Complex64 {
    assert_eq!(z.len(), spec.k(), "point dimension must match k");
    assert!(z[0].norm() > 0.0, "correction term needs z1 != 0");
    let mut w = Complex64::new(0.0, 0.0);
    for (a, zj) in spec.alpha().iter().zip(&z[1..]) {
        w += a * zj;
    }
    // Divide by z1 one factor at a time: forming z1^d first would overflow
    // the |denominator|^2 inside complex division once |z1| passes ~1e77,
    // even though the quotient itself is perfectly representable.
    for _ in 0..spec.d() {
        w /= z[0];
    }
    w
}

/// beta(z) = Log(1 + w(z)), principal branch. Only defined on V+, where
/// |w| <= 1/2 keeps the argument well inside the cut plane.
pub fn beta(spec: &AutomorphismSpec, z: &[Complex64]) -> Result<Complex64, BoettcherError> {
    if !spec.in_v_plus(z) {
        return Err(BoettcherError::NotInEscapeRegion);
    }
    Ok(beta_unchecked(spec, z))
}

fn beta_unchecked(spec: &AutomorphismSpec, z: &[Complex64]) -> Complex64 {
    (Complex64::new(1.0, 0.0) + correction_term(spec, z)).ln()
}

/// Evaluates phi(z) for z in V+ by summing increments until the guaranteed
/// tail bound (log 2)/((d-1) d^j) drops below `tol`.
pub fn phi(
    spec: &AutomorphismSpec,
    z: &[Complex64],
    tol: f64,
) -> Result<PhiResult, BoettcherError> {
    if !spec.in_v_plus(z) {
        return Err(BoettcherError::NotInEscapeRegion);
    }
    let d = f64::from(spec.d());
    let mut point = z.to_vec();
    let mut exponent_sum = Complex64::new(0.0, 0.0);
    let mut weight = 1.0; // 1/d^j, starting at j = 1
    for j in 1..=MAX_INCREMENTS {
        weight /= d;
        exponent_sum += beta_unchecked(spec, &point) * weight;
        // Tail after j terms: |beta| <= log 2 on all of V+, summed geometrically.
        let tail = std::f64::consts::LN_2 * weight / (d - 1.0);
        if tail <= tol {
            return Ok(PhiResult { value: z[0] * exponent_sum.exp(), iterations: j, tail_bound: tail });
        }
        point = spec.forward(&point);
        if point[0].norm() > OVERFLOW_GUARD {
            // From here every correction term is below ~1e-148; the sum is done.
            return Ok(PhiResult {
                value: z[0] * exponent_sum.exp(),
                iterations: j,
                tail_bound: tail.min(1e-140),
            });
        }
    }
    Err(BoettcherError::NoConvergence {
        iterations: MAX_INCREMENTS,
        last_increment: std::f64::consts::LN_2 / ((d - 1.0) * d.powi(MAX_INCREMENTS as i32)),
    })
}

/// Relative residual of the functional equation phi(H(z)) = phi(z)^d at z.
pub fn functional_equation_residual(
    spec: &AutomorphismSpec,
    z: &[Complex64],
    tol: f64,
) -> Result<f64, BoettcherError> {
    let lhs = phi(spec, &spec.forward(z), tol)?.value;
    let rhs = phi(spec, z, tol)?.value.powi(spec.d() as i32);
    Ok((lhs - rhs).norm() / rhs.norm())
}

/// One row of the first-coordinate estimation table.
#[derive(Debug, Clone, Copy)]
pub struct EstimationRow {
    /// Step index n.
    pub n: usize,
    /// The orbit's first coordinate z_{1,n}.
    pub z1n: Complex64,
    /// The prediction U^(d^n), U = phi(seed).
    pub u_n: Complex64,
    /// |z_{1,n} - U_n|.
    pub abs_err: f64,
    /// |z_{1,n} - U_n| / |U_n|^e — bounded where f64 can resolve it.
    pub normalized: f64,
    /// The f64 cancellation floor |U_n|^(1-e) * eps at this row.
    pub noise_floor: f64,
}

/// Compares orbit first coordinates against powers of U = phi(seed).
///
/// The normalization exponent is e = d^(j-k-1) + 1 - d with j the index of
/// the last nonvanishing weight (j = 2 when only a2 is nonzero). Rows stop
/// at f64 overflow.
pub fn first_estimation_table(
    spec: &AutomorphismSpec,
    seed: &[Complex64],
    steps: usize,
    tol: f64,
) -> Result<Vec<EstimationRow>, BoettcherError> {
    let u = phi(spec, seed, tol)?.value;
    let e = estimation_exponent(spec);
    let orbit = spec.orbit_forward(seed, steps);
    let mut rows = Vec::new();
    let mut u_n = u;
    for (n, p) in orbit.points.iter().enumerate() {
        if !u_n.norm().is_finite() {
            break;
        }
        let abs_err = (p[0] - u_n).norm();
        let scale = u_n.norm().powf(e);
        rows.push(EstimationRow {
            n,
            z1n: p[0],
            u_n,
            abs_err,
            normalized: abs_err / scale,
            noise_floor: u_n.norm().powf(1.0 - e) * f64::EPSILON,
        });
        u_n = u_n.powi(spec.d() as i32);
    }
    Ok(rows)
}

/// The normalization exponent e = d^(j-k-1) + 1 - d for the last
/// nonvanishing weight a_j.
pub fn estimation_exponent(spec: &AutomorphismSpec) -> f64 {
    let last_nonzero = spec
        .alpha()
        .iter()
        .rposition(|a| a.norm() > 0.0)
        .expect("a2 != 0 guarantees a nonzero weight");
    let j = last_nonzero + 2; // alpha[0] is a2
    let d = f64::from(spec.d());
    d.powi(j as i32 - spec.k() as i32 - 1) + 1.0 - d
}
