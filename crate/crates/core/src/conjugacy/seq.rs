//! First-coordinate sequence machinery: refinement toward true orbits, the
//! twin diagnostic distance, and the asymptotic evaluator for z_{1,n}.
//!
//! The first coordinates a_n of an orbit satisfy
//!
//! ```text
//! a_{n+1} = a_n^d + a2 a_{n-k+1} + a3 a_{n-k+2} + ... + a_k a_{n-1},
//! ```
//!
//! so a_n can be recovered from the k entries above it:
//!
//! ```text
//! a_n = (1/a2) ( a_{n+k} - a_{n+k-1}^d - a3 a_{n+1} - ... - a_k a_{n+k-2} ).
//! ```
//!
//! Applying this to an arbitrary window defines the refinement operator F:
//! true-orbit windows are fixed points, and near-orbit windows move toward
//! the orbit in the weighted sup distance
//!
//! ```text
//! j(z, zeta) = sup_n |z_{1,n} - zeta_{1,n}| |z_{1,n}|^c,
//! c = (d-1) d^(k-1) / (d^(k-1) - 1)
//! ```
//!
//! (a diagnostic functional, not a metric -- the triangle inequality fails).
//!
//! The asymptotic evaluator expands z_{1,n} in terms of the escape datum
//! U_n = U^(d^n) and k-1 twin parameters q_j:
//!
//! ```text
//! z_{1,n} ~ U_n^A [ sum_j (-a2/d)^j U_n^(B r^j)
//!                   - sum_l (a_l/d) sum_j (-a2/d)^j U_n^(C_l r^j)
//!                   (+ d=2 extra)  ]  +  U_n^A sum_j Lambda_j^n q_j,
//! A = (d-1) d^(k-1) / (1 - d^(k-1)),   B = (1 - d^k) / (1 - d^(k-1)),
//! C_l = (d^(l-k-1) - d^(l-2) - (d-1)) / (1 - d^(k-1)),   r = d^(1-k).
//! ```
//!
//! All fractional powers are principal-branch; callers who need a branch-free
//! reading should keep U on the positive real axis (real seeds suffice).

use crate::automorphism::AutomorphismSpec;
use crate::conjugacy::omega::lambda_roots;
use crate::conjugacy::ConjugacyError;
use num_complex::Complex64;

/// A finite window of first coordinates z_{1,n} for n in [start, start+len).
#[derive(Debug, Clone, PartialEq)]
pub struct SeqWindow {
    start: i64,
    values: Vec<Complex64>,
}

impl SeqWindow {
    /// Wraps raw values; `start` is the index of `values[0]`.
    pub fn new(start: i64, values: Vec<Complex64>) -> Self {
        Self { start, values }
    }

    /// Samples first coordinates a_start..=a_end from the forward orbit of
    /// `seed` (index 0 = the seed itself). Requires 0 <= start <= end.
    pub fn sample_orbit(spec: &AutomorphismSpec, seed: &[Complex64], start: i64, end: i64) -> Self {
        assert!(0 <= start && start <= end, "need 0 <= start <= end");
        let orbit = spec.orbit_forward(seed, end as usize);
        assert!(
            !orbit.truncated,
            "orbit left f64 range before step {end}; sample a shorter window"
        );
        let values = orbit.points.iter().skip(start as usize).map(|p| p[0]).collect();
        Self { start, values }
    }

    /// Index of the first entry.
    pub fn start(&self) -> i64 {
        self.start
    }

    /// The stored values.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when the window holds no entries.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The entry at absolute index n, if inside the window.
    pub fn at(&self, n: i64) -> Option<Complex64> {
        let offset = n.checked_sub(self.start)?;
        usize::try_from(offset).ok().and_then(|o| self.values.get(o)).copied()
    }

    /// One application of the refinement operator: entry n of the output is
    /// rebuilt from entries n+1..=n+k of the input. The window keeps its
    /// start and loses its last k entries.
    ///
    /// Numerically the reconstruction subtracts a_{n+k-1}^d from a_{n+k},
    /// so its absolute error is about one ulp of that power: the operator
    /// resolves orbit-scale structure only while window entries stay well
    /// below 1/sqrt(machine epsilon) (~1e8 for f64, d = 2). On rapidly
    /// escaping windows the refined values are dominated by cancellation.
    pub fn refine(&self, spec: &AutomorphismSpec) -> Result<Self, ConjugacyError> {
        let k = spec.k();
        let d = spec.d() as i32;
        if self.values.len() < k + 1 {
            return Err(ConjugacyError::WindowTooShort { needed: k + 1, got: self.values.len() });
        }
        let alpha = spec.alpha();
        let values = (0..self.values.len() - k)
            .map(|n| {
                let mut acc = self.values[n + k] - self.values[n + k - 1].powi(d);
                for l in 3..=k {
                    acc -= alpha[l - 2] * self.values[n + l - 2];
                }
                acc / spec.alpha2()
            })
            .collect();
        Ok(Self { start: self.start, values })
    }

    /// `iterations`-fold refinement.
    pub fn refine_iterated(
        &self,
        spec: &AutomorphismSpec,
        iterations: usize,
    ) -> Result<Self, ConjugacyError> {
        let mut out = self.clone();
        for _ in 0..iterations {
            out = out.refine(spec)?;
        }
        Ok(out)
    }
}

/// The weighted sup distance j(z, zeta) over the index overlap of the two
/// windows. Weights come from the first argument: |z_n - zeta_n| |z_n|^c.
/// Returns 0.0 when the overlap is empty.
pub fn j_distance(spec: &AutomorphismSpec, z: &SeqWindow, zeta: &SeqWindow) -> f64 {
    let c = contraction_weight(spec);
    let lo = z.start.max(zeta.start);
    let hi = (z.start + z.len() as i64).min(zeta.start + zeta.len() as i64);
    let mut sup = 0.0f64;
    for n in lo..hi {
        let zn = z.at(n).expect("n inside z window");
        let zetan = zeta.at(n).expect("n inside zeta window");
        sup = sup.max((zn - zetan).norm() * zn.norm().powf(c));
    }
    sup
}

/// The weight exponent c = (d-1) d^(k-1) / (d^(k-1) - 1), as printed
/// (positive; the asymptotic prefactor uses its negative counterpart).
pub fn contraction_weight(spec: &AutomorphismSpec) -> f64 {
    let d = f64::from(spec.d());
    let dk1 = d.powi(spec.k() as i32 - 1);
    (d - 1.0) * dk1 / (dk1 - 1.0)
}

/// Evaluates the asymptotic development of z_{1,n} at stage n from the
/// escape datum U (stage 0) and the twin parameters q (length k-1), keeping
/// `j_terms` terms in each geometric sum.
pub fn asymptotic_z1n(
    spec: &AutomorphismSpec,
    u: Complex64,
    q: &[Complex64],
    j_terms: usize,
    n: u32,
) -> Result<Complex64, ConjugacyError> {
    if !(u.norm() > 1.0) {
        return Err(ConjugacyError::UNotExpanding { norm: u.norm() });
    }
    assert_eq!(q.len(), spec.k() - 1, "one twin parameter per fiber dimension");
    let mut u_n = u;
    for _ in 0..n {
        u_n = u_n.powi(spec.d() as i32);
    }
    let bracket = asymptotic_bracket(spec, u_n, j_terms);
    let a = -contraction_weight(spec); // (d-1) d^(k-1) / (1 - d^(k-1))
    let lambdas = lambda_roots(spec);
    let mut twin = Complex64::new(0.0, 0.0);
    for (lam, qj) in lambdas.iter().zip(q) {
        twin += lam.powu(n) * qj;
    }
    Ok(cpowf(u_n, a) * (bracket + twin))
}

/// The bracketed double sums of the development, evaluated at U_n.
fn asymptotic_bracket(spec: &AutomorphismSpec, u_n: Complex64, j_terms: usize) -> Complex64 {
    let k = spec.k();
    let d = f64::from(spec.d());
    let dk1 = d.powi(k as i32 - 1);
    let denom = 1.0 - dk1; // 1 - d^(k-1), negative
    let ratio_base = -spec.alpha2() / d;
    let r = d.powi(1 - (k as i32)); // d^(1-k)

    // sum_j (base)^j U_n^(expo r^j), truncated at j_terms.
    let geometric = |expo: f64| -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        let mut base_pow = Complex64::new(1.0, 0.0);
        let mut rj = 1.0f64;
        for _ in 0..j_terms {
            total += base_pow * cpowf(u_n, expo * rj);
            base_pow *= ratio_base;
            rj *= r;
        }
        total
    };

    let b = (1.0 - d.powi(k as i32)) / denom;
    let mut bracket = geometric(b);
    for l in 3..=k {
        let a_l = spec.alpha()[l - 2];
        let c_l = (d.powi(l as i32 - k as i32 - 1) - d.powi(l as i32 - 2) - (d - 1.0)) / denom;
        bracket -= a_l / d * geometric(c_l);
    }
    if spec.d() == 2 && k >= 3 {
        let extra_coeff = spec.alpha()[1] * spec.alpha()[k - 2] / 4.0;
        let e = -1.0 / (denom * dk1);
        bracket += extra_coeff * geometric(e);
    }
    bracket
}

/// Principal-branch complex power with a real exponent.
fn cpowf(z: Complex64, e: f64) -> Complex64 {
    (z.ln() * e).exp()
}

/// Fits the k-1 twin parameters q_j from window entries at the absolute
/// indices `fit_at` (length k-1, distinct): solves
/// sum_j Lambda_j^n q_j = z_{1,n} / U_n^A - bracket(U_n) for each n.
pub fn fit_twin_parameters(
    spec: &AutomorphismSpec,
    u: Complex64,
    window: &SeqWindow,
    fit_at: &[i64],
    j_terms: usize,
) -> Result<Vec<Complex64>, ConjugacyError> {
    if !(u.norm() > 1.0) {
        return Err(ConjugacyError::UNotExpanding { norm: u.norm() });
    }
    let k = spec.k();
    assert_eq!(fit_at.len(), k - 1, "need one fit index per twin parameter");
    let lambdas = lambda_roots(spec);
    let a = -contraction_weight(spec);

    let mut matrix = Vec::with_capacity(k - 1);
    let mut rhs = Vec::with_capacity(k - 1);
    for &n in fit_at {
        assert!(n >= window.start(), "fit index {n} precedes the window");
        let zn = window.at(n).expect("fit index inside the window");
        let n_rel = u32::try_from(n).expect("fit index nonnegative");
        let mut u_n = u;
        for _ in 0..n_rel {
            u_n = u_n.powi(spec.d() as i32);
        }
        let bracket = asymptotic_bracket(spec, u_n, j_terms);
        rhs.push(zn / cpowf(u_n, a) - bracket);
        matrix.push(lambdas.iter().map(|l| l.powu(n_rel)).collect::<Vec<_>>());
    }
    Ok(solve_dense(matrix, rhs))
}

/// Solves a small dense complex system by Gaussian elimination with partial
/// pivoting. Panics on a numerically singular matrix (the fit indices must
/// make the Lambda^n rows independent).
fn solve_dense(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i][col].norm().partial_cmp(&a[j][col].norm()).expect("finite pivots")
            })
            .expect("nonempty column");
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col].norm() > 0.0, "singular twin-fit system");
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for c2 in col..n {
                let sub = factor * a[col][c2];
                a[row][c2] -= sub;
            }
            let sub = factor * b[col];
            b[row] -= sub;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c2 in row + 1..n {
            acc -= a[row][c2] * x[c2];
        }
        x[row] = acc / a[row][row];
    }
    x
}
