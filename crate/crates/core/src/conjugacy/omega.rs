//! The model skew product at infinity and the seed of the conjugating series.
//!
//! After the ramified change of variable u = v^N with
//!
//! ```text
//! N = (d^(k-1) - 1) d^(k-2)        (d >= 3)
//! N = (2^(k-1) - 1) 2^(k-1)        (d = 2)
//! ```
//!
//! the escape-region dynamics of H are modeled by the skew product
//!
//! ```text
//! omega(v, s) = (v^d, Lambda_i (s_i + sigma(v)))        i = 1..k-1,
//! sigma(v)    = T(v) / (k-1),
//! T(v)        = v^S - sum_{l=3..k} (a_l/d) v^(e_l)  [+ (a3 a_k/4) v  if d = 2, k >= 3],
//! ```
//!
//! where Lambda_1..Lambda_{k-1} are the roots of d r^(k-1) + a2 = 0 (all of
//! modulus (|a2|/d)^(1/(k-1)) < 1), and the integer exponents are
//!
//! ```text
//! d >= 3:  S = (d^k - 1) d^(k-2),   e_l = -d^(l-3) + d^(l+k-4) + (d-1) d^(k-2)
//! d = 2:   S = (2^k - 1) 2^(k-1),   e_l = -2^(l-2) + 2^(l+k-3) + 2^(k-1).
//! ```
//!
//! The fixed-point iteration that produces the conjugating series starts from
//!
//! ```text
//! g0(v, s) = v^N + v^P ( s_1 + ... + s_{k-1} - sum_l (a_l/d) v^(e_l)
//!                        [+ (a3 a_k/4) v  if d = 2, k >= 3] ),
//! P = (1-d) d^(2k-3)  (d >= 3),      P = -2^(2k-2)  (d = 2),
//! ```
//!
//! which satisfies g0 ~ v^N = u at infinity. Note the bracket in g0 divides
//! the weights by d only, while sigma carries an extra 1/(k-1): the shift is
//! shared across all k-1 fiber variables, the seed's bracket is their sum.
//!
//! All series here live in u-units: a v-power v^E is stored as the exponent
//! kappa = -E/N of u^(-kappa).
//!
//! # Scaled fiber coordinates
//!
//! The shift sigma has valuation -S/N in u-units, so composing a truncated
//! series with omega directly costs S/N of reliable order per unit of
//! s-degree: the conservative bookkeeping collapses after a few steps. The
//! fix is the rescaling t_i = u^(-S/N) s_i. Writing rho = S/N, composition
//! with omega becomes, in the t-variables,
//!
//! ```text
//! u -> u^d,    t_i -> Lambda_i u^((1-d) rho) (t_i + sigma u^(-rho)),
//! ```
//!
//! where the scaled shift sigma * u^(-rho) has valuation exactly 0 and the
//! scalar carries the non-negative power (d-1) rho. In these coordinates the
//! fiber map costs no reliable order at all, so deep truncated iteration
//! keeps certified truncation orders. `to_scaled`/`from_scaled` convert a
//! series between the two charts (an exact exponent reindexing), and
//! `compose_scaled` is g o omega for series in the scaled chart.

use crate::automorphism::AutomorphismSpec;
use crate::genseries::{exp, Exp, GenSeries, GenSeriesError, PolyCoeff};
use num_complex::Complex64;
use num_rational::Ratio;

/// The roots of d r^(k-1) + a2 = 0, sorted by principal argument.
pub fn lambda_roots(spec: &AutomorphismSpec) -> Vec<Complex64> {
    let k = spec.k();
    let target = -spec.alpha2() / f64::from(spec.d());
    if k == 2 {
        // The exponent is 1: the root is the target itself, exactly.
        return vec![target];
    }
    let modulus = target.norm().powf(1.0 / (k - 1) as f64);
    let base_arg = target.arg();
    let mut roots: Vec<Complex64> = (0..k - 1)
        .map(|j| {
            let arg = (base_arg + 2.0 * std::f64::consts::PI * j as f64) / (k - 1) as f64;
            Complex64::from_polar(modulus, arg)
        })
        .collect();
    roots.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).expect("finite arguments"));
    roots
}

/// The model map omega together with every derived constant of the change
/// of variable, and the series seed g0.
#[derive(Debug, Clone)]
pub struct OmegaModel {
    spec: AutomorphismSpec,
    lambdas: Vec<Complex64>,
    /// Ramification index N of u = v^N.
    big_n: i64,
    /// Leading exponent S of T.
    big_s: i64,
    /// Exponents e_l for l = 3..=k, in order.
    e_exponents: Vec<i64>,
    /// Exponent P of the s-block prefactor in g0.
    prefactor: i64,
    /// Coefficient of the extra linear term of T (zero unless d = 2, k >= 3).
    extra_linear: Complex64,
    /// sigma(v) as an s-free exact series in u-units.
    shift: GenSeries,
    /// sigma * u^(-S/N), the valuation-zero shift of the scaled chart.
    shift_scaled: GenSeries,
}

impl OmegaModel {
    /// Derives all model constants from a validated parameter set.
    pub fn new(spec: &AutomorphismSpec) -> Self {
        let k = spec.k() as u32;
        let d = spec.d();
        let di = i64::from(d);
        let pow = |b: i64, e: u32| -> i64 { b.checked_pow(e).expect("model exponent overflow") };

        let (big_n, big_s, prefactor) = if d == 2 {
            (
                (pow(2, k - 1) - 1) * pow(2, k - 1),
                (pow(2, k) - 1) * pow(2, k - 1),
                -pow(2, 2 * k - 2),
            )
        } else {
            (
                (pow(di, k - 1) - 1) * pow(di, k - 2),
                (pow(di, k) - 1) * pow(di, k - 2),
                (1 - di) * pow(di, 2 * k - 3),
            )
        };
        let e_exponents: Vec<i64> = (3..=k)
            .map(|l| {
                if d == 2 {
                    -pow(2, l - 2) + pow(2, l + k - 3) + pow(2, k - 1)
                } else {
                    -pow(di, l - 3) + pow(di, l + k - 4) + (di - 1) * pow(di, k - 2)
                }
            })
            .collect();
        let extra_linear = if d == 2 && k >= 3 {
            let alpha = spec.alpha();
            alpha[1] * alpha[k as usize - 2] / 4.0
        } else {
            Complex64::new(0.0, 0.0)
        };

        // sigma = T/(k-1) in u-units: v^E is stored as kappa = -E/N.
        let nvars = spec.k() - 1;
        let km1 = (k - 1) as f64;
        let mut shift_terms = vec![(
            exp(-big_s, big_n),
            PolyCoeff::constant(nvars, Complex64::new(1.0 / km1, 0.0)),
        )];
        for (l_idx, &e_l) in e_exponents.iter().enumerate() {
            let a_l = spec.alpha()[l_idx + 1];
            shift_terms.push((
                exp(-e_l, big_n),
                PolyCoeff::constant(nvars, -a_l / (f64::from(d) * km1)),
            ));
        }
        if extra_linear.norm() > 0.0 {
            shift_terms.push((
                exp(-1, big_n),
                PolyCoeff::constant(nvars, extra_linear / km1),
            ));
        }
        let shift = GenSeries::from_terms(nvars, shift_terms, None);
        let shift_scaled = shift.mul(&GenSeries::u_power(nvars, exp(big_s, big_n)));

        Self {
            spec: spec.clone(),
            lambdas: lambda_roots(spec),
            big_n,
            big_s,
            e_exponents,
            prefactor,
            extra_linear,
            shift,
            shift_scaled,
        }
    }

    /// The underlying automorphism parameters.
    pub fn spec(&self) -> &AutomorphismSpec {
        &self.spec
    }

    /// The fiber contraction factors Lambda_1..Lambda_{k-1}.
    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    /// Ramification index N of u = v^N.
    pub fn big_n(&self) -> i64 {
        self.big_n
    }

    /// Leading exponent S of the shift numerator T.
    pub fn big_s(&self) -> i64 {
        self.big_s
    }

    /// The exponents e_3..e_k.
    pub fn e_exponents(&self) -> &[i64] {
        &self.e_exponents
    }

    /// The prefactor exponent P of the s-block in g0.
    pub fn prefactor_exponent(&self) -> i64 {
        self.prefactor
    }

    /// The shared fiber shift sigma(v) as an exact s-free series (u-units).
    pub fn shift(&self) -> &GenSeries {
        &self.shift
    }

    /// T(v) evaluated numerically.
    pub fn t_numeric(&self, v: Complex64) -> Complex64 {
        let mut t = v.powi(self.big_s as i32);
        for (l_idx, &e_l) in self.e_exponents.iter().enumerate() {
            let a_l = self.spec.alpha()[l_idx + 1];
            t -= a_l / f64::from(self.spec.d()) * v.powi(e_l as i32);
        }
        t + self.extra_linear * v
    }

    /// One numeric application of omega.
    pub fn apply_numeric(&self, v: Complex64, s: &[Complex64]) -> (Complex64, Vec<Complex64>) {
        assert_eq!(s.len(), self.spec.k() - 1, "fiber point length must be k-1");
        let sigma = self.t_numeric(v) / (self.spec.k() - 1) as f64;
        let image_s = self.lambdas.iter().zip(s).map(|(l, si)| l * (si + sigma)).collect();
        (v.powi(self.spec.d() as i32), image_s)
    }

    /// The iteration seed g0.
    pub fn g0(&self) -> GenSeries {
        let nvars = self.spec.k() - 1;
        let n = self.big_n;
        let p = self.prefactor;
        let mut terms = vec![(
            exp(-n, n),
            PolyCoeff::constant(nvars, Complex64::new(1.0, 0.0)),
        )];
        let mut s_sum = PolyCoeff::zero(nvars);
        for i in 0..nvars {
            s_sum = s_sum.add(&PolyCoeff::s_var(nvars, i));
        }
        terms.push((exp(-p, n), s_sum));
        for (l_idx, &e_l) in self.e_exponents.iter().enumerate() {
            let a_l = self.spec.alpha()[l_idx + 1];
            terms.push((
                exp(-(p + e_l), n),
                PolyCoeff::constant(nvars, -a_l / f64::from(self.spec.d())),
            ));
        }
        if self.extra_linear.norm() > 0.0 {
            terms.push((exp(-(p + 1), n), PolyCoeff::constant(nvars, self.extra_linear)));
        }
        GenSeries::from_terms(nvars, terms, None)
    }

    /// Series composition g o omega: u -> u^d on exponents, then
    /// s_i -> Lambda_i (s_i + sigma) with sigma at the outer variable.
    pub fn compose(&self, g: &GenSeries) -> Result<GenSeries, GenSeriesError> {
        let substituted = g.substitute_u_power(self.spec.d(), 1);
        let shifts: Vec<&GenSeries> = vec![&self.shift; self.spec.k() - 1];
        substituted.map_s_variables(&self.lambdas, &shifts)
    }

    /// m-fold composition g o omega^m.
    pub fn compose_iterate(&self, g: &GenSeries, m: usize) -> Result<GenSeries, GenSeriesError> {
        let mut out = g.clone();
        for _ in 0..m {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    /// The weight rho = S/N of the fiber variables: each s_i rides at
    /// u^rho under iteration, and the scaled chart divides it out.
    pub fn fiber_weight(&self) -> Exp {
        Ratio::new(self.big_s, self.big_n)
    }

    /// Converts a series in the plain chart to scaled fiber coordinates
    /// (s_i = u^rho t_i): exact; on truncated input the order weakens by
    /// rho times the s-degree bound.
    pub fn to_scaled(&self, g: &GenSeries) -> GenSeries {
        g.reweight_s_exponents(-self.fiber_weight())
    }

    /// Converts a series in scaled fiber coordinates back to the plain
    /// chart. The truncation order carries over unchanged (and stays valid:
    /// dropped terms only move deeper).
    pub fn from_scaled(&self, g: &GenSeries) -> GenSeries {
        g.reweight_s_exponents(self.fiber_weight())
    }

    /// Series composition g o omega for g in scaled fiber coordinates:
    /// u -> u^d, then t_i -> Lambda_i u^((1-d) rho) (t_i + sigma u^(-rho)).
    /// The shift has valuation 0 and the scalar power is non-negative, so
    /// the reliable order of a truncated g propagates without loss (it is
    /// in fact multiplied by d).
    pub fn compose_scaled(&self, g: &GenSeries) -> Result<GenSeries, GenSeriesError> {
        let substituted = g.substitute_u_power(self.spec.d(), 1);
        let nvars = self.spec.k() - 1;
        let shifts: Vec<&GenSeries> = vec![&self.shift_scaled; nvars];
        let kappa = self.fiber_weight() * Ratio::from_integer(i64::from(self.spec.d()) - 1);
        let kappas = vec![kappa; nvars];
        substituted.map_s_variables_scaled(&self.lambdas, &kappas, &shifts)
    }

    /// The contraction exponent c = (d-1) d^(k-1) / (d^(k-1) - 1) in u-units.
    pub fn contraction_exponent(&self) -> Exp {
        let d = i64::from(self.spec.d());
        let k = self.spec.k() as u32;
        let dk1 = d.checked_pow(k - 1).expect("exponent overflow");
        Ratio::new((d - 1) * dk1, dk1 - 1)
    }
}
