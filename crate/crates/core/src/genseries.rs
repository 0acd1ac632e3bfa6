//! Generalized power series: finite sums of rational powers of u^(-1) with
//! polynomial coefficients in auxiliary variables s1..s_nvars.
//!
//! A series is a finite sum
//!
//! ```text
//! f = sum_kappa  c_kappa(s1, ..., s_nvars) * u^(-kappa),
//! ```
//!
//! with exponents kappa exact rationals (never floats: the change of
//! variable machinery multiplies exponents by powers of d and takes roots,
//! and floats would silently break exponent matching). The stored key IS
//! kappa, so a key of -1 denotes the growing term u^1 and a key of 5/4
//! denotes u^(-5/4).
//!
//! The valuation v(f) is the smallest stored kappa (the most dominant power
//! of u as u -> infinity), v(0) = Infinity, and the norm is exp(-v(f)).
//! Over the coefficient domain C[s1..s_nvars] multiplication adds leading
//! exponents, so v(fg) = v(f) + v(g), the norm is multiplicative, and
//! v(f + g) >= min(v(f), v(g)) — the ultrametric triangle inequality.
//!
//! A series may be truncated: `truncation_order = Some(O)` means terms with
//! kappa >= O have been discarded and are unknown; `None` means the series
//! is exact. Operations propagate the truncation order so that every kept
//! term is certainly correct:
//!
//! - add: min(O_f, O_g);
//! - mul: min(O_f + v(g), O_g + v(f));
//! - substitute u -> u^(d^m): O * d^m;
//! - s-variable maps: O_f + D_f * min(0, min_i v(shift_i)) with D_f the
//!   s-degree bound (a shift with negative valuation multiplies up to D_f
//!   factors of growing series into every term).
//!
//! `s_degree_bound` tracks the maximum total s-degree that ever entered the
//! series, including terms later pruned or truncated, so the order
//! propagation above stays conservative. Coefficients with absolute value
//! at most [`PRUNE_THRESHOLD`] are dropped on the fly; all series here are
//! desk-scale objects with O(1) coefficient data, so the absolute cutoff
//! only removes floating-point dust.

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Exact rational exponent type for the u-variable.
pub type Exp = Ratio<i64>;

/// Convenience constructor for exact rational exponents.
pub fn exp(p: i64, q: i64) -> Exp {
    Ratio::new(p, q)
}

/// Coefficients with absolute value at or below this are treated as zero.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Valuation of a generalized series: minimum stored exponent, or Infinity
/// for the zero series. The derived ordering puts every finite value below
/// Infinity, matching the ultrametric conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    /// Minimum exponent of a nonzero series.
    Finite(Exp),
    /// Valuation of the zero series.
    Infinity,
}

impl Valuation {
    /// Valuation addition: Infinity absorbs.
    pub fn plus(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }

    /// Adds a finite exponent; Infinity stays Infinity.
    pub fn plus_exp(self, e: Exp) -> Valuation {
        match self {
            Valuation::Finite(a) => Valuation::Finite(a + e),
            Valuation::Infinity => Valuation::Infinity,
        }
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<Exp> {
        match self {
            Valuation::Finite(e) => Some(e),
            Valuation::Infinity => None,
        }
    }
}

/// Errors raised by series operations on data-dependent conditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenSeriesError {
    /// An s-variable map against a low-valuation shift would push every
    /// known term past the truncation order: nothing of the requested
    /// precision survives, which is reported rather than silently returned
    /// as a hollow series.
    #[error("truncation underflow: no term of the result lies below the propagated order {order}")]
    TruncationUnderflow { order: Exp },
    /// Numeric evaluation hit an exponent that is not an integer multiple
    /// of 1/N for the supplied N.
    #[error("exponent {kappa} times N = {big_n} is not an integer")]
    NonIntegerExponent { kappa: Exp, big_n: i64 },
}

/// A polynomial in s1..s_nvars with complex coefficients, keyed by exponent
/// tuples. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeff {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl PolyCoeff {
    /// The zero polynomial.
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    /// A constant polynomial.
    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.insert_add(vec![0; nvars], c);
        p
    }

    /// A single monomial c * s1^degs[0] * ... * sn^degs[n-1].
    pub fn monomial(nvars: usize, degs: Vec<u32>, c: Complex64) -> Self {
        assert_eq!(degs.len(), nvars, "degree tuple length must match nvars");
        let mut p = Self::zero(nvars);
        p.insert_add(degs, c);
        p
    }

    /// The variable s_{i+1} (zero-based index).
    pub fn s_var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut degs = vec![0; nvars];
        degs[i] = 1;
        Self::monomial(nvars, degs, Complex64::new(1.0, 0.0))
    }

    /// Number of s-variables of the ambient ring.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// True when no monomials are stored.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the polynomial has no monomial of positive degree.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|degs| degs.iter().all(|&d| d == 0))
    }

    /// Constant term (zero if absent).
    pub fn constant_value(&self) -> Complex64 {
        self.terms.get(&vec![0; self.nvars]).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Monomials in deterministic (lexicographic) order.
    pub fn monomials(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.terms.iter()
    }

    /// Largest total degree among stored monomials (0 for the zero poly).
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|d| d.iter().sum()).max().unwrap_or(0)
    }

    /// Largest coefficient magnitude (0 for the zero poly).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn insert_add(&mut self, degs: Vec<u32>, c: Complex64) {
        let entry = self.terms.entry(degs);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut occ) => {
                let sum = *occ.get() + c;
                if sum.norm() <= PRUNE_THRESHOLD {
                    occ.remove();
                } else {
                    *occ.get_mut() = sum;
                }
            }
            std::collections::btree_map::Entry::Vacant(vac) => {
                if c.norm() > PRUNE_THRESHOLD {
                    vac.insert(c);
                }
            }
        }
    }

    /// Sum of two polynomials over the same variables.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "mixed variable counts");
        let mut out = self.clone();
        for (degs, c) in &other.terms {
            out.insert_add(degs.clone(), *c);
        }
        out
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -*c;
        }
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (degs, a) in &self.terms {
            out.insert_add(degs.clone(), a * c);
        }
        out
    }

    /// Product of two polynomials over the same variables.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "mixed variable counts");
        let mut out = Self::zero(self.nvars);
        for (da, ca) in &self.terms {
            for (db, cb) in &other.terms {
                let degs: Vec<u32> = da.iter().zip(db).map(|(x, y)| x + y).collect();
                out.insert_add(degs, ca * cb);
            }
        }
        out
    }

    /// Evaluation at a numeric point.
    pub fn eval(&self, s: &[Complex64]) -> Complex64 {
        assert_eq!(s.len(), self.nvars, "evaluation point length must match nvars");
        let mut total = Complex64::new(0.0, 0.0);
        for (degs, c) in &self.terms {
            let mut term = *c;
            for (si, &deg) in s.iter().zip(degs) {
                if deg > 0 {
                    term *= si.powi(deg as i32);
                }
            }
            total += term;
        }
        total
    }
}

impl std::fmt::Display for PolyCoeff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Reverse lexicographic order puts s1 before s2 in linear parts.
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(degs, c)| {
                let mut s = fmt_complex(*c);
                for (i, &deg) in degs.iter().enumerate() {
                    if deg == 1 {
                        s.push_str(&format!(" s{}", i + 1));
                    } else if deg > 1 {
                        s.push_str(&format!(" s{}^{}", i + 1, deg));
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("({}{}i)", c.re, c.im)
    } else {
        format!("({}+{}i)", c.re, c.im)
    }
}

/// A generalized power series; see the module docs for conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSeries {
    nvars: usize,
    terms: BTreeMap<Exp, PolyCoeff>,
    order: Option<Exp>,
    s_bound: u32,
}

impl GenSeries {
    /// The exact zero series.
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new(), order: None, s_bound: 0 }
    }

    /// The exact constant 1 (at u^0).
    pub fn one(nvars: usize) -> Self {
        Self::u_power(nvars, exp(0, 1))
    }

    /// The single term u^(-kappa) with coefficient 1.
    pub fn u_power(nvars: usize, kappa: Exp) -> Self {
        Self::from_terms(
            nvars,
            vec![(kappa, PolyCoeff::constant(nvars, Complex64::new(1.0, 0.0)))],
            None,
        )
    }

    /// The variable s_{i+1} as a series (at u^0).
    pub fn s_variable(nvars: usize, i: usize) -> Self {
        Self::from_terms(nvars, vec![(exp(0, 1), PolyCoeff::s_var(nvars, i))], None)
    }

    /// Builds a series from raw terms, merging duplicate exponents,
    /// pruning zero coefficients, and dropping terms at or past the order.
    pub fn from_terms(nvars: usize, raw: Vec<(Exp, PolyCoeff)>, order: Option<Exp>) -> Self {
        let mut terms: BTreeMap<Exp, PolyCoeff> = BTreeMap::new();
        let mut s_bound = 0u32;
        for (kappa, poly) in raw {
            assert_eq!(poly.nvars(), nvars, "coefficient nvars must match series nvars");
            s_bound = s_bound.max(poly.total_degree());
            if let Some(o) = order {
                if kappa >= o {
                    continue;
                }
            }
            match terms.entry(kappa) {
                std::collections::btree_map::Entry::Occupied(mut occ) => {
                    let sum = occ.get().add(&poly);
                    if sum.is_zero() {
                        occ.remove();
                    } else {
                        *occ.get_mut() = sum;
                    }
                }
                std::collections::btree_map::Entry::Vacant(vac) => {
                    if !poly.is_zero() {
                        vac.insert(poly);
                    }
                }
            }
        }
        Self { nvars, terms, order, s_bound }
    }

    /// Number of s-variables.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Truncation order (None = exact).
    pub fn truncation_order(&self) -> Option<Exp> {
        self.order
    }

    /// Upper bound on the total s-degree ever present, pruned terms included.
    pub fn s_degree_bound(&self) -> u32 {
        self.s_bound
    }

    /// Terms in ascending exponent order (dominant first).
    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &PolyCoeff)> {
        self.terms.iter()
    }

    /// Number of stored terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// The coefficient polynomial at a given exponent, if stored.
    pub fn coeff_at(&self, kappa: Exp) -> Option<&PolyCoeff> {
        self.terms.get(&kappa)
    }

    /// True when no terms are stored (exact zero or hollowed-out truncation).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Minimum stored exponent, or Infinity for an empty series.
    pub fn valuation(&self) -> Valuation {
        match self.terms.keys().next() {
            Some(&kappa) => Valuation::Finite(kappa),
            None => Valuation::Infinity,
        }
    }

    /// The ultrametric norm exp(-v(f)); 0 for an empty series.
    pub fn norm(&self) -> f64 {
        match self.valuation() {
            Valuation::Finite(v) => (-ratio_to_f64(v)).exp(),
            Valuation::Infinity => 0.0,
        }
    }

    /// Largest coefficient magnitude across all terms.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(PolyCoeff::max_abs_coeff).fold(0.0, f64::max)
    }

    /// Sum, with truncation order min(O_f, O_g).
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "mixed variable counts");
        let order = opt_min(self.order, other.order);
        let mut raw: Vec<(Exp, PolyCoeff)> = Vec::new();
        for (k, p) in self.terms.iter().chain(other.terms.iter()) {
            raw.push((*k, p.clone()));
        }
        let mut out = Self::from_terms(self.nvars, raw, order);
        out.s_bound = out.s_bound.max(self.s_bound).max(other.s_bound);
        out
    }

    /// Negation (order preserved).
    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for p in out.terms.values_mut() {
            *p = p.neg();
        }
        out
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Scalar multiple (order preserved; pruning may drop terms).
    pub fn scale(&self, c: Complex64) -> Self {
        let raw = self.terms.iter().map(|(k, p)| (*k, p.scale(c))).collect();
        let mut out = Self::from_terms(self.nvars, raw, self.order);
        out.s_bound = out.s_bound.max(self.s_bound);
        out
    }

    /// Product, with truncation order min(O_f + v(g), O_g + v(f)).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "mixed variable counts");
        let order = opt_min(
            add_order_val(self.order, other.valuation()),
            add_order_val(other.order, self.valuation()),
        );
        let mut raw: Vec<(Exp, PolyCoeff)> = Vec::new();
        for (ka, pa) in &self.terms {
            for (kb, pb) in &other.terms {
                let k = ka + kb;
                if let Some(o) = order {
                    if k >= o {
                        continue;
                    }
                }
                raw.push((k, pa.mul(pb)));
            }
        }
        let mut out = Self::from_terms(self.nvars, raw, order);
        out.s_bound = out.s_bound.max(self.s_bound.saturating_add(other.s_bound));
        out
    }

    /// Integer power by repeated multiplication; f^0 is the exact 1.
    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Self::one(self.nvars);
        }
        let mut out = self.clone();
        for _ in 1..e {
            out = out.mul(self);
        }
        out
    }

    /// The substitution u -> u^(d^m): every exponent (and the truncation
    /// order) is scaled by d^m.
    pub fn substitute_u_power(&self, d: u32, m: u32) -> Self {
        let factor: i64 =
            i64::from(d).checked_pow(m).expect("exponent scale factor overflows i64");
        let scale = Ratio::from_integer(factor);
        let raw = self.terms.iter().map(|(k, p)| (k * scale, p.clone())).collect();
        let mut out = Self::from_terms(self.nvars, raw, self.order.map(|o| o * scale));
        out.s_bound = out.s_bound.max(self.s_bound);
        out
    }

    /// Intersects the truncation order with `o`, dropping terms at or past it.
    pub fn truncate_at(&self, o: Exp) -> Self {
        let order = Some(match self.order {
            Some(existing) => existing.min(o),
            None => o,
        });
        let raw = self.terms.iter().map(|(k, p)| (*k, p.clone())).collect();
        let mut out = Self::from_terms(self.nvars, raw, order);
        out.s_bound = out.s_bound.max(self.s_bound);
        out
    }

    /// Applies s_i -> scalars[i] * (s_i + shifts[i]) for every variable.
    ///
    /// Shifts must be s-free series (constant coefficient polynomials);
    /// passing a shift with s-dependence is a programming error. Shifts
    /// with negative valuation lower the reliable order of the result by up
    /// to s_degree_bound * |min valuation|; if that pushes every term of the
    /// result past the order, the loss is reported as truncation underflow.
    pub fn map_s_variables(
        &self,
        scalars: &[Complex64],
        shifts: &[&GenSeries],
    ) -> Result<Self, GenSeriesError> {
        let zero_kappas = vec![exp(0, 1); self.nvars];
        self.map_s_variables_scaled(scalars, &zero_kappas, shifts)
    }

    /// Applies s_i -> scalars[i] * u^(-scalar_kappas[i]) * (s_i + shifts[i]).
    ///
    /// Generalizes `map_s_variables` with a pure u-power attached to each
    /// scalar. The attached powers must be non-negative (factors at or below
    /// unit order): then every image of an s-monomial lands at the same or a
    /// deeper exponent than in the unscaled map, so the unscaled order
    /// bookkeeping remains a valid bound and is reused unchanged.
    pub fn map_s_variables_scaled(
        &self,
        scalars: &[Complex64],
        scalar_kappas: &[Exp],
        shifts: &[&GenSeries],
    ) -> Result<Self, GenSeriesError> {
        assert_eq!(scalars.len(), self.nvars, "one scalar per s-variable");
        assert_eq!(scalar_kappas.len(), self.nvars, "one scalar exponent per s-variable");
        assert!(
            scalar_kappas.iter().all(|k| *k >= exp(0, 1)),
            "scalar u-powers must sit at or below unit order"
        );
        assert_eq!(shifts.len(), self.nvars, "one shift per s-variable");
        for sh in shifts {
            assert_eq!(sh.nvars, self.nvars, "shift nvars must match series nvars");
            assert!(
                sh.terms.values().all(PolyCoeff::is_constant),
                "shift series must be s-free"
            );
        }

        // Closed-form order bookkeeping (see module docs).
        let m: Exp = shifts
            .iter()
            .map(|sh| sh.valuation().finite().map_or(exp(0, 1), |v| v.min(exp(0, 1))))
            .min()
            .unwrap_or_else(|| exp(0, 1));
        let d_bound = i64::from(self.s_bound);
        let o_from_f = self.order.map(|o| o + m * Ratio::from_integer(d_bound));
        let o_from_shifts = match (self.valuation().finite(), opt_min_iter(shifts.iter().map(|s| s.order))) {
            (Some(vf), Some(os)) => {
                Some(vf + os + m * Ratio::from_integer((d_bound - 1).max(0)))
            }
            _ => None,
        };
        let order = opt_min(o_from_f, o_from_shifts);

        // Precompute powers of each shift up to the degrees that occur.
        let mut max_deg = vec![0u32; self.nvars];
        for poly in self.terms.values() {
            for (degs, _) in poly.monomials() {
                for (i, &deg) in degs.iter().enumerate() {
                    max_deg[i] = max_deg[i].max(deg);
                }
            }
        }
        let mut shift_pows: Vec<Vec<GenSeries>> = Vec::with_capacity(self.nvars);
        for (i, sh) in shifts.iter().enumerate() {
            let mut pows = vec![GenSeries::one(self.nvars)];
            for e in 1..=max_deg[i] {
                pows.push(pows[(e - 1) as usize].mul(sh));
            }
            shift_pows.push(pows);
        }

        let mut result = GenSeries::zero(self.nvars);
        for (&kappa, poly) in &self.terms {
            for (degs, &c) in poly.monomials() {
                // Scalar prefactor c * prod_i scalars[i]^degs[i], with the
                // attached u-powers accumulated into the base exponent.
                let mut pref = c;
                let mut kappa_out = kappa;
                for (i, &deg) in degs.iter().enumerate() {
                    if deg > 0 {
                        pref *= scalars[i].powi(deg as i32);
                        kappa_out += scalar_kappas[i] * Ratio::from_integer(i64::from(deg));
                    }
                }
                let mut term = GenSeries::from_terms(
                    self.nvars,
                    vec![(kappa_out, PolyCoeff::constant(self.nvars, pref))],
                    None,
                );
                // Expand each (s_i + shift_i)^deg binomially.
                for (i, &deg) in degs.iter().enumerate() {
                    if deg == 0 {
                        continue;
                    }
                    let mut factor = GenSeries::zero(self.nvars);
                    for j in 0..=deg {
                        let coeff = binomial(deg, j);
                        let pow = shift_pows[i][(deg - j) as usize]
                            .mul_by_s_monomial(i, j)
                            .scale(Complex64::new(coeff, 0.0));
                        factor = factor.add(&pow);
                    }
                    term = term.mul(&factor);
                }
                result = result.add(&term);
            }
        }

        // Apply the closed-form order on top of whatever the stepwise
        // propagation produced (both are valid bounds; keep the tighter).
        if let Some(o) = order {
            result = result.truncate_at(o);
        }
        result.s_bound = result.s_bound.max(self.s_bound);

        if !self.terms.is_empty() && result.terms.is_empty() {
            if let Some(o) = result.order {
                return Err(GenSeriesError::TruncationUnderflow { order: o });
            }
        }
        Ok(result)
    }

    /// Rewrites the series under the fiber rescaling s_i -> u^w s_i: a
    /// monomial of total s-degree D stored at exponent kappa moves to
    /// kappa + w D. This is a ring isomorphism (exponents add under
    /// products), so it commutes with add, mul, and pow.
    ///
    /// For w >= 0 the truncation order carries over unchanged: dropped
    /// terms only move deeper. For w < 0 it weakens by w times the
    /// s-degree bound, the farthest a dropped term could climb.
    pub fn reweight_s_exponents(&self, w: Exp) -> Self {
        let mut raw: Vec<(Exp, PolyCoeff)> = Vec::new();
        for (&kappa, poly) in &self.terms {
            for (degs, &c) in poly.monomials() {
                let d_tot: u32 = degs.iter().sum();
                let k = kappa + w * Ratio::from_integer(i64::from(d_tot));
                raw.push((k, PolyCoeff::monomial(self.nvars, degs.clone(), c)));
            }
        }
        let order = self.order.map(|o| {
            if w >= exp(0, 1) {
                o
            } else {
                o + w * Ratio::from_integer(i64::from(self.s_bound))
            }
        });
        let mut out = Self::from_terms(self.nvars, raw, order);
        out.s_bound = out.s_bound.max(self.s_bound);
        out
    }

    /// Multiplies every coefficient by s_{var+1}^deg (internal helper for
    /// binomial expansion; exactness and order are unaffected).
    fn mul_by_s_monomial(&self, var: usize, deg: u32) -> Self {
        if deg == 0 {
            return self.clone();
        }
        let raw = self
            .terms
            .iter()
            .map(|(k, p)| {
                let mut shifted = PolyCoeff::zero(self.nvars);
                for (degs, c) in p.monomials() {
                    let mut d = degs.clone();
                    d[var] += deg;
                    shifted.insert_add(d, *c);
                }
                (*k, shifted)
            })
            .collect();
        let mut out = Self::from_terms(self.nvars, raw, self.order);
        out.s_bound = out.s_bound.max(self.s_bound.saturating_add(deg));
        out
    }

    /// Numeric evaluation with u = v^N: returns sum of poly(s) * v^(-kappa*N).
    ///
    /// Every stored exponent times N must be an integer; otherwise the
    /// caller picked an N inconsistent with the series' ramification.
    pub fn eval(&self, big_n: i64, v: Complex64, s: &[Complex64]) -> Result<Complex64, GenSeriesError> {
        let mut total = Complex64::new(0.0, 0.0);
        for (&kappa, poly) in &self.terms {
            let scaled = kappa * Ratio::from_integer(big_n);
            if !scaled.is_integer() {
                return Err(GenSeriesError::NonIntegerExponent { kappa, big_n });
            }
            let e = scaled.to_integer();
            let e32 = i32::try_from(-e).expect("v-exponent fits i32");
            total += poly.eval(s) * v.powi(e32);
        }
        Ok(total)
    }
}

impl std::fmt::Display for GenSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        } else {
            let parts: Vec<String> = self
                .terms
                .iter()
                .map(|(kappa, poly)| format!("({}) · u^({})", poly, -kappa))
                .collect();
            write!(f, "{}", parts.join(" + "))?;
        }
        if let Some(o) = self.order {
            write!(f, " + O(u^({}))", -o)?;
        }
        Ok(())
    }
}

fn opt_min(a: Option<Exp>, b: Option<Exp>) -> Option<Exp> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn opt_min_iter(it: impl Iterator<Item = Option<Exp>>) -> Option<Exp> {
    it.flatten().min()
}

/// O_f + v(g) with None/Infinity absorbing to None (no constraint).
fn add_order_val(order: Option<Exp>, val: Valuation) -> Option<Exp> {
    match (order, val) {
        (Some(o), Valuation::Finite(v)) => Some(o + v),
        _ => None,
    }
}

fn ratio_to_f64(r: Exp) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact binomial coefficient, computed in u128 and returned as f64.
fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..u128::from(k) {
        acc = acc * (u128::from(n) - i) / (i + 1);
    }
    acc as f64
}

/// Wire shape for series JSON: exponents and orders as [numerator,
/// denominator] pairs, coefficients as lists of monomials.
#[derive(Serialize, Deserialize)]
struct SeriesWire {
    nvars: usize,
    terms: Vec<TermWire>,
    order: Option<[i64; 2]>,
    s_bound: u32,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    exp: [i64; 2],
    poly: Vec<MonomialWire>,
}

#[derive(Serialize, Deserialize)]
struct MonomialWire {
    degs: Vec<u32>,
    coeff: [f64; 2],
}

impl Serialize for GenSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SeriesWire {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, p)| TermWire {
                    exp: [*k.numer(), *k.denom()],
                    poly: p
                        .monomials()
                        .map(|(degs, c)| MonomialWire { degs: degs.clone(), coeff: [c.re, c.im] })
                        .collect(),
                })
                .collect(),
            order: self.order.map(|o| [*o.numer(), *o.denom()]),
            s_bound: self.s_bound,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GenSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = SeriesWire::deserialize(deserializer)?;
        let parse_ratio = |pair: [i64; 2]| -> Result<Exp, D::Error> {
            if pair[1] == 0 {
                return Err(serde::de::Error::custom("exponent denominator is zero"));
            }
            Ok(Ratio::new(pair[0], pair[1]))
        };
        let mut raw = Vec::new();
        for term in wire.terms {
            let kappa = parse_ratio(term.exp)?;
            let mut poly = PolyCoeff::zero(wire.nvars);
            for mono in term.poly {
                if mono.degs.len() != wire.nvars {
                    return Err(serde::de::Error::custom("monomial degree tuple length mismatch"));
                }
                poly.insert_add(mono.degs, Complex64::new(mono.coeff[0], mono.coeff[1]));
            }
            raw.push((kappa, poly));
        }
        let order = wire.order.map(parse_ratio).transpose()?;
        let mut out = GenSeries::from_terms(wire.nvars, raw, order);
        out.s_bound = out.s_bound.max(wire.s_bound);
        Ok(out)
    }
}
