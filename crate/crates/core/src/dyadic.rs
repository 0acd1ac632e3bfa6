//! Exact arithmetic in Z[1/d]: rationals whose denominator is a power of
//! the polynomial degree.
//!
//! The winding invariant of a closed curve in the escaping set takes values
//! m/d^n with integer m and a depth n counting how many pullbacks were
//! needed to reach the curve. Floating point cannot represent these exactly
//! for d other than 2, so the type keeps (m, n, d) as integers in the
//! canonical form where either n = 0 or d does not divide m (and m = 0
//! forces n = 0). Canonical forms are unique, so derived equality is value
//! equality.

use serde::{Deserialize, Deserializer, Serialize};

/// The rational m / d^n in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DyadicLike {
    m: i64,
    n: u32,
    d: u32,
}

impl DyadicLike {
    /// Builds m / d^n and reduces to canonical form. Requires d >= 2.
    pub fn new(m: i64, n: u32, d: u32) -> Self {
        assert!(d >= 2, "base d must be at least 2");
        let mut out = Self { m, n, d };
        out.normalize();
        out
    }

    /// The integer m, i.e. m / d^0.
    pub fn integer(m: i64, d: u32) -> Self {
        Self::new(m, 0, d)
    }

    /// Zero in base d.
    pub fn zero(d: u32) -> Self {
        Self::new(0, 0, d)
    }

    /// Numerator of the canonical form.
    pub fn numerator(&self) -> i64 {
        self.m
    }

    /// Denominator exponent of the canonical form.
    pub fn depth(&self) -> u32 {
        self.n
    }

    /// The base d.
    pub fn base(&self) -> u32 {
        self.d
    }

    fn normalize(&mut self) {
        if self.m == 0 {
            self.n = 0;
            return;
        }
        let d = i64::from(self.d);
        while self.n > 0 && self.m % d == 0 {
            self.m /= d;
            self.n -= 1;
        }
    }

    /// d^n as i64, panicking on overflow (depths here are single digits).
    fn pow_d(&self, n: u32) -> i64 {
        i64::from(self.d).checked_pow(n).expect("denominator d^n overflows i64")
    }

    /// Exact sum. Panics if the two values live over different bases.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "cannot mix bases {} and {}", self.d, other.d);
        let n = self.n.max(other.n);
        let a = self.m.checked_mul(self.pow_d(n - self.n)).expect("numerator overflow");
        let b = other.m.checked_mul(other.pow_d(n - other.n)).expect("numerator overflow");
        Self::new(a.checked_add(b).expect("numerator overflow"), n, self.d)
    }

    /// Exact negation.
    pub fn neg(&self) -> Self {
        Self { m: -self.m, n: self.n, d: self.d }
    }

    /// Exact difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplication by the base d (one application of the degree).
    pub fn scale_by_d(&self) -> Self {
        if self.n > 0 {
            Self { m: self.m, n: self.n - 1, d: self.d }
        } else {
            Self::new(self.m.checked_mul(i64::from(self.d)).expect("numerator overflow"), 0, self.d)
        }
    }

    /// Division by the base d (one pullback).
    pub fn div_by_d(&self) -> Self {
        Self::new(self.m, self.n + 1, self.d)
    }

    /// The representative of this value mod 1 lying in [0, 1).
    pub fn mod_one(&self) -> Self {
        let den = self.pow_d(self.n);
        Self::new(self.m.rem_euclid(den), self.n, self.d)
    }

    /// Approximate numeric value.
    pub fn to_f64(&self) -> f64 {
        self.m as f64 / self.pow_d(self.n) as f64
    }
}

impl PartialOrd for DyadicLike {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        if self.d != other.d {
            return None;
        }
        let n = self.n.max(other.n);
        let a = i128::from(self.m) * i128::from(self.pow_d(n - self.n));
        let b = i128::from(other.m) * i128::from(other.pow_d(n - other.n));
        Some(a.cmp(&b))
    }
}

impl std::fmt::Display for DyadicLike {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.n == 0 {
            write!(f, "{}", self.m)
        } else {
            write!(f, "{} / {}^{}", self.m, self.d, self.n)
        }
    }
}

/// Wire shape: deserialization re-canonicalizes and validates the base.
#[derive(Deserialize)]
struct DyadicWire {
    m: i64,
    n: u32,
    d: u32,
}

impl<'de> Deserialize<'de> for DyadicLike {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = DyadicWire::deserialize(deserializer)?;
        if wire.d < 2 {
            return Err(serde::de::Error::custom("base d must be at least 2"));
        }
        Ok(DyadicLike::new(wire.m, wire.n, wire.d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn construction_reduces_to_canonical_form() {
        assert_eq!(DyadicLike::new(6, 1, 2), DyadicLike::integer(3, 2));
        assert_eq!(DyadicLike::new(8, 3, 2), DyadicLike::integer(1, 2));
        assert_eq!(DyadicLike::new(0, 5, 3), DyadicLike::zero(3));
        // 12/3^2 reduces once: 4/3.
        let x = DyadicLike::new(12, 2, 3);
        assert_eq!((x.numerator(), x.depth()), (4, 1));
        // Negative numerators reduce the same way.
        assert_eq!(DyadicLike::new(-4, 2, 2), DyadicLike::new(-1, 0, 2));
    }

    #[test]
    fn addition_aligns_depths_exactly() {
        let half = DyadicLike::new(1, 1, 2);
        let quarter = DyadicLike::new(1, 2, 2);
        assert_eq!(half.add(&quarter), DyadicLike::new(3, 2, 2));
        // 1/3 + 2/3 collapses to the integer 1.
        assert_eq!(DyadicLike::new(1, 1, 3).add(&DyadicLike::new(2, 1, 3)), DyadicLike::integer(1, 3));
        assert_eq!(half.sub(&half), DyadicLike::zero(2));
    }

    #[test]
    #[should_panic(expected = "cannot mix bases")]
    fn addition_rejects_mixed_bases() {
        let _ = DyadicLike::new(1, 1, 2).add(&DyadicLike::new(1, 1, 3));
    }

    #[test]
    fn scaling_by_d_shifts_depth() {
        assert_eq!(DyadicLike::new(3, 2, 2).scale_by_d(), DyadicLike::new(3, 1, 2));
        assert_eq!(DyadicLike::integer(3, 2).scale_by_d(), DyadicLike::integer(6, 2));
        assert_eq!(DyadicLike::integer(5, 2).div_by_d(), DyadicLike::new(5, 1, 2));
        // Dividing then scaling is the identity.
        let x = DyadicLike::new(7, 3, 2);
        assert_eq!(x.div_by_d().scale_by_d(), x);
    }

    #[test]
    fn mod_one_lands_in_unit_interval() {
        assert_eq!(DyadicLike::new(5, 2, 2).mod_one(), DyadicLike::new(1, 2, 2));
        assert_eq!(DyadicLike::new(-1, 2, 2).mod_one(), DyadicLike::new(3, 2, 2));
        assert_eq!(DyadicLike::integer(7, 3).mod_one(), DyadicLike::zero(3));
        assert_eq!(DyadicLike::new(-5, 3, 2).mod_one(), DyadicLike::new(3, 3, 2));
    }

    #[test]
    fn ordering_and_display_follow_values() {
        assert!(DyadicLike::new(1, 2, 2) < DyadicLike::new(1, 1, 2));
        assert!(DyadicLike::new(-3, 1, 2) < DyadicLike::zero(2));
        assert_eq!(DyadicLike::new(3, 2, 2).to_string(), "3 / 2^2");
        assert_eq!(DyadicLike::integer(-4, 3).to_string(), "-4");
        assert_eq!(DyadicLike::new(6, 1, 2).to_string(), "3");
    }

    #[test]
    fn serde_round_trips_canonically() {
        let x = DyadicLike::new(6, 3, 2); // canonical 3 / 2^2
        let s = serde_json::to_string(&x).unwrap();
        let back: DyadicLike = serde_json::from_str(&s).unwrap();
        assert_eq!(x, back);
        let parsed: DyadicLike = serde_json::from_str(r#"{"m":4,"n":2,"d":2}"#).unwrap();
        assert_eq!(parsed, DyadicLike::integer(1, 2));
        assert!(serde_json::from_str::<DyadicLike>(r#"{"m":1,"n":0,"d":1}"#).is_err());
    }

    proptest! {
        #[test]
        fn add_is_commutative_and_associative(
            (m1, m2, m3) in (-1000i64..1000, -1000i64..1000, -1000i64..1000),
            (n1, n2, n3) in (0u32..6, 0u32..6, 0u32..6),
            d in 2u32..5,
        ) {
            let a = DyadicLike::new(m1, n1, d);
            let b = DyadicLike::new(m2, n2, d);
            let c = DyadicLike::new(m3, n3, d);
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        }

        #[test]
        fn mod_one_is_idempotent_and_bounded(
            m in -10_000i64..10_000,
            n in 0u32..8,
            d in 2u32..5,
        ) {
            let x = DyadicLike::new(m, n, d);
            let r = x.mod_one();
            prop_assert!(r.to_f64() >= 0.0 && r.to_f64() < 1.0);
            prop_assert_eq!(r.mod_one(), r);
            // x - (x mod 1) is an integer.
            let diff = x.sub(&r);
            prop_assert_eq!(diff.depth(), 0);
        }
    }
}
