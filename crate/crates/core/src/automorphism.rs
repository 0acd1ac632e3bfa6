//! Shift-like polynomial automorphisms of C^k and their escape-time dynamics.
//!
//! The maps handled here act on C^k (k >= 2) by
//!
//! ```text
//! H(z1, ..., zk) = (z1^d + a2 z2 + ... + ak zk, z3, ..., zk, z1)
//! ```
//!
//! with degree d >= 2 and weights a2, ..., ak subject to a2 != 0 and
//! |a2| < d. Each application shifts the tail coordinates left by one and
//! feeds a degree-d polynomial of the full point into the first slot, so H
//! is invertible in closed form: the last output coordinate recovers z1,
//! the middle outputs recover z3..zk, and the first equation is then linear
//! in z2.
//!
//! Outside a polydisc the dynamics are governed by the escape region
//!
//! ```text
//! V+ = { |z1| > max(R, |z2|, ..., |zk|) },
//! R  = max(2, (2 (|a2| + ... + |ak|))^(1/(d-1))).
//! ```
//!
//! The radius R is chosen so that on V+ the lower-order terms perturb z1^d
//! by a factor of at most 1/2; consequently V+ is forward invariant and
//! |z1| grows doubly exponentially along orbits through it.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Ways a parameter set can fail to define a valid automorphism.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    /// The ambient dimension k must be at least 2.
    #[error("dimension k must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    /// The degree d must be at least 2.
    #[error("degree d must be at least 2, got {0}")]
    DegreeTooSmall(u32),
    /// Exactly k-1 weights a2..ak are required.
    #[error("expected {expected} weights a2..ak for k = {k}, got {got}")]
    WrongAlphaCount { k: usize, expected: usize, got: usize },
    /// The leading weight a2 must be nonzero (it is divided by in the inverse).
    #[error("weight a2 must be nonzero")]
    AlphaTwoZero,
    /// |a2| < d is required for the model conjugacy machinery downstream.
    #[error("weight a2 must satisfy |a2| < d, got |a2| = {modulus} with d = {d}")]
    AlphaTwoTooLarge { modulus: f64, d: u32 },
    /// All weights must be finite complex numbers.
    #[error("weight a{index} is not finite")]
    NonFiniteAlpha { index: usize },
}

/// A validated parameter set (k, d, a2..ak) for one automorphism.
///
/// Construct through [`AutomorphismSpec::new`] or by deserializing the JSON
/// shape `{"k": 3, "d": 2, "alpha": [[re, im], ...]}` (alpha listed from a2);
/// both paths enforce the same validity constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct AutomorphismSpec {
    k: usize,
    d: u32,
    alpha: Vec<Complex64>,
}

/// Wire shape for (de)serializing a spec: weights as [re, im] pairs.
#[derive(Serialize, Deserialize)]
struct SpecWire {
    k: usize,
    d: u32,
    alpha: Vec<[f64; 2]>,
}

impl AutomorphismSpec {
    /// Validates and wraps a parameter set. `alpha[0]` is a2, `alpha[k-2]` is ak.
    pub fn new(k: usize, d: u32, alpha: Vec<Complex64>) -> Result<Self, SpecError> {
        if k < 2 {
            return Err(SpecError::DimensionTooSmall(k));
        }
        if d < 2 {
            return Err(SpecError::DegreeTooSmall(d));
        }
        if alpha.len() != k - 1 {
            return Err(SpecError::WrongAlphaCount { k, expected: k - 1, got: alpha.len() });
        }
        if let Some(i) = alpha.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(SpecError::NonFiniteAlpha { index: i + 2 });
        }
        let a2 = alpha[0];
        if a2 == Complex64::new(0.0, 0.0) {
            return Err(SpecError::AlphaTwoZero);
        }
        if a2.norm() >= f64::from(d) {
            return Err(SpecError::AlphaTwoTooLarge { modulus: a2.norm(), d });
        }
        Ok(Self { k, d, alpha })
    }

    /// Ambient dimension k.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Polynomial degree d of the first component.
    pub fn d(&self) -> u32 {
        self.d
    }

    /// The weights a2..ak in order.
    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    /// The leading weight a2.
    pub fn alpha2(&self) -> Complex64 {
        self.alpha[0]
    }

    /// One forward application of H.
    pub fn forward(&self, z: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(z.len(), self.k, "point dimension must match k");
        let mut head = z[0].powi(self.d as i32);
        for (a, zj) in self.alpha.iter().zip(&z[1..]) {
            head += a * zj;
        }
        let mut out = Vec::with_capacity(self.k);
        out.push(head);
        out.extend_from_slice(&z[2..]);
        out.push(z[0]);
        out
    }

    /// One application of the closed-form inverse of H.
    pub fn inverse(&self, w: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(w.len(), self.k, "point dimension must match k");
        let z1 = w[self.k - 1];
        // z3..zk are read straight off w2..w(k-1); z2 balances the first equation.
        let tail = &w[1..self.k - 1];
        let mut residue = w[0] - z1.powi(self.d as i32);
        for (a, zj) in self.alpha[1..].iter().zip(tail) {
            residue -= a * zj;
        }
        let z2 = residue / self.alpha[0];
        let mut out = Vec::with_capacity(self.k);
        out.push(z1);
        out.push(z2);
        out.extend_from_slice(tail);
        out
    }

    /// The escape radius R = max(2, (2 sum |aj|)^(1/(d-1))).
    pub fn escape_radius(&self) -> f64 {
        let sum: f64 = self.alpha.iter().map(|a| a.norm()).sum();
        let root = (2.0 * sum).powf(1.0 / f64::from(self.d - 1));
        root.max(2.0)
    }

    /// Whether z lies in the escape region V+ (strict inequalities).
    pub fn in_v_plus(&self, z: &[Complex64]) -> bool {
        assert_eq!(z.len(), self.k, "point dimension must match k");
        let head = z[0].norm();
        head > self.escape_radius() && z[1..].iter().all(|zj| head > zj.norm())
    }

    /// Iterates forward until the point enters V+ or the budget runs out.
    ///
    /// A point already in V+ reports `Escaped { steps: 0 }`. Orbits whose
    /// coordinates stop being finite before reaching V+ are reported as
    /// undecided at the step where precision ran out.
    pub fn classify_point(&self, z: &[Complex64], max_iter: usize) -> PointClass {
        let mut p = z.to_vec();
        for n in 0..=max_iter {
            if !finite_point(&p) {
                return PointClass::Undecided { iterations: n };
            }
            if self.in_v_plus(&p) {
                return PointClass::Escaped { steps: n };
            }
            if n < max_iter {
                p = self.forward(&p);
            }
        }
        PointClass::Undecided { iterations: max_iter }
    }

    /// The forward orbit z, H(z), ..., H^steps(z), stopping early at f64
    /// overflow (the orbit is then flagged truncated; every returned point
    /// is finite).
    pub fn orbit_forward(&self, z: &[Complex64], steps: usize) -> Orbit {
        self.orbit_with(z, steps, |p| self.forward(p))
    }

    /// The backward orbit z, H^(-1)(z), ..., H^(-steps)(z), with the same
    /// overflow contract as [`AutomorphismSpec::orbit_forward`].
    pub fn orbit_backward(&self, z: &[Complex64], steps: usize) -> Orbit {
        self.orbit_with(z, steps, |p| self.inverse(p))
    }

    fn orbit_with(
        &self,
        z: &[Complex64],
        steps: usize,
        step: impl Fn(&[Complex64]) -> Vec<Complex64>,
    ) -> Orbit {
        assert_eq!(z.len(), self.k, "point dimension must match k");
        let mut points = Vec::with_capacity(steps + 1);
        let mut truncated = false;
        if finite_point(z) {
            points.push(z.to_vec());
            for _ in 0..steps {
                let next = step(points.last().expect("nonempty"));
                if !finite_point(&next) {
                    truncated = true;
                    break;
                }
                points.push(next);
            }
        } else {
            truncated = true;
        }
        Orbit { points, truncated }
    }

    /// Serializes to the canonical JSON wire shape.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("spec serialization cannot fail")
    }

    /// Parses and validates the canonical JSON wire shape.
    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

impl Serialize for AutomorphismSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SpecWire {
            k: self.k,
            d: self.d,
            alpha: self.alpha.iter().map(|a| [a.re, a.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AutomorphismSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = SpecWire::deserialize(deserializer)?;
        let alpha = wire.alpha.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        AutomorphismSpec::new(wire.k, wire.d, alpha).map_err(serde::de::Error::custom)
    }
}

/// Result of iterating a point against the escape region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    /// The orbit entered V+ after exactly `steps` forward applications.
    Escaped { steps: usize },
    /// The orbit had not entered V+ within the iteration budget.
    Undecided { iterations: usize },
}

/// A finite orbit segment, truncated cleanly if f64 overflow was reached.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    /// The visited points; entry 0 is the seed.
    pub points: Vec<Vec<Complex64>>,
    /// True if iteration stopped early because a coordinate left f64 range.
    pub truncated: bool,
}

fn finite_point(z: &[Complex64]) -> bool {
    z.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(k: usize, d: u32, alpha: &[Complex64]) -> AutomorphismSpec {
        AutomorphismSpec::new(k, d, alpha.to_vec()).expect("valid spec")
    }

    #[test]
    fn forward_matches_hand_computed_examples() {
        // k = 3, d = 2, a = (1, 0): H(2,0,0) = (4, 0, 2).
        let h = spec(3, 2, &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(h.forward(&[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]), vec![
            c(4.0, 0.0),
            c(0.0, 0.0),
            c(2.0, 0.0)
        ]);

        // k = 3, d = 2, a = (1, 1): H(1,1,1) = (1 + 1 + 1, 1, 1) = (3, 1, 1).
        let h = spec(3, 2, &[c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(h.forward(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]), vec![
            c(3.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 0.0)
        ]);

        // k = 4 exercises the full shift: H(z1,z2,z3,z4) = (z1^2 + a2 z2 +
        // a3 z3 + a4 z4, z3, z4, z1) with a = (1, i, 2) at (1,2,3,4).
        let h = spec(4, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)]);
        assert_eq!(
            h.forward(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]),
            vec![c(11.0, 3.0), c(3.0, 0.0), c(4.0, 0.0), c(1.0, 0.0)]
        );
    }

    #[test]
    fn forward_k2_reduces_to_henon_like_form() {
        // k = 2: H(z1, z2) = (z1^d + a2 z2, z1).
        let h = spec(2, 3, &[c(0.5, 0.0)]);
        assert_eq!(h.forward(&[c(2.0, 0.0), c(1.0, 0.0)]), vec![c(8.5, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn inverse_recovers_hand_computed_preimage() {
        // k = 3, d = 2, a = (1, 1): the preimage of (10, 1, 3) is (3, 0, 1):
        // z1 = w3 = 3, z3 = w2 = 1, z2 = (10 - 9 - 1*1)/1 = 0.
        let h = spec(3, 2, &[c(1.0, 0.0), c(1.0, 0.0)]);
        let z = h.inverse(&[c(10.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(z, vec![c(3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(h.forward(&z), vec![c(10.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn escape_radius_matches_closed_form() {
        // 2 * sum |aj| = 2 with d = 2 gives exactly the floor value 2.
        assert_eq!(spec(3, 2, &[c(1.0, 0.0), c(0.0, 0.0)]).escape_radius(), 2.0);
        // Sum of moduli 2 with d = 2 gives (2*2)^1 = 4.
        assert_eq!(spec(3, 2, &[c(1.0, 0.0), c(1.0, 0.0)]).escape_radius(), 4.0);
        // Tiny weights are dominated by the floor of 2.
        assert_eq!(spec(2, 2, &[c(0.05, 0.0)]).escape_radius(), 2.0);
        // d = 3 takes a square root: (2 * 7.9)^(1/2).
        let h = spec(3, 3, &[c(2.9, 0.0), c(5.0, 0.0)]);
        assert!((h.escape_radius() - 15.8_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn v_plus_membership_uses_strict_inequalities() {
        let h = spec(3, 2, &[c(1.0, 0.0), c(0.0, 0.0)]); // R = 2
        assert!(h.in_v_plus(&[c(2.0001, 0.0), c(0.0, 0.0), c(0.0, 0.0)]));
        assert!(!h.in_v_plus(&[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]));
        assert!(!h.in_v_plus(&[c(3.0, 0.0), c(3.0, 0.0), c(0.0, 0.0)]));
        assert!(h.in_v_plus(&[c(3.0, 0.0), c(2.9, 0.0), c(0.0, 0.0)]));
        assert!(!h.in_v_plus(&[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 4.0)]));
    }

    #[test]
    fn classification_agrees_with_v_plus_at_step_zero() {
        let h = spec(3, 2, &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(
            h.classify_point(&[c(2.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 100),
            PointClass::Escaped { steps: 0 }
        );
        // The origin is fixed, hence never escapes.
        assert_eq!(
            h.classify_point(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 25),
            PointClass::Undecided { iterations: 25 }
        );
        // A point below R whose orbit grows: (1.9, 1.9, 0) -> (5.51, 0, 1.9) in V+.
        assert_eq!(
            h.classify_point(&[c(1.9, 0.0), c(1.9, 0.0), c(0.0, 0.0)], 100),
            PointClass::Escaped { steps: 1 }
        );
    }

    #[test]
    fn orbit_truncates_cleanly_at_overflow() {
        let h = spec(3, 2, &[c(1.0, 0.0), c(0.0, 0.0)]);
        // Squaring 1e200 overflows immediately: only the seed survives.
        let orb = h.orbit_forward(&[c(1e200, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 5);
        assert!(orb.truncated);
        assert_eq!(orb.points.len(), 1);

        // A modest seed stays representable for ~10 squarings, then stops.
        let orb = h.orbit_forward(&[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 600);
        assert!(orb.truncated);
        assert!(orb.points.len() < 601);
        assert!(orb.points.iter().all(|p| p.iter().all(|z| z.norm().is_finite())));

        // With small weights (0.5, 0, 0) spirals into the origin: never truncates.
        let h = spec(3, 2, &[c(0.5, 0.0), c(0.0, 0.0)]);
        let full = h.orbit_forward(&[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 50);
        assert!(!full.truncated);
        assert_eq!(full.points.len(), 51);
    }

    #[test]
    fn backward_orbit_inverts_forward_orbit() {
        let h = spec(4, 2, &[c(0.7, 0.2), c(0.0, 1.0), c(0.3, 0.0)]);
        let seed = vec![c(1.2, -0.4), c(0.3, 0.9), c(-1.0, 0.1), c(0.2, 0.2)];
        let fwd = h.orbit_forward(&seed, 4);
        let back = h.orbit_backward(fwd.points.last().unwrap(), 4);
        let recovered = back.points.last().unwrap();
        for (a, b) in recovered.iter().zip(&seed) {
            assert!((a - b).norm() < 1e-9, "recovered {a} vs seed {b}");
        }
    }

    #[test]
    fn spec_validation_rejects_bad_inputs() {
        assert_eq!(
            AutomorphismSpec::new(1, 2, vec![]).unwrap_err(),
            SpecError::DimensionTooSmall(1)
        );
        assert_eq!(
            AutomorphismSpec::new(2, 1, vec![c(1.0, 0.0)]).unwrap_err(),
            SpecError::DegreeTooSmall(1)
        );
        assert_eq!(
            AutomorphismSpec::new(3, 2, vec![c(1.0, 0.0)]).unwrap_err(),
            SpecError::WrongAlphaCount { k: 3, expected: 2, got: 1 }
        );
        assert_eq!(
            AutomorphismSpec::new(2, 2, vec![c(0.0, 0.0)]).unwrap_err(),
            SpecError::AlphaTwoZero
        );
        // |a2| = d is on the forbidden boundary.
        assert!(matches!(
            AutomorphismSpec::new(2, 2, vec![c(0.0, 2.0)]).unwrap_err(),
            SpecError::AlphaTwoTooLarge { .. }
        ));
    }

    #[test]
    fn json_wire_format_round_trips() {
        let h = spec(3, 2, &[c(0.5, -0.25), c(0.0, 1.0)]);
        let s = h.to_json_string();
        let back = AutomorphismSpec::from_json_str(&s).unwrap();
        assert_eq!(h, back);

        let parsed =
            AutomorphismSpec::from_json_str(r#"{"k":3,"d":2,"alpha":[[1.0,0.0],[0.0,0.0]]}"#)
                .unwrap();
        assert_eq!(parsed, spec(3, 2, &[c(1.0, 0.0), c(0.0, 0.0)]));

        // Deserialization enforces the same validity constraints as new().
        assert!(AutomorphismSpec::from_json_str(r#"{"k":3,"d":2,"alpha":[[0.0,0.0],[1.0,0.0]]}"#)
            .is_err());
    }

    /// Strategy: a valid spec plus a point with coordinates in a box small
    /// enough that the inverse's cancellation stays far below tolerance.
    fn spec_and_point() -> impl Strategy<Value = (AutomorphismSpec, Vec<Complex64>)> {
        (2usize..=4, 2u32..=4).prop_flat_map(|(k, d)| {
            let alpha2 = (0.3f64..1.5, 0.0f64..std::f64::consts::TAU)
                .prop_map(|(r, t)| Complex64::from_polar(r, t));
            let other = proptest::collection::vec(
                (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im)),
                k - 2,
            );
            let point = proptest::collection::vec(
                (-20.0f64..20.0, -20.0f64..20.0).prop_map(|(re, im)| Complex64::new(re, im)),
                k,
            );
            (alpha2, other, point).prop_map(move |(a2, mut rest, p)| {
                let mut alpha = vec![a2];
                alpha.append(&mut rest);
                (AutomorphismSpec::new(k, d, alpha).expect("valid"), p)
            })
        })
    }

    proptest! {
        #[test]
        fn inverse_round_trips_forward((h, p) in spec_and_point()) {
            let w = h.forward(&p);
            let back = h.inverse(&w);
            for (a, b) in back.iter().zip(&p) {
                prop_assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()));
            }
            let v = h.inverse(&p);
            let fwd = h.forward(&v);
            for (a, b) in fwd.iter().zip(&p) {
                prop_assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()));
            }
        }

        #[test]
        fn v_plus_is_forward_invariant_with_degree_growth(
            (h, _) in spec_and_point(),
            radial in 1.001f64..3.0,
            theta in 0.0f64..std::f64::consts::TAU,
            tail in proptest::collection::vec((0.0f64..0.99, 0.0f64..std::f64::consts::TAU), 3),
        ) {
            // Build a point of V+ directly: |z1| = radial * R and every tail
            // coordinate strictly smaller.
            let r = h.escape_radius();
            let z1 = Complex64::from_polar(radial * r, theta);
            let mut p = vec![z1];
            for (frac, arg) in tail.iter().take(h.k() - 1) {
                p.push(Complex64::from_polar(frac * z1.norm(), *arg));
            }
            prop_assert!(h.in_v_plus(&p));
            let q = h.forward(&p);
            prop_assert!(h.in_v_plus(&q));
            // On V+ the polynomial term dominates: |H1| >= |z1|^d / 2 >= |z1|.
            let growth = q[0].norm();
            prop_assert!(growth >= 0.5 * z1.norm().powi(h.d() as i32) * (1.0 - 1e-12));
            prop_assert!(growth >= z1.norm());
        }
    }
}
