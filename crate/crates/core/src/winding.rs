//! A winding invariant for closed curves in the escaping set, valued in Z[1/d].
//!
//! For a closed curve C whose points all escape, some iterate H^n maps C
//! into the escape region V+, where the Böttcher coordinate phi is defined.
//! The integer winding number w of phi o H^n o C then defines
//!
//! ```text
//! alpha(C) = w / d^n  in  Z[1/d],
//! ```
//!
//! independent of the choice of n: raising n by one multiplies the winding
//! by d through the functional equation phi(H(z)) = phi(z)^d, and the d^n
//! denominator compensates. In particular alpha is unchanged by H up to the
//! exact factor d, and pullbacks divide it by d.
//!
//! Numerically the curve is a cyclic polyline of samples. The depth n is
//! the largest escape time among samples (forward invariance of V+ makes
//! every sample sit inside V+ from its own escape time onward, so the max
//! works for all simultaneously). The winding number is accumulated from
//! wrapped argument differences of phi o H^n along consecutive samples;
//! each wrapped jump must stay below pi/2 or the segment is bisected by its
//! chord midpoint in C^k. Midpoints are classified like original samples
//! and may raise the depth. A segment that has been bisected more than the
//! configured cap reports [`WindingError::SamplingTooCoarse`]; a sample
//! whose orbit never reaches V+ within the iteration budget reports
//! [`WindingError::CurveLeavesBasin`].

use crate::automorphism::{AutomorphismSpec, PointClass};
use crate::boettcher::{phi, BoettcherError};
use crate::dyadic::DyadicLike;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;
use thiserror::Error;

/// A closed curve in C^k given by sample points; the segment from the last
/// sample back to the first is implied.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    samples: Vec<Vec<Complex64>>,
}

/// Wire shape: samples as nested [re, im] pairs.
#[derive(Serialize, Deserialize)]
struct CurveWire {
    samples: Vec<Vec<[f64; 2]>>,
}

impl ClosedCurve {
    /// Wraps a nonempty list of equal-dimension samples.
    pub fn new(samples: Vec<Vec<Complex64>>) -> Self {
        assert!(samples.len() >= 2, "a closed curve needs at least two samples");
        let dim = samples[0].len();
        assert!(samples.iter().all(|p| p.len() == dim), "inconsistent sample dimensions");
        Self { samples }
    }

    /// The curve t -> (radius * e^(2 pi i m t), 0, ..., 0) in C^k, sampled
    /// uniformly. An |m|-fold circle should carry at least ~64|m| samples.
    pub fn circle(m: i32, radius: f64, k: usize, samples: usize) -> Self {
        assert!(samples >= 2, "need at least two samples");
        let mut pts = Vec::with_capacity(samples);
        for i in 0..samples {
            let t = i as f64 / samples as f64;
            let z1 = Complex64::from_polar(radius, 2.0 * PI * f64::from(m) * t);
            let mut p = vec![z1];
            p.resize(k, Complex64::new(0.0, 0.0));
            pts.push(p);
        }
        Self::new(pts)
    }

    /// Sample points, in cyclic order.
    pub fn samples(&self) -> &[Vec<Complex64>] {
        &self.samples
    }

    /// Image curve under one forward application of H.
    pub fn push_forward(&self, spec: &AutomorphismSpec) -> Self {
        Self::new(self.samples.iter().map(|p| spec.forward(p)).collect())
    }

    /// Preimage curve under n applications of the closed-form inverse.
    pub fn pull_back(&self, spec: &AutomorphismSpec, n: usize) -> Self {
        let mut samples = self.samples.clone();
        for _ in 0..n {
            samples = samples.iter().map(|p| spec.inverse(p)).collect();
        }
        Self::new(samples)
    }
}

impl Serialize for ClosedCurve {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CurveWire {
            samples: self
                .samples
                .iter()
                .map(|p| p.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ClosedCurve {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = CurveWire::deserialize(deserializer)?;
        if wire.samples.len() < 2 {
            return Err(serde::de::Error::custom("a closed curve needs at least two samples"));
        }
        let dim = wire.samples[0].len();
        if wire.samples.iter().any(|p| p.len() != dim) {
            return Err(serde::de::Error::custom("inconsistent sample dimensions"));
        }
        Ok(ClosedCurve {
            samples: wire
                .samples
                .iter()
                .map(|p| p.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
                .collect(),
        })
    }
}

/// Tunable limits for the winding computation.
#[derive(Debug, Clone, Copy)]
pub struct WindingOptions {
    /// Forward-iteration budget when classifying a sample as escaping.
    pub escape_budget: usize,
    /// Maximum bisections per original segment before giving up.
    pub refine_cap: u32,
    /// Tolerance handed to the Böttcher coordinate evaluation.
    pub phi_tol: f64,
    /// Largest admissible wrapped argument jump between adjacent samples.
    pub max_jump: f64,
    /// Admissible defect, in radians, between the accumulated total and an
    /// integer multiple of 2 pi.
    pub integrality_tol: f64,
}

impl Default for WindingOptions {
    fn default() -> Self {
        Self {
            escape_budget: 64,
            refine_cap: 20,
            phi_tol: 1e-12,
            max_jump: PI / 2.0,
            integrality_tol: 1e-6 * 2.0 * PI,
        }
    }
}

/// Failure modes of the winding computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WindingError {
    /// A sample (possibly a refinement midpoint) never reached V+.
    #[error("curve leaves the escaping set near parameter {param}")]
    CurveLeavesBasin { param: f64 },
    /// A segment stayed unresolvable after the bisection cap.
    #[error("sampling too coarse near parameter {param}: segment not resolved after {cap} bisections")]
    SamplingTooCoarse { param: f64, cap: u32 },
    /// The accumulated argument missed integrality by more than the tolerance.
    #[error("accumulated argument {total} is not an integer multiple of 2 pi (defect {defect})")]
    NotAnIntegerWinding { total: f64, defect: f64 },
    /// The Böttcher coordinate failed at a pushed-forward sample.
    #[error("coordinate evaluation failed: {0}")]
    Coordinate(#[from] BoettcherError),
}

/// The computed invariant plus diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct WindingResult {
    /// alpha(C) = w / d^n in canonical form.
    pub alpha: DyadicLike,
    /// The depth n used (largest sample escape time).
    pub depth: usize,
    /// The integer winding number w of phi o H^n o C.
    pub integer_winding: i64,
    /// Samples in the refined polyline (original plus midpoints).
    pub samples_used: usize,
    /// Largest wrapped argument jump in the accepted polyline.
    pub max_jump: f64,
    /// |total - 2 pi w|, the integrality defect actually observed.
    pub integrality_defect: f64,
}

/// One node of the refined cyclic polyline.
struct Node {
    param: f64,
    point: Vec<Complex64>,
    escape_steps: usize,
}

/// Computes alpha(C) for a closed curve of escaping points.
pub fn winding_alpha(
    spec: &AutomorphismSpec,
    curve: &ClosedCurve,
    options: &WindingOptions,
) -> Result<WindingResult, WindingError> {
    // Classify every sample; the shared depth is the max escape time.
    let mut nodes = Vec::with_capacity(curve.samples().len());
    for (i, p) in curve.samples().iter().enumerate() {
        let param = i as f64 / curve.samples().len() as f64;
        nodes.push(classify_node(spec, param, p.clone(), options)?);
    }
    let mut seg_depth = vec![0u32; nodes.len()];

    loop {
        let depth = nodes.iter().map(|n| n.escape_steps).max().expect("nonempty");
        let angles = node_angles(spec, &nodes, depth, options)?;

        // Find the first segment whose wrapped jump exceeds the threshold.
        let mut offender = None;
        for i in 0..nodes.len() {
            let j = (i + 1) % nodes.len();
            if wrap_angle(angles[j] - angles[i]).abs() >= options.max_jump {
                offender = Some(i);
                break;
            }
        }

        let Some(i) = offender else {
            // All jumps small: accumulate and normalize.
            let mut total = 0.0;
            let mut max_jump = 0.0f64;
            for i in 0..nodes.len() {
                let j = (i + 1) % nodes.len();
                let jump = wrap_angle(angles[j] - angles[i]);
                max_jump = max_jump.max(jump.abs());
                total += jump;
            }
            let w = (total / (2.0 * PI)).round();
            let defect = (total - 2.0 * PI * w).abs();
            if defect > options.integrality_tol {
                return Err(WindingError::NotAnIntegerWinding { total, defect });
            }
            return Ok(WindingResult {
                alpha: DyadicLike::new(w as i64, depth as u32, spec.d()),
                depth,
                integer_winding: w as i64,
                samples_used: nodes.len(),
                max_jump,
                integrality_defect: defect,
            });
        };

        // Bisect the offending segment at its chord midpoint in C^k.
        if seg_depth[i] >= options.refine_cap {
            return Err(WindingError::SamplingTooCoarse {
                param: nodes[i].param,
                cap: options.refine_cap,
            });
        }
        let j = (i + 1) % nodes.len();
        let mid_point: Vec<Complex64> = nodes[i]
            .point
            .iter()
            .zip(&nodes[j].point)
            .map(|(a, b)| (a + b) / 2.0)
            .collect();
        let mid_param = if j == 0 {
            // Wrap-around segment: midpoint parameter halfway to 1.
            (nodes[i].param + 1.0) / 2.0
        } else {
            (nodes[i].param + nodes[j].param) / 2.0
        };
        let node = classify_node(spec, mid_param, mid_point, options)?;
        let child_depth = seg_depth[i] + 1;
        seg_depth[i] = child_depth;
        nodes.insert(i + 1, node);
        seg_depth.insert(i + 1, child_depth);
    }
}

fn classify_node(
    spec: &AutomorphismSpec,
    param: f64,
    point: Vec<Complex64>,
    options: &WindingOptions,
) -> Result<Node, WindingError> {
    match spec.classify_point(&point, options.escape_budget) {
        PointClass::Escaped { steps } => Ok(Node { param, point, escape_steps: steps }),
        PointClass::Undecided { .. } => Err(WindingError::CurveLeavesBasin { param }),
    }
}

/// Arguments of phi(H^depth(sample)) for every node.
fn node_angles(
    spec: &AutomorphismSpec,
    nodes: &[Node],
    depth: usize,
    options: &WindingOptions,
) -> Result<Vec<f64>, WindingError> {
    nodes
        .iter()
        .map(|node| {
            let mut p = node.point.clone();
            for _ in 0..depth {
                p = spec.forward(&p);
            }
            Ok(phi(spec, &p, options.phi_tol)?.value.arg())
        })
        .collect()
}

/// Wraps an angle difference into (-pi, pi].
fn wrap_angle(t: f64) -> f64 {
    let mut x = t % (2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    } else if x <= -PI {
        x += 2.0 * PI;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(k: usize, d: u32, alpha: &[Complex64]) -> AutomorphismSpec {
        AutomorphismSpec::new(k, d, alpha.to_vec()).expect("valid spec")
    }

    fn base_curve(spec: &AutomorphismSpec, m: i32) -> ClosedCurve {
        let radius = 2.0 * spec.escape_radius();
        ClosedCurve::circle(m, radius, spec.k(), 64 * m.unsigned_abs().max(1) as usize)
    }

    #[test]
    fn base_circle_has_winding_one() {
        let h = spec(3, 2, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let r = winding_alpha(&h, &base_curve(&h, 1), &WindingOptions::default()).unwrap();
        assert_eq!(r.alpha, DyadicLike::integer(1, 2));
        assert_eq!(r.depth, 0);
        assert!(r.integrality_defect < 1e-9);
    }

    #[test]
    fn multiple_circles_scale_the_invariant() {
        let h = spec(3, 2, &[c(1.0, 0.0), c(0.5, 0.0)]);
        for m in [-3i32, -1, 2, 3] {
            let r = winding_alpha(&h, &base_curve(&h, m), &WindingOptions::default()).unwrap();
            assert_eq!(r.alpha, DyadicLike::integer(m.into(), 2), "m = {m}");
        }
    }

    #[test]
    fn push_forward_multiplies_by_d() {
        for (k, d) in [(2usize, 2u32), (3, 2), (3, 3)] {
            let mut alpha = vec![c(1.0, 0.0)];
            alpha.resize(k - 1, c(0.25, 0.25));
            let h = spec(k, d, &alpha);
            let curve = base_curve(&h, 1).push_forward(&h);
            let r = winding_alpha(&h, &curve, &WindingOptions::default()).unwrap();
            assert_eq!(r.alpha, DyadicLike::integer(d.into(), d), "k={k} d={d}");
        }
    }

    #[test]
    fn pullbacks_divide_by_powers_of_d() {
        let h = spec(3, 2, &[c(1.0, 0.0), c(0.0, 0.0)]);
        for (m, n) in [(1i32, 1usize), (3, 2), (-1, 3), (3, 4)] {
            let curve = base_curve(&h, m).pull_back(&h, n);
            let r = winding_alpha(&h, &curve, &WindingOptions::default()).unwrap();
            assert_eq!(r.alpha, DyadicLike::new(m.into(), n as u32, h.d()), "m={m} n={n}");
            assert_eq!(r.depth, n, "pullback depth is exact for these curves");
        }
        // Normalization: a 2-fold curve pulled back once returns the integer 1.
        let curve = base_curve(&h, 2).pull_back(&h, 1);
        let r = winding_alpha(&h, &curve, &WindingOptions::default()).unwrap();
        assert_eq!(r.alpha, DyadicLike::integer(1, 2));
    }

    #[test]
    fn refinement_resolves_coarse_but_legitimate_sampling() {
        // 12 samples of a 3-fold circle jump by 3*2pi/12 = pi/2 per segment,
        // tripping the threshold until bisection kicks in.
        let h = spec(2, 2, &[c(1.0, 0.0)]);
        let curve = ClosedCurve::circle(3, 2.0 * h.escape_radius(), 2, 12);
        let r = winding_alpha(&h, &curve, &WindingOptions::default()).unwrap();
        assert_eq!(r.alpha, DyadicLike::integer(3, 2));
        assert!(r.samples_used > 12, "bisection should have added nodes");
        assert!(r.max_jump < PI / 2.0);
    }

    #[test]
    fn constant_curve_has_winding_zero() {
        let h = spec(3, 2, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let r = winding_alpha(&h, &base_curve(&h, 0), &WindingOptions::default()).unwrap();
        assert_eq!(r.alpha, DyadicLike::zero(2));
        assert_eq!(r.alpha.depth(), 0, "zero normalizes to depth 0");
    }

    #[test]
    fn curve_through_bounded_orbits_is_rejected() {
        let h = spec(2, 2, &[c(0.5, 0.0)]);
        let curve = ClosedCurve::circle(1, 0.4, 2, 32);
        let err = winding_alpha(&h, &curve, &WindingOptions::default()).unwrap_err();
        assert!(matches!(err, WindingError::CurveLeavesBasin { .. }), "{err}");
    }

    #[test]
    fn antipodal_refinement_walks_out_of_the_basin() {
        // Two antipodal samples of a circle: every chord midpoint is the
        // origin, which never escapes — reported as leaving the basin.
        let h = spec(2, 2, &[c(0.5, 0.0)]);
        let curve = ClosedCurve::new(vec![
            vec![c(8.0, 0.0), c(0.0, 0.0)],
            vec![c(-8.0, 0.0), c(0.0, 0.0)],
        ]);
        let err = winding_alpha(&h, &curve, &WindingOptions::default()).unwrap_err();
        assert!(matches!(err, WindingError::CurveLeavesBasin { .. }), "{err}");
    }

    #[test]
    fn refinement_cap_reports_too_coarse() {
        let h = spec(2, 2, &[c(1.0, 0.0)]);
        let curve = ClosedCurve::circle(3, 2.0 * h.escape_radius(), 2, 12);
        let options = WindingOptions { refine_cap: 0, ..WindingOptions::default() };
        let err = winding_alpha(&h, &curve, &options).unwrap_err();
        assert!(matches!(err, WindingError::SamplingTooCoarse { cap: 0, .. }), "{err}");
    }

    #[test]
    fn curve_json_round_trips() {
        let curve = ClosedCurve::circle(1, 4.0, 3, 8);
        let s = serde_json::to_string(&curve).unwrap();
        let back: ClosedCurve = serde_json::from_str(&s).unwrap();
        assert_eq!(curve.samples().len(), back.samples().len());
        for (p, q) in curve.samples().iter().zip(back.samples()) {
            for (a, b) in p.iter().zip(q) {
                assert!((a - b).norm() <= 1e-15 * (1.0 + b.norm()), "{a} vs {b}");
            }
        }
        assert!(serde_json::from_str::<ClosedCurve>(r#"{"samples":[[[1.0,0.0]]]}"#).is_err());
    }
}
