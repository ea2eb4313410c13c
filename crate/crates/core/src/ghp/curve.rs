//! The restriction curve `r ↦ d^c_GHP(X^(r), Y^(r))` and the extended
//! distance `∫_0^∞ e^{-r} (1 ∧ d^c_GHP(X^(r), Y^(r))) dr`.
//!
//! Closed balls only change at root distances, so the curve is a step
//! function, constant on `[b_i, b_{i+1})` and right-continuous.

use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::ghp::bounds::{ghp_compact, GhpBound};
use crate::ghp::correspondence::Correspondence;
use crate::ghp::cross::CrossMetric;
use crate::ghp::search::SearchConfig;
use crate::space::{restrict, sorted_distinct, Space};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSegment {
    pub r_lo: f64,
    /// Exclusive; infinite for the last segment (serialized as `null`).
    #[serde(serialize_with = "finite_or_null")]
    pub r_hi: f64,
    pub bound: GhpBound,
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_some(v)
    } else {
        s.serialize_none()
    }
}

impl CurveSegment {
    /// Whether `r` lies in `[r_lo, r_hi)`.
    pub fn contains(&self, r: f64) -> bool {
        self.r_lo <= r && r < self.r_hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtendedBound {
    pub lower: f64,
    pub upper: f64,
}

/// Sorted distinct root distances of both spaces.
pub fn curve_breakpoints(x: &Space, y: &Space) -> Vec<f64> {
    sorted_distinct(
        x.root_distance_breakpoints()
            .into_iter()
            .chain(y.root_distance_breakpoints()),
    )
}

/// Bound on `d^c_GHP(X^(r), Y^(r))` at a single radius.
pub fn curve_value_at(x: &Space, y: &Space, r: f64, cfg: &SearchConfig) -> Result<GhpBound> {
    ghp_compact(&restrict(x, r)?, &restrict(y, r)?, cfg)
}

/// One bound per interval `[b_i, b_{i+1})` between consecutive root
/// distances, the last interval unbounded.
pub fn restriction_curve(x: &Space, y: &Space, cfg: &SearchConfig) -> Result<Vec<CurveSegment>> {
    let b = curve_breakpoints(x, y);
    b.iter()
        .enumerate()
        .map(|(k, &lo)| {
            Ok(CurveSegment {
                r_lo: lo,
                r_hi: b.get(k + 1).copied().unwrap_or(f64::INFINITY),
                bound: curve_value_at(x, y, lo, cfg)?,
            })
        })
        .collect()
}

/// Exact piecewise integral of `e^{-r} (1 ∧ value)` over a step curve.
pub fn integrate_curve(curve: &[CurveSegment]) -> ExtendedBound {
    let mut out = ExtendedBound {
        lower: 0.0,
        upper: 0.0,
    };
    for seg in curve {
        let weight = (-seg.r_lo).exp() - (-seg.r_hi).exp();
        out.lower += weight * seg.bound.lower.min(1.0);
        out.upper += weight * seg.bound.upper.min(1.0);
    }
    out
}

/// Lower and upper bounds on the extended GHP distance.
pub fn ghp_extended(x: &Space, y: &Space, cfg: &SearchConfig) -> Result<ExtendedBound> {
    Ok(integrate_curve(&restriction_curve(x, y, cfg)?))
}

/// The ball `X^(r)` embedded in the larger ball `X^(R)` by the identity.
#[derive(Debug, Clone)]
pub struct InclusionGluing {
    pub inner: Space,
    pub outer: Space,
    /// Every inner point with itself, every annulus point with its nearest
    /// inner point (lowest index on ties).
    pub correspondence: Correspondence,
    /// The ambient distances between inner and outer points.
    pub cross: CrossMetric,
    pub annulus_mass: f64,
}

/// Builds the gluing of `X^(r)` and `X^(r_outer)` induced by the ambient
/// metric, for `0 <= r <= r_outer`.
pub fn inclusion_gluing(space: &Space, r: f64, r_outer: f64) -> Result<InclusionGluing> {
    if !(r <= r_outer) {
        return Err(crate::error::Error::InvalidParameter {
            name: "r_outer",
            value: r_outer,
        });
    }
    let inner_idx = space.ball_indices(r);
    let outer_idx = space.ball_indices(r_outer);
    let inner = restrict(space, r)?;
    let outer = restrict(space, r_outer)?;
    let mut data = Vec::with_capacity(inner_idx.len() * outer_idx.len());
    for &i in &inner_idx {
        for &j in &outer_idx {
            data.push(space.dist(i, j));
        }
    }
    let cross = CrossMetric::unchecked(&inner, &outer, data);
    let pairs = outer_idx.iter().enumerate().map(|(b, &j)| {
        let a = match inner_idx.binary_search(&j) {
            Ok(a) => a,
            Err(_) => (0..inner_idx.len())
                .fold(0, |best, a| if cross.get(a, b) < cross.get(best, b) { a } else { best }),
        };
        (a, b)
    });
    let correspondence = Correspondence::new(&inner, &outer, pairs)?;
    let annulus_mass = outer.total_mass() - inner.total_mass();
    Ok(InclusionGluing {
        inner,
        outer,
        correspondence,
        cross,
        annulus_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghp::cross::evaluate_objective;

    #[test]
    fn identical_spaces_give_zero_curve() {
        let x = Space::on_line(&[0.0, 1.0, 2.5], 0, vec![1.0, 0.5, 2.0]).unwrap();
        let cfg = SearchConfig::unseeded();
        let curve = restriction_curve(&x, &x, &cfg).unwrap();
        assert_eq!(curve.len(), 3);
        assert!(curve.iter().all(|s| s.bound.upper == 0.0 && s.bound.lower == 0.0));
        assert_eq!(ghp_extended(&x, &x, &cfg).unwrap(), ExtendedBound { lower: 0.0, upper: 0.0 });
    }

    #[test]
    fn one_point_masses() {
        let x = Space::singleton(1.0).unwrap();
        let y = Space::singleton(1.5).unwrap();
        let cfg = SearchConfig::unseeded();
        let curve = restriction_curve(&x, &y, &cfg).unwrap();
        assert_eq!(curve.len(), 1);
        assert_eq!((curve[0].r_lo, curve[0].r_hi), (0.0, f64::INFINITY));
        assert_eq!((curve[0].bound.lower, curve[0].bound.upper), (0.5, 0.5));
        let e = ghp_extended(&x, &y, &cfg).unwrap();
        assert_eq!((e.lower, e.upper), (0.5, 0.5));
    }

    #[test]
    fn extra_point_beyond_radius() {
        let x = Space::on_line(&[0.0, 1.0, 2.0], 0, vec![1.0, 1.0, 0.0]).unwrap();
        let y = Space::on_line(&[0.0, 1.0], 0, vec![1.0, 1.0]).unwrap();
        let cfg = SearchConfig::unseeded();
        let curve = restriction_curve(&x, &y, &cfg).unwrap();
        assert_eq!(curve.len(), 3);
        assert_eq!(curve[0].bound.upper, 0.0);
        assert_eq!(curve[1].bound.upper, 0.0);
        assert_eq!(curve[2].r_lo, 2.0);
        assert!(curve[2].bound.lower > 0.0);
        let e = ghp_extended(&x, &y, &cfg).unwrap();
        assert!(e.upper <= (-2.0f64).exp() + 1e-15);
    }

    #[test]
    fn inclusion_on_a_segment() {
        let x = Space::on_line(&[0.0, 0.5, 1.0, 1.5], 0, vec![1.0; 4]).unwrap();
        let g = inclusion_gluing(&x, 0.5, 1.5).unwrap();
        assert_eq!(g.correspondence.pairs(), &[(0, 0), (1, 1), (1, 2), (1, 3)]);
        assert_eq!(g.annulus_mass, 2.0);
        let v = evaluate_objective(&g.inner, &g.outer, &g.cross).unwrap();
        // Hausdorff 1.0, Prokhorov 2.0 (mass gap), roots coincide.
        assert_eq!(v, 3.0);
    }
}
