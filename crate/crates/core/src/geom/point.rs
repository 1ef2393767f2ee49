//! Points of hyperbolic 3-space.
//!
//! A point is stored by its lift to the upper sheet of the hyperboloid
//! `-t² + x² + y² + z² = -1`; ball coordinates are derived from the lift as
//! `b = x / (1 + t)`. Keeping the lift authoritative lets points far from the
//! origin (where ball coordinates saturate at double precision) still be
//! composed and transported.

use nalgebra::{Vector3, Vector4};
use serde::{Deserialize, Serialize};

use super::GeomError;

/// Points whose ball norm reaches `1 - BALL_MARGIN` have no faithful ball coordinates.
pub const BALL_MARGIN: f64 = 1e-15;

/// Largest hyperbolic distance from the origin a lift may have before
/// `cosh`/`sinh` overflow makes the representation meaningless.
pub const MAX_RADIUS: f64 = 600.0;

/// Lorentz form of signature (-, +, +, +).
#[inline]
pub fn minkowski(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Sum of Lorentz products `Σ <aᵢ, bᵢ>`, evaluated as if in twice the working
/// precision (compensated dot product). Far from the origin the terms are
/// of size `e^{2r}` while the result can be of order one.
pub(crate) fn minkowski_sum2(pairs: &[(&Vector4<f64>, &Vector4<f64>)]) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for (a, b) in pairs {
        for i in 0..4 {
            let (x, y) = if i == 0 { (-a[0], b[0]) } else { (a[i], b[i]) };
            let p = x * y;
            let e = x.mul_add(y, -p);
            let (t, f) = two_sum(s, p);
            s = t;
            c += f + e;
        }
    }
    s + c
}

#[inline]
pub(crate) fn spatial(v: &Vector4<f64>) -> Vector3<f64> {
    Vector3::new(v[1], v[2], v[3])
}

/// A point of H³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    lift: Vector4<f64>,
}

impl HPoint {
    pub fn origin() -> Self {
        Self {
            lift: Vector4::new(1.0, 0.0, 0.0, 0.0),
        }
    }

    /// Builds a point from Poincaré-ball coordinates.
    pub fn from_ball(ball: Vector3<f64>) -> Result<Self, GeomError> {
        if !ball.iter().all(|c| c.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let r2 = ball.norm_squared();
        if ball.norm() >= 1.0 - BALL_MARGIN {
            return Err(GeomError::OutsideBall { norm: r2.sqrt() });
        }
        let s = 1.0 - r2;
        let x = ball * (2.0 / s);
        Ok(Self::from_spatial(x))
    }

    pub fn from_ball_coords(x: f64, y: f64, z: f64) -> Result<Self, GeomError> {
        Self::from_ball(Vector3::new(x, y, z))
    }

    /// Builds a point from a hyperboloid lift. The time coordinate is
    /// recomputed from the spatial part so the result lies on the hyperboloid.
    pub fn from_lift(lift: Vector4<f64>) -> Result<Self, GeomError> {
        if !lift.iter().all(|c| c.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let x = spatial(&lift);
        let p = Self::from_spatial(x);
        if p.radius() > MAX_RADIUS {
            return Err(GeomError::Range {
                radius: p.radius(),
            });
        }
        Ok(p)
    }

    pub(crate) fn from_spatial(x: Vector3<f64>) -> Self {
        let t = (1.0 + x.norm_squared()).sqrt();
        Self {
            lift: Vector4::new(t, x[0], x[1], x[2]),
        }
    }

    /// Unchecked constructor for lifts produced by exact isometries; renormalises.
    pub(crate) fn from_lift_unchecked(lift: Vector4<f64>) -> Result<Self, GeomError> {
        if !lift.iter().all(|c| c.is_finite()) {
            return Err(GeomError::Range { radius: f64::INFINITY });
        }
        let p = Self::from_spatial(spatial(&lift));
        if p.radius() > MAX_RADIUS {
            return Err(GeomError::Range {
                radius: p.radius(),
            });
        }
        Ok(p)
    }

    pub fn lift(&self) -> Vector4<f64> {
        self.lift
    }

    pub fn spatial(&self) -> Vector3<f64> {
        spatial(&self.lift)
    }

    /// Ball coordinates. Saturates toward the unit sphere for points beyond
    /// roughly 38 from the origin; see [`HPoint::try_ball`].
    pub fn ball(&self) -> Vector3<f64> {
        self.spatial() / (1.0 + self.lift[0])
    }

    /// Ball coordinates, or a range error when they cannot be represented.
    pub fn try_ball(&self) -> Result<Vector3<f64>, GeomError> {
        let b = self.ball();
        if b.norm() >= 1.0 - BALL_MARGIN {
            Err(GeomError::Range {
                radius: self.radius(),
            })
        } else {
            Ok(b)
        }
    }

    /// `1 - |b|²`, computed from the lift without cancellation.
    pub(crate) fn ball_defect(&self) -> f64 {
        2.0 / (1.0 + self.lift[0])
    }

    /// Hyperbolic distance to the origin.
    pub fn radius(&self) -> f64 {
        self.spatial().norm().asinh()
    }

    pub fn is_representable_in_ball(&self) -> bool {
        self.try_ball().is_ok()
    }
}

/// Hyperbolic distance.
///
/// Uses `sinh(d/2) = |b - b'| / sqrt((1-|b|²)(1-|b'|²))`, with the defects
/// taken from the lifts; accurate to ~1e-12 relative within radius 15 of the
/// origin and degrading gracefully beyond.
pub fn dist(p: &HPoint, q: &HPoint) -> f64 {
    if p.is_representable_in_ball() && q.is_representable_in_ball() {
        let diff = (p.ball() - q.ball()).norm();
        if diff == 0.0 {
            return 0.0;
        }
        let denom = (p.ball_defect() * q.ball_defect()).sqrt();
        return 2.0 * (diff / denom).asinh();
    }
    let c = -minkowski(&p.lift, &q.lift);
    if c > 1e8 {
        c.acosh()
    } else {
        let d = p.lift - q.lift;
        2.0 * (minkowski(&d, &d).max(0.0).sqrt() / 2.0).asinh()
    }
}

/// A tangent vector expressed in the hyperboloid model.
pub type Tangent = Vector4<f64>;

/// Projects `v` onto the tangent space at `p`. The time component is
/// recomputed from the spatial part so the result is exactly tangent.
pub(crate) fn project_tangent(p: &HPoint, v: &Tangent) -> Tangent {
    let w = v + p.lift * minkowski(v, &p.lift);
    let ws = spatial(&w);
    let wt = ws.dot(&p.spatial()) / p.lift[0];
    Vector4::new(wt, ws[0], ws[1], ws[2])
}

/// Inner product of two tangents at `p`.
///
/// Splits the spatial parts into components along and across the spatial
/// part of `p`; then `<a,b> = a⊥·b⊥ + a∥ b∥ / t²`, which avoids the
/// cancellation in `-a₀b₀ + a·b` far from the origin.
pub(crate) fn tangent_dot(p: &HPoint, a: &Tangent, b: &Tangent) -> f64 {
    let ps = p.spatial();
    let r = ps.norm();
    let (a_s, b_s) = (spatial(a), spatial(b));
    if r == 0.0 {
        return a_s.dot(&b_s);
    }
    let u = ps / r;
    let (ap, bp) = (a_s.dot(&u), b_s.dot(&u));
    let (aq, bq) = (a_s - u * ap, b_s - u * bp);
    let t = p.lift[0];
    aq.dot(&bq) + ap * bp / (t * t)
}

pub(crate) fn tangent_norm(p: &HPoint, v: &Tangent) -> f64 {
    tangent_dot(p, v, v).max(0.0).sqrt()
}

/// Converts a Euclidean unit direction in the ball chart at `p` into a unit
/// hyperboloid tangent.
pub fn ball_dir_to_tangent(p: &HPoint, w: &Vector3<f64>) -> Tangent {
    let x = p.spatial();
    let t = p.lift[0];
    let xw = x.dot(w);
    let sp = w + x * (xw / (1.0 + t));
    Vector4::new(xw, sp[0], sp[1], sp[2])
}

/// Converts a hyperboloid tangent at `p` into a Euclidean unit direction in
/// the ball chart (the model is conformal, so angles agree).
pub fn tangent_to_ball_dir(p: &HPoint, v: &Tangent) -> Vector3<f64> {
    let x = p.spatial();
    let t = p.lift[0];
    let d = spatial(v) - x * (v[0] / (1.0 + t));
    let n = d.norm();
    if n == 0.0 {
        d
    } else {
        d / n
    }
}

/// Unit tangent at `p` pointing along the geodesic toward `q`.
pub fn log_direction(p: &HPoint, q: &HPoint) -> Result<Tangent, GeomError> {
    if dist(p, q) < 1e-12 {
        return Err(GeomError::Degenerate);
    }
    let v = project_tangent(p, &q.lift);
    let n = tangent_norm(p, &v);
    if n == 0.0 || !n.is_finite() {
        return Err(GeomError::Degenerate);
    }
    Ok(v / n)
}

/// Point at distance `t` along the unit tangent `v` from `p` (no validation of `v`).
pub(crate) fn exp_tangent(p: &HPoint, v: &Tangent, t: f64) -> Result<HPoint, GeomError> {
    if t.abs() > MAX_RADIUS + p.radius() {
        return Err(GeomError::Range { radius: t.abs() });
    }
    HPoint::from_lift_unchecked(p.lift * t.cosh() + v * t.sinh())
}

/// Exponential map with a ball-chart unit direction.
pub fn exp_map(p: &HPoint, u: &Vector3<f64>, t: f64) -> Result<HPoint, GeomError> {
    if (u.norm() - 1.0).abs() > 1e-12 {
        return Err(GeomError::NonUnitDirection { norm: u.norm() });
    }
    if t < 0.0 || !t.is_finite() {
        return Err(GeomError::NegativeLength(t));
    }
    let v = ball_dir_to_tangent(p, u);
    exp_tangent(p, &v, t)
}

/// Angle at `p` between the geodesics toward `q1` and `q2`, in `[0, π]`.
pub fn angle(p: &HPoint, q1: &HPoint, q2: &HPoint) -> Result<f64, GeomError> {
    let v1 = log_direction(p, q1)?;
    let v2 = log_direction(p, q2)?;
    Ok(tangent_angle(p, &v1, &v2))
}

/// Angle between two unit tangents at `p`.
pub fn tangent_angle(p: &HPoint, v1: &Tangent, v2: &Tangent) -> f64 {
    let a = tangent_norm(p, &(v1 - v2));
    let b = tangent_norm(p, &(v1 + v2));
    2.0 * a.atan2(b)
}

/// Distance between two points at distance `rho` from a common point whose
/// directions are separated by `phi`.
pub fn chord_distance(rho: f64, phi: f64) -> f64 {
    2.0 * (rho.sinh() * (phi / 2.0).sin()).asinh()
}

/// A point on the sphere at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealPoint {
    direction: Vector3<f64>,
}

impl IdealPoint {
    pub fn new(direction: Vector3<f64>) -> Result<Self, GeomError> {
        let n = direction.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(GeomError::Degenerate);
        }
        Ok(Self {
            direction: direction / n,
        })
    }

    /// `(-1, 0, 0)`, the basepoint of the canonical horoball.
    pub fn canonical() -> Self {
        Self {
            direction: Vector3::new(-1.0, 0.0, 0.0),
        }
    }

    pub fn direction(&self) -> Vector3<f64> {
        self.direction
    }

    /// Future-pointing null vector `(1, d)` representing this ideal point.
    pub fn null_vector(&self) -> Vector4<f64> {
        Vector4::new(1.0, self.direction[0], self.direction[1], self.direction[2])
    }

    /// Unit tangent at `p` pointing toward this ideal point.
    pub fn direction_from(&self, p: &HPoint) -> Tangent {
        let n = self.null_vector();
        let c = -minkowski(&n, &p.lift());
        n / c - p.lift()
    }
}

#[derive(Serialize, Deserialize)]
struct HPointRepr {
    ball: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lift: Option<[f64; 4]>,
}

impl Serialize for HPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let b = self.ball();
        let lift = if self.is_representable_in_ball() {
            None
        } else {
            Some([self.lift[0], self.lift[1], self.lift[2], self.lift[3]])
        };
        HPointRepr {
            ball: [b[0], b[1], b[2]],
            lift,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = HPointRepr::deserialize(d)?;
        match r.lift {
            Some(l) => HPoint::from_lift(Vector4::new(l[0], l[1], l[2], l[3])),
            None => HPoint::from_ball(Vector3::new(r.ball[0], r.ball[1], r.ball[2])),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Midpoint-rule integral of 2|dx|/(1-|x|²) along the straight chord between
    // two points on a diameter; independent of every closed form above.
    fn integrate_diameter(a: f64, b: f64) -> f64 {
        let n = 200_000;
        let h = (b - a) / n as f64;
        (0..n)
            .map(|i| {
                let x = a + (i as f64 + 0.5) * h;
                2.0 / (1.0 - x * x) * h.abs()
            })
            .sum()
    }

    #[test]
    fn dist_examples() {
        let o = HPoint::origin();
        assert_eq!(dist(&o, &o), 0.0);
        let half = HPoint::from_ball_coords(0.5, 0.0, 0.0).unwrap();
        let oracle = integrate_diameter(0.0, 0.5);
        assert!((dist(&o, &half) - oracle).abs() < 1e-9);
        assert!((dist(&o, &half) - 3f64.ln()).abs() < 1e-12);
        let neg = HPoint::from_ball_coords(-0.5, 0.0, 0.0).unwrap();
        let oracle = integrate_diameter(-0.5, 0.5);
        assert!((dist(&neg, &half) - oracle).abs() < 1e-9);
        assert!((dist(&neg, &half) - 2.0 * 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ball_lift_round_trip() {
        let b = Vector3::new(0.3, -0.2, 0.7);
        let p = HPoint::from_ball(b).unwrap();
        assert!((p.ball() - b).norm() < 1e-12);
        assert!((minkowski(&p.lift(), &p.lift()) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_boundary_points() {
        assert!(HPoint::from_ball_coords(1.0, 0.0, 0.0).is_err());
        assert!(HPoint::from_ball_coords(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn exp_map_examples() {
        let o = HPoint::origin();
        let x = Vector3::x();
        let p = exp_map(&o, &x, 3f64.ln()).unwrap();
        assert!((p.ball() - Vector3::new(0.5, 0.0, 0.0)).norm() < 1e-12);
        let q = HPoint::from_ball_coords(0.1, 0.2, -0.3).unwrap();
        let same = exp_map(&q, &Vector3::y(), 0.0).unwrap();
        assert!(dist(&q, &same) < 1e-15);
        assert!(exp_map(&q, &Vector3::new(1.0, 1.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn angle_examples() {
        let o = HPoint::origin();
        let a = HPoint::from_ball_coords(0.5, 0.0, 0.0).unwrap();
        let b = HPoint::from_ball_coords(0.0, 0.5, 0.0).unwrap();
        assert!((angle(&o, &a, &b).unwrap() - PI / 2.0).abs() < 1e-12);
        let c = HPoint::from_ball_coords(0.3, 0.0, 0.0).unwrap();
        let d = HPoint::from_ball_coords(-0.15, 0.15 * 3f64.sqrt(), 0.0).unwrap();
        assert!((angle(&o, &c, &d).unwrap() - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!(matches!(angle(&o, &o, &a), Err(GeomError::Degenerate)));
    }

    #[test]
    fn chord_distance_examples() {
        assert_eq!(chord_distance(1.3, 0.0), 0.0);
        assert!((chord_distance(1.3, PI) - 2.6).abs() < 1e-12);
        let o = HPoint::origin();
        let a = exp_map(&o, &Vector3::x(), 1.0).unwrap();
        let b = exp_map(&o, &Vector3::y(), 1.0).unwrap();
        assert!((chord_distance(1.0, PI / 2.0) - dist(&a, &b)).abs() < 1e-10);
    }

    #[test]
    fn ideal_direction_is_unit_tangent() {
        let p = HPoint::from_ball_coords(0.2, -0.4, 0.1).unwrap();
        let v = IdealPoint::canonical().direction_from(&p);
        assert!((minkowski(&v, &v) - 1.0).abs() < 1e-12);
        assert!(minkowski(&v, &p.lift()).abs() < 1e-12);
    }

    #[test]
    fn far_points_keep_their_lift() {
        let o = HPoint::origin();
        let far = exp_map(&o, &Vector3::x(), 60.0).unwrap();
        assert!(far.try_ball().is_err());
        assert!((far.radius() - 60.0).abs() < 1e-9);
        let json = serde_json::to_string(&far).unwrap();
        let back: HPoint = serde_json::from_str(&json).unwrap();
        assert!((back.radius() - 60.0).abs() < 1e-9);
    }
}
