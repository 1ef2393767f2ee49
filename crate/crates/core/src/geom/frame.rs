use nalgebra::{Vector3, Vector4};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::point::{
    ball_dir_to_tangent, minkowski, project_tangent, tangent_dot, tangent_norm, tangent_to_ball_dir, HPoint,
    Tangent,
};
use super::GeomError;

/// A point with an orthonormal triple of tangent directions.
///
/// The first axis is the direction of travel; [`chain_frame`] advances along
/// it and then turns it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    position: HPoint,
    axes: [Tangent; 3],
}

impl Frame {
    /// Standard frame at the origin aligned with the ball coordinate axes.
    pub fn standard() -> Self {
        Self {
            position: HPoint::origin(),
            axes: [
                Vector4::new(0.0, 1.0, 0.0, 0.0),
                Vector4::new(0.0, 0.0, 1.0, 0.0),
                Vector4::new(0.0, 0.0, 0.0, 1.0),
            ],
        }
    }

    /// Frame at `position` whose axes are the given ball-chart directions,
    /// re-orthonormalised in order.
    pub fn from_ball_axes(position: HPoint, axes: [Vector3<f64>; 3]) -> Result<Self, GeomError> {
        let t = axes.map(|w| ball_dir_to_tangent(&position, &w));
        Self::from_tangents(position, t)
    }

    /// Frame at `position` with first axis along `forward`; the other two
    /// axes are completed deterministically.
    pub fn with_forward(position: HPoint, forward: Tangent) -> Result<Self, GeomError> {
        let candidates = [
            Vector4::new(0.0, 1.0, 0.0, 0.0),
            Vector4::new(0.0, 0.0, 1.0, 0.0),
            Vector4::new(0.0, 0.0, 0.0, 1.0),
        ];
        let f = project_tangent(&position, &forward);
        let fnorm = tangent_norm(&position, &f);
        if fnorm == 0.0 {
            return Err(GeomError::Degenerate);
        }
        let f = f / fnorm;
        // Pick the two coordinate directions least aligned with `forward`.
        let mut ranked: Vec<(f64, Tangent)> = candidates
            .iter()
            .map(|c| {
                let c = project_tangent(&position, c);
                let n = tangent_norm(&position, &c).max(f64::MIN_POSITIVE);
                ((tangent_dot(&position, &c, &f) / n).abs(), c)
            })
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self::from_tangents(position, [f, ranked[0].1, ranked[1].1])
    }

    pub(crate) fn from_tangents(position: HPoint, raw: [Tangent; 3]) -> Result<Self, GeomError> {
        let mut axes = [Vector4::zeros(); 3];
        for i in 0..3 {
            let mut v = project_tangent(&position, &raw[i]);
            for a in axes.iter().take(i) {
                v -= a * tangent_dot(&position, &v, a);
            }
            let n = tangent_norm(&position, &v);
            if n < 1e-12 || !n.is_finite() {
                return Err(GeomError::Degenerate);
            }
            axes[i] = v / n;
        }
        Ok(Self { position, axes })
    }

    pub fn position(&self) -> HPoint {
        self.position
    }

    pub fn axes(&self) -> &[Tangent; 3] {
        &self.axes
    }

    pub fn forward(&self) -> Tangent {
        self.axes[0]
    }

    /// Axes as Euclidean unit vectors in the ball chart.
    pub fn ball_axes(&self) -> [Vector3<f64>; 3] {
        self.axes.map(|a| tangent_to_ball_dir(&self.position, &a))
    }

    /// Largest deviation of the tangent Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max(
                    (tangent_dot(&self.position, &self.axes[i], &self.axes[j]) - target).abs(),
                );
            }
            worst = worst.max(minkowski(&self.axes[i], &self.position.lift()).abs());
        }
        worst
    }

    /// Parallel transport by signed distance `t` along the first axis.
    pub fn transport(&self, t: f64) -> Result<Self, GeomError> {
        let p = self.position.lift();
        let e1 = self.axes[0];
        let (c, s) = (t.cosh(), t.sinh());
        let position = HPoint::from_lift_unchecked(p * c + e1 * s)?;
        let e1n = p * s + e1 * c;
        Self::from_tangents(position, [e1n, self.axes[1], self.axes[2]])
    }

    /// Rotates the first axis by `alpha` toward `cos ψ·e₂ + sin ψ·e₃`,
    /// carrying the rest of the frame along.
    pub fn rotate(&self, alpha: f64, dihedral: f64) -> Self {
        let [e1, e2, e3] = self.axes;
        let (cp, sp) = (dihedral.cos(), dihedral.sin());
        let w = e2 * cp + e3 * sp;
        let n = e3 * cp - e2 * sp;
        let (ca, sa) = (alpha.cos(), alpha.sin());
        let e1n = e1 * ca + w * sa;
        let wn = w * ca - e1 * sa;
        Self {
            position: self.position,
            axes: [e1n, wn * cp - n * sp, wn * sp + n * cp],
        }
    }
}

/// Advances `frame` by `t` along its first axis, then turns the first axis so
/// that the incoming and outgoing edges meet at angle `bend`; `dihedral`
/// selects the turning plane.
pub fn chain_frame(frame: &Frame, t: f64, bend: f64, dihedral: f64) -> Result<Frame, GeomError> {
    Ok(frame.transport(t)?.rotate(PI - bend, dihedral))
}

/// Inverse of [`chain_frame`].
pub fn unchain_frame(frame: &Frame, t: f64, bend: f64, dihedral: f64) -> Result<Frame, GeomError> {
    frame.rotate(-(PI - bend), dihedral).transport(-t)
}

#[derive(Serialize, Deserialize)]
struct FrameRepr {
    position: HPoint,
    axes: [[f64; 3]; 3],
}

impl Serialize for Frame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let axes = self.ball_axes().map(|a| [a[0], a[1], a[2]]);
        FrameRepr {
            position: self.position,
            axes,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Frame {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = FrameRepr::deserialize(d)?;
        let axes = r.axes.map(|a| Vector3::new(a[0], a[1], a[2]));
        Frame::from_ball_axes(r.position, axes).map_err(serde::de::Error::custom)
    }
}
