//! The canonical horoball 𝒲, based at `(-1, 0, 0)` with boundary through the
//! origin. In the hyperboloid model it is the half-space `t + x₁ ≤ 1`.

use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use super::point::{HPoint, IdealPoint};

/// Half-width of the band classified as [`HoroClass::Boundary`].
pub const BOUNDARY_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoroClass {
    Inside,
    Boundary,
    Outside,
}

/// Classification together with the signed ball-model margin `|p|² + p₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoroballTest {
    pub class: HoroClass,
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horoball {
    basepoint: IdealPoint,
}

impl Horoball {
    pub fn canonical() -> Self {
        Self {
            basepoint: IdealPoint::canonical(),
        }
    }

    pub fn basepoint(&self) -> IdealPoint {
        self.basepoint
    }

    pub fn contains(&self, p: &HPoint) -> HoroballTest {
        horoball_contains(p)
    }
}

/// `t + x₁` for a lift, evaluated without cancellation when `x₁ ≈ -t`.
pub(crate) fn horo_height(l: &Vector4<f64>) -> f64 {
    if l[1] >= 0.0 {
        l[0] + l[1]
    } else {
        (1.0 + l[2] * l[2] + l[3] * l[3]) / (l[0] - l[1])
    }
}

/// Signed margin `|b|² + b₁` of the ball coordinates, computed from the lift
/// as `(t + x₁ - 1) / (t + 1)`.
pub(crate) fn ball_margin(p: &HPoint) -> f64 {
    let l = p.lift();
    (horo_height(&l) - 1.0) / (l[0] + 1.0)
}

/// Membership in the canonical horoball.
pub fn horoball_contains(p: &HPoint) -> HoroballTest {
    let margin = ball_margin(p);
    let class = if margin > BOUNDARY_BAND {
        HoroClass::Outside
    } else if margin < -BOUNDARY_BAND {
        HoroClass::Inside
    } else {
        HoroClass::Boundary
    };
    HoroballTest { class, margin }
}

/// Busemann function of the basepoint, normalised to vanish on `∂𝒲`;
/// negative inside.
pub fn busemann(p: &HPoint) -> f64 {
    horo_height(&p.lift()).ln()
}

/// Length at which the geodesic ray from the origin, at angle `theta` to the
/// direction of `(-1, 0, 0)`, leaves 𝒲.
pub fn ray_exit_length(theta: f64) -> f64 {
    if theta <= 0.0 {
        f64::INFINITY
    } else if theta >= std::f64::consts::FRAC_PI_2 {
        0.0
    } else {
        -2.0 * (theta / 2.0).tan().ln()
    }
}
