//! Hyperbolic 3-space in the Poincaré ball model, with a hyperboloid backend
//! for isometries and frame transport.

mod frame;
mod horoball;
mod isometry;
mod point;
mod segment;

pub use frame::{chain_frame, unchain_frame, Frame};
pub use horoball::{
    busemann, horoball_contains, ray_exit_length, HoroClass, Horoball, HoroballTest,
    BOUNDARY_BAND,
};
pub use isometry::Isometry;
pub use point::{
    angle, ball_dir_to_tangent, chord_distance, dist, exp_map, log_direction, minkowski,
    tangent_angle, tangent_to_ball_dir, HPoint, IdealPoint, Tangent, BALL_MARGIN, MAX_RADIUS,
};
pub(crate) use point::{exp_tangent, tangent_dot, tangent_norm};
pub use segment::{
    segment_distance, thin_triangle_gap, BusemannProfile, GeodesicSegment, ASYMPTOTIC_TOL,
    SEARCH_RADIUS,
};

/// Default thin-triangles constant, `ln(1 + √2)`.
pub const DEFAULT_DELTA: f64 = 0.881_373_587_019_543;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("ball coordinates must have norm < 1 (got {norm})")]
    OutsideBall { norm: f64 },
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("point at hyperbolic radius {radius} is outside the representable range")]
    Range { radius: f64 },
    #[error("direction must be a unit vector (norm {norm})")]
    NonUnitDirection { norm: f64 },
    #[error("length must be a finite nonnegative number (got {0})")]
    NegativeLength(f64),
    #[error("direction undefined: points coincide")]
    Degenerate,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_delta_is_log_one_plus_sqrt_two() {
        assert!((DEFAULT_DELTA - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-15);
    }
}
