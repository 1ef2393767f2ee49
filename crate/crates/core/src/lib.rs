//! Numerical machinery for bounding injectivity radii of hyperbolic
//! 3-manifolds in terms of the rank of their fundamental group.

pub mod geom;
pub mod bounds;
pub mod graphs;
pub mod lift;
pub mod steiner;
pub mod verify;
