//! Trivalent graphs of rank `n` (2(n-1) vertices, 3(n-1) edges), edge paths
//! in them, girth, and the long-edge window property of closed paths.

mod enumerate;
mod girth;
mod path;
mod trivalent;
mod window;

pub use enumerate::{canonical_code, catalog, enumerate_n_graphs};
pub use girth::{girth_length, LengthAssignment};
pub use path::{random_reduced_closed_path, reduced_closed_paths, DirectedEdgePath, Step};
pub use trivalent::{edge_count, TrivalentGraph};
pub use window::{window_long_edge_check, WindowOutcome};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("rank must satisfy {min} <= n <= {max} (got {n})")]
    Rank { n: usize, min: usize, max: usize },
    #[error("invalid half-edge structure: {0}")]
    Structure(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("lengths must be positive and finite, one per edge: {0}")]
    Lengths(String),
    #[error("path is not a valid edge path: {0}")]
    InvalidPath(String),
    #[error("path is not reduced (backtrack at step {step})")]
    NotReduced { step: usize },
    #[error("path is not closed")]
    NotClosed,
    #[error("girth {girth} is below the required bound {bound}")]
    GirthBelowBound { girth: f64, bound: f64 },
    #[error("no reduced closed path of length {k} exists")]
    NoPath { k: usize },
}
