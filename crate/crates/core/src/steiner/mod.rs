//! Length minimisation of carrier graphs in H³ over the positions of their
//! free vertices, and the first-order (120°, planar) certificate at optima.

mod config;
mod moves;
mod optimize;
mod report;

pub use config::{random_three_terminal, star_candidates, CarrierConfig};
pub use moves::{corner_shortcut, zero_edge_repair, CornerShortcut, RepairOutcome};
pub use optimize::{optimize, stationarity, OptimizeOptions, Optimized, MERGE_TOL};
pub use report::{csv_summary, y_report, SummaryRow, VertexReport, YReport};

use crate::geom::GeomError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SteinerError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("no free vertex to optimise")]
    NothingToOptimize,
    #[error("tolerance must be positive (got {0})")]
    BadTolerance(f64),
    #[error("no convergence after {iterations} iterations (stationarity {measure:e})")]
    NotConverged {
        iterations: usize,
        measure: f64,
        best: Box<CarrierConfig>,
    },
    #[error("edge {edge} at vertex {vertex} has length {length:e}; run zero_edge_repair first")]
    ZeroEdge {
        vertex: usize,
        edge: usize,
        length: f64,
    },
    #[error(transparent)]
    Geom(#[from] GeomError),
}
