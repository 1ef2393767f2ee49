//! Geodesic-120 paths in H³ and the machinery that either finds a point of a
//! path outside the canonical horoball or produces a short-cut arc between
//! two long edges.

mod escape;
mod generate;
mod path;
mod prop42;
mod shortcut;
mod trichotomy;

pub use escape::{escapes_horoball, Containment, EscapeWitness};
pub use generate::{
    contained_instance, random_admissible_pair, random_admissible_pair_within, random_instance, AdmissiblePair,
};
pub use path::{build_path, build_path_at, is_embedded, Embedding, Geodesic120Path, SegmentWindow, BEND};
pub use prop42::{
    prop42_check, prop42_oracle, prop42_select, random_prop42_instance, two_long_edges, Prop42Case, Side,
};
pub use shortcut::{short_cut, ShortCutCertificate};
pub use trichotomy::{trichotomy, Trichotomy, TrichotomyInput};

use crate::bounds::BoundsError;
use crate::geom::GeomError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LiftError {
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("anchor lies outside the horoball (margin {margin:e})")]
    AnchorOutside { margin: f64 },
    /// A certificate failed its own re-check. For admissible input this
    /// signals a bug or a counterexample, never a user error.
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error("generator gave up after {attempts} attempts")]
    GeneratorExhausted { attempts: usize },
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}
