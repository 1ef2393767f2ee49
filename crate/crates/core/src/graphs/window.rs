use serde::{Deserialize, Serialize};

use super::girth::{girth_length, LengthAssignment};
use super::path::DirectedEdgePath;
use super::trivalent::TrivalentGraph;
use super::GraphError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WindowOutcome {
    Pass,
    /// The window of steps `start, start+1, …` (cyclically) has no edge of
    /// length at least `threshold`.
    Violation {
        start: usize,
        steps: Vec<usize>,
        threshold: f64,
    },
}

/// Checks that every cyclic window of `3(n-1)` consecutive steps of a
/// reduced closed path contains an edge of length at least
/// `girth_bound / (3(n-1))`.
pub fn window_long_edge_check(
    g: &TrivalentGraph,
    w: &LengthAssignment,
    path: &DirectedEdgePath,
    n: usize,
    girth_bound: f64,
) -> Result<WindowOutcome, GraphError> {
    let width = super::edge_count(n)?;
    path.validate(g)?;
    if !path.is_closed(g) {
        return Err(GraphError::NotClosed);
    }
    if let Some(step) = path.first_backtrack(g) {
        return Err(GraphError::NotReduced { step });
    }
    let (girth, _) = girth_length(g, w);
    if girth < girth_bound {
        return Err(GraphError::GirthBelowBound {
            girth,
            bound: girth_bound,
        });
    }
    let threshold = girth_bound / width as f64;
    let k = path.len();
    for start in 0..k {
        let window: Vec<usize> = (0..width).map(|j| (start + j) % k).collect();
        if window.iter().all(|&i| w.get(path.steps[i].edge) < threshold) {
            return Ok(WindowOutcome::Violation {
                start,
                steps: window,
                threshold,
            });
        }
    }
    Ok(WindowOutcome::Pass)
}
