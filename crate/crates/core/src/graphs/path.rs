use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::trivalent::TrivalentGraph;
use super::GraphError;

/// One traversal of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub edge: usize,
    pub forward: bool,
}

/// A sequence of oriented edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DirectedEdgePath {
    pub steps: Vec<Step>,
}

impl DirectedEdgePath {
    pub fn new(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    /// Builds a path from `(edge, forward)` pairs.
    pub fn from_pairs(pairs: &[(usize, bool)]) -> Self {
        Self {
            steps: pairs
                .iter()
                .map(|&(edge, forward)| Step { edge, forward })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Dart through which step `i` leaves its start vertex.
    pub fn out_dart(&self, g: &TrivalentGraph, i: usize) -> usize {
        let (lo, hi) = g.edges()[self.steps[i].edge];
        if self.steps[i].forward {
            lo
        } else {
            hi
        }
    }

    /// Dart through which step `i` arrives at its end vertex.
    pub fn in_dart(&self, g: &TrivalentGraph, i: usize) -> usize {
        g.mate(self.out_dart(g, i))
    }

    /// Checks edge indices and that consecutive steps share a vertex.
    pub fn validate(&self, g: &TrivalentGraph) -> Result<(), GraphError> {
        if let Some(s) = self.steps.iter().find(|s| s.edge >= g.edge_count()) {
            return Err(GraphError::InvalidPath(format!("edge {} out of range", s.edge)));
        }
        for i in 1..self.len() {
            let a = TrivalentGraph::vertex_of(self.in_dart(g, i - 1));
            let b = TrivalentGraph::vertex_of(self.out_dart(g, i));
            if a != b {
                return Err(GraphError::InvalidPath(format!(
                    "step {i} starts at vertex {b}, previous ends at {a}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_closed(&self, g: &TrivalentGraph) -> bool {
        !self.is_empty()
            && TrivalentGraph::vertex_of(self.in_dart(g, self.len() - 1))
                == TrivalentGraph::vertex_of(self.out_dart(g, 0))
    }

    /// First step that immediately retraces the previous one; for closed
    /// paths the closing point is checked too.
    pub fn first_backtrack(&self, g: &TrivalentGraph) -> Option<usize> {
        let k = self.len();
        let wrap = self.is_closed(g);
        (0..k).find(|&i| {
            if i == 0 && !wrap {
                return false;
            }
            let prev = (i + k - 1) % k;
            self.out_dart(g, i) == self.in_dart(g, prev)
        })
    }

    pub fn is_reduced(&self, g: &TrivalentGraph) -> bool {
        self.validate(g).is_ok() && self.first_backtrack(g).is_none()
    }
}

/// Depth-first search over reduced paths starting with `first`, calling
/// `visit` on each closed one of length in `1..=max_len`. Returns early when
/// `visit` returns true.
fn extend(
    g: &TrivalentGraph,
    path: &mut Vec<usize>,
    max_len: usize,
    exact: bool,
    rng: Option<&mut ChaCha8Rng>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    let first = path[0];
    let last_in = g.mate(*path.last().unwrap());
    let closes = TrivalentGraph::vertex_of(last_in) == TrivalentGraph::vertex_of(first)
        && first != last_in;
    if closes && (!exact || path.len() == max_len) && visit(path) {
        return true;
    }
    if path.len() == max_len {
        return false;
    }
    let v = TrivalentGraph::vertex_of(last_in);
    let mut next: Vec<usize> = TrivalentGraph::darts_at(v)
        .into_iter()
        .filter(|&d| d != last_in)
        .collect();
    let mut rng = rng;
    if let Some(r) = rng.as_deref_mut() {
        next.shuffle(r);
    }
    for d in next {
        path.push(d);
        let done = extend(g, path, max_len, exact, rng.as_deref_mut(), visit);
        path.pop();
        if done {
            return true;
        }
    }
    false
}

fn to_path(g: &TrivalentGraph, darts: &[usize]) -> DirectedEdgePath {
    DirectedEdgePath {
        steps: darts
            .iter()
            .map(|&d| Step {
                edge: g.edge_of(d),
                forward: g.edges()[g.edge_of(d)].0 == d,
            })
            .collect(),
    }
}

/// Every reduced closed path with between 1 and `max_len` steps, once per
/// starting position and direction.
pub fn reduced_closed_paths(g: &TrivalentGraph, max_len: usize) -> Vec<DirectedEdgePath> {
    let mut out = Vec::new();
    if max_len == 0 {
        return out;
    }
    for d in 0..g.dart_count() {
        let mut path = vec![d];
        extend(g, &mut path, max_len, false, None, &mut |p| {
            out.push(to_path(g, p));
            false
        });
    }
    out
}

/// A reduced closed path of exactly `k` steps, chosen by a seeded randomised
/// exhaustive search, so it is found whenever one exists.
pub fn random_reduced_closed_path(
    g: &TrivalentGraph,
    k: usize,
    seed: u64,
) -> Result<DirectedEdgePath, GraphError> {
    if k == 0 {
        return Err(GraphError::NoPath { k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<usize> = (0..g.dart_count()).collect();
    starts.shuffle(&mut rng);
    let mut found = None;
    for d in starts {
        let mut path = vec![d];
        if extend(g, &mut path, k, true, Some(&mut rng), &mut |p| {
            found = Some(to_path(g, p));
            true
        }) {
            break;
        }
    }
    found.ok_or(GraphError::NoPath { k })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_bigon() {
        let g = TrivalentGraph::theta();
        let p = random_reduced_closed_path(&g, 2, 0).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.is_closed(&g) && p.is_reduced(&g));
        assert_ne!(p.steps[0].edge, p.steps[1].edge);
    }

    #[test]
    fn deterministic_per_seed() {
        let g = TrivalentGraph::dumbbell();
        let a = random_reduced_closed_path(&g, 9, 42).unwrap();
        let b = random_reduced_closed_path(&g, 9, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn samples_are_reduced_and_closed() {
        for g in [TrivalentGraph::theta(), TrivalentGraph::dumbbell()] {
            for seed in 0..500 {
                let k = 1 + (seed as usize % 12);
                match random_reduced_closed_path(&g, k, seed) {
                    Ok(p) => {
                        assert_eq!(p.len(), k);
                        assert!(p.is_reduced(&g) && p.is_closed(&g));
                    }
                    Err(GraphError::NoPath { .. }) => {
                        // theta is bipartite, so its closed paths have even length
                        assert!(k % 2 == 1 && g == TrivalentGraph::theta());
                    }
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn backtrack_is_detected() {
        let g = TrivalentGraph::theta();
        let p = DirectedEdgePath::from_pairs(&[(0, true), (0, false)]);
        assert!(p.is_closed(&g));
        assert!(!p.is_reduced(&g));
        let q = DirectedEdgePath::from_pairs(&[(0, true), (1, false)]);
        assert!(q.is_reduced(&g));
        // A loop traversed once forward and once backward is a backtrack.
        let d = TrivalentGraph::dumbbell();
        let lp = (0..3).find(|&e| d.is_loop(e)).unwrap();
        assert!(!DirectedEdgePath::from_pairs(&[(lp, true), (lp, false)]).is_reduced(&d));
        assert!(DirectedEdgePath::from_pairs(&[(lp, true), (lp, true)]).is_reduced(&d));
    }

    #[test]
    fn enumerated_paths_are_reduced() {
        let g = TrivalentGraph::dumbbell();
        let ps = reduced_closed_paths(&g, 8);
        assert!(!ps.is_empty());
        for p in ps {
            assert!(p.is_reduced(&g) && p.is_closed(&g));
        }
    }
}
