use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::trivalent::TrivalentGraph;
use super::GraphError;

/// Positive length for each edge, indexed like [`TrivalentGraph::edges`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthAssignment {
    lengths: Vec<f64>,
}

impl LengthAssignment {
    pub fn new(g: &TrivalentGraph, lengths: Vec<f64>) -> Result<Self, GraphError> {
        if lengths.len() != g.edge_count() {
            return Err(GraphError::Lengths(format!(
                "expected {} lengths, got {}",
                g.edge_count(),
                lengths.len()
            )));
        }
        if let Some(x) = lengths.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(GraphError::Lengths(format!("bad length {x}")));
        }
        Ok(Self { lengths })
    }

    pub fn get(&self, e: usize) -> f64 {
        self.lengths[e]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.lengths
    }

    /// All lengths multiplied by `k > 0`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            lengths: self.lengths.iter().map(|x| x * k).collect(),
        }
    }
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Shortest path from `s` to `t` avoiding edge `skip`; returns the length and
/// the edges used.
fn dijkstra(
    g: &TrivalentGraph,
    w: &LengthAssignment,
    s: usize,
    t: usize,
    skip: usize,
) -> Option<(f64, Vec<usize>)> {
    let v = g.vertex_count();
    let mut dist = vec![f64::INFINITY; v];
    let mut via = vec![usize::MAX; v];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(Item(0.0, s));
    while let Some(Item(d, x)) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        if x == t {
            break;
        }
        for h in TrivalentGraph::darts_at(x) {
            let e = g.edge_of(h);
            if e == skip {
                continue;
            }
            let y = TrivalentGraph::vertex_of(g.mate(h));
            let nd = d + w.get(e);
            if nd < dist[y] {
                dist[y] = nd;
                via[y] = e;
                heap.push(Item(nd, y));
            }
        }
    }
    if !dist[t].is_finite() {
        return None;
    }
    let mut edges = Vec::new();
    let mut x = t;
    while x != s {
        let e = via[x];
        edges.push(e);
        let (a, b) = g.endpoints(e);
        x = if a == x { b } else { a };
    }
    edges.reverse();
    Some((dist[t], edges))
}

/// Minimum total length of a simple cycle, with the edges of one such cycle.
///
/// A loop is a cycle on its own; otherwise a shortest cycle through edge
/// `uv` is `uv` plus a shortest `v`–`u` path avoiding it.
pub fn girth_length(g: &TrivalentGraph, w: &LengthAssignment) -> (f64, Vec<usize>) {
    let mut best = (f64::INFINITY, Vec::new());
    for e in 0..g.edge_count() {
        let (u, v) = g.endpoints(e);
        if u == v {
            if w.get(e) < best.0 {
                best = (w.get(e), vec![e]);
            }
            continue;
        }
        if let Some((d, mut rest)) = dijkstra(g, w, v, u, e) {
            if w.get(e) + d < best.0 {
                rest.insert(0, e);
                best = (w.get(e) + d, rest);
            }
        }
    }
    best
}
