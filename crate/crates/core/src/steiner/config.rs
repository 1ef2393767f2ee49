use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SteinerError;
use crate::geom::{dist, exp_map, GeodesicSegment, HPoint};
use crate::graphs::TrivalentGraph;

/// A graph with a position in H³ for every vertex. Pinned vertices
/// (terminals) stay fixed; every free vertex is trivalent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct CarrierConfig {
    edges: Vec<(usize, usize)>,
    positions: Vec<HPoint>,
    pinned: Vec<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    edges: Vec<(usize, usize)>,
    positions: Vec<HPoint>,
    pinned: Vec<bool>,
}

impl TryFrom<RawConfig> for CarrierConfig {
    type Error = SteinerError;

    fn try_from(r: RawConfig) -> Result<Self, SteinerError> {
        Self::new(r.edges, r.positions, r.pinned)
    }
}

impl CarrierConfig {
    pub fn new(
        edges: Vec<(usize, usize)>,
        positions: Vec<HPoint>,
        pinned: Vec<bool>,
    ) -> Result<Self, SteinerError> {
        let v = positions.len();
        if pinned.len() != v {
            return Err(SteinerError::Invalid("one pinned flag per vertex".into()));
        }
        let mut deg = vec![0usize; v];
        for &(a, b) in &edges {
            if a >= v || b >= v {
                return Err(SteinerError::Invalid(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(SteinerError::Invalid(format!("loop at vertex {a}")));
            }
            deg[a] += 1;
            deg[b] += 1;
        }
        if let Some(x) = (0..v).find(|&x| !pinned[x] && deg[x] != 3) {
            return Err(SteinerError::Invalid(format!(
                "free vertex {x} has degree {}",
                deg[x]
            )));
        }
        Ok(Self {
            edges,
            positions,
            pinned,
        })
    }

    /// Realises a trivalent graph with no loops.
    pub fn from_graph(
        g: &TrivalentGraph,
        positions: Vec<HPoint>,
        pinned: Vec<bool>,
    ) -> Result<Self, SteinerError> {
        let edges = (0..g.edge_count()).map(|e| g.endpoints(e)).collect();
        Self::new(edges, positions, pinned)
    }

    /// Three pinned terminals joined to one free vertex placed at `start`.
    pub fn three_terminal(terminals: [HPoint; 3], start: HPoint) -> Self {
        let mut positions = terminals.to_vec();
        positions.push(start);
        Self {
            edges: vec![(3, 0), (3, 1), (3, 2)],
            positions,
            pinned: vec![true, true, true, false],
        }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn positions(&self) -> &[HPoint] {
        &self.positions
    }

    pub fn position(&self, v: usize) -> HPoint {
        self.positions[v]
    }

    pub fn is_pinned(&self, v: usize) -> bool {
        self.pinned[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn free_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| !self.pinned[v]).collect()
    }

    /// `(edge index, other endpoint)` for each edge at `v`.
    pub fn incident(&self, v: usize) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, &(a, b))| {
                if a == v {
                    Some((i, b))
                } else if b == v {
                    Some((i, a))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let (a, b) = self.edges[e];
        dist(&self.positions[a], &self.positions[b])
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        (0..self.edges.len()).map(|e| self.edge_length(e)).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.edge_lengths().iter().sum()
    }

    pub fn segments(&self) -> Vec<GeodesicSegment> {
        self.edges
            .iter()
            .map(|&(a, b)| GeodesicSegment::new(self.positions[a], self.positions[b]))
            .collect()
    }

    pub(crate) fn with_positions(&self, positions: Vec<HPoint>) -> Self {
        Self {
            edges: self.edges.clone(),
            positions,
            pinned: self.pinned.clone(),
        }
    }

    pub(crate) fn with_edges(&self, edges: Vec<(usize, usize)>) -> Self {
        Self {
            edges,
            positions: self.positions.clone(),
            pinned: self.pinned.clone(),
        }
    }
}

/// Lengths of the three stars centred at each terminal.
pub fn star_candidates(terminals: &[HPoint; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| (0..3).map(|j| dist(&terminals[i], &terminals[j])).sum())
}

/// Three terminals at random directions and distances in `[0.2, 2]` from the
/// origin, with the free vertex started at the origin.
pub fn random_three_terminal<R: Rng + ?Sized>(rng: &mut R) -> CarrierConfig {
    let o = HPoint::origin();
    let terminals = [0; 3].map(|_| {
        let u = loop {
            let v = nalgebra::Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let n: f64 = v.norm();
            if n > 1e-3 && n <= 1.0 {
                break v / n;
            }
        };
        exp_map(&o, &u, rng.gen_range(0.2..2.0)).expect("unit direction")
    });
    CarrierConfig::three_terminal(terminals, o)
}
