use serde::{Deserialize, Serialize};

use super::GraphError;

/// Number of edges of a graph of rank `n`.
pub fn edge_count(n: usize) -> Result<usize, GraphError> {
    if n <= 1 {
        return Err(GraphError::Rank {
            n,
            min: 2,
            max: usize::MAX,
        });
    }
    Ok(3 * (n - 1))
}

/// A connected trivalent multigraph as a half-edge (dart) structure.
///
/// Darts `3v, 3v+1, 3v+2` belong to vertex `v`; `mate` pairs darts into
/// edges. An edge is identified by its index in [`TrivalentGraph::edges`],
/// which lists `(lo, hi)` dart pairs in increasing order of `lo`; traversing
/// an edge forward goes from the vertex of `lo` to the vertex of `hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrivalentGraph {
    mate: Vec<usize>,
    edges: Vec<(usize, usize)>,
    edge_of: Vec<usize>,
}

impl TrivalentGraph {
    pub fn from_mate(mate: Vec<usize>) -> Result<Self, GraphError> {
        let d = mate.len();
        if d == 0 || d % 3 != 0 {
            return Err(GraphError::Structure(format!(
                "dart count {d} is not a positive multiple of 3"
            )));
        }
        for (h, &m) in mate.iter().enumerate() {
            if m >= d || m == h || mate[m] != h {
                return Err(GraphError::Structure(format!("dart {h} is not paired")));
            }
        }
        let mut edges = Vec::with_capacity(d / 2);
        let mut edge_of = vec![0; d];
        for (h, &m) in mate.iter().enumerate() {
            if h < m {
                edge_of[h] = edges.len();
                edge_of[m] = edges.len();
                edges.push((h, m));
            }
        }
        let g = Self {
            mate,
            edges,
            edge_of,
        };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    /// Builds a graph from vertex pairs, assigning darts in order.
    pub fn from_edges(vertices: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut next = vec![0usize; vertices];
        let mut mate = vec![usize::MAX; 3 * vertices];
        for &(u, v) in pairs {
            if u >= vertices || v >= vertices {
                return Err(GraphError::Structure(format!("edge ({u},{v}) out of range")));
            }
            let a = take_dart(&mut next, u)?;
            let b = take_dart(&mut next, v)?;
            mate[a] = b;
            mate[b] = a;
        }
        if next.iter().any(|&k| k != 3) {
            return Err(GraphError::Structure("some vertex is not trivalent".into()));
        }
        Self::from_mate(mate)
    }

    /// Two vertices joined by three edges.
    pub fn theta() -> Self {
        Self::from_edges(2, &[(0, 1), (0, 1), (0, 1)]).unwrap()
    }

    /// Two loops joined by a bar.
    pub fn dumbbell() -> Self {
        Self::from_edges(2, &[(0, 0), (0, 1), (1, 1)]).unwrap()
    }

    pub fn mate(&self, dart: usize) -> usize {
        self.mate[dart]
    }

    pub fn mates(&self) -> &[usize] {
        &self.mate
    }

    pub fn dart_count(&self) -> usize {
        self.mate.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.mate.len() / 3
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `1 - χ`.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64
    }

    pub fn vertex_of(dart: usize) -> usize {
        dart / 3
    }

    pub fn darts_at(v: usize) -> [usize; 3] {
        [3 * v, 3 * v + 1, 3 * v + 2]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_of(&self, dart: usize) -> usize {
        self.edge_of[dart]
    }

    /// Endpoint vertices of edge `e` in its forward orientation.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let (lo, hi) = self.edges[e];
        (lo / 3, hi / 3)
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (u, v) = self.endpoints(e);
        u == v
    }

    /// Symmetric multiplicity matrix; diagonal entries count loops.
    pub fn multiplicity_matrix(&self) -> Vec<Vec<u8>> {
        let v = self.vertex_count();
        let mut m = vec![vec![0u8; v]; v];
        for e in 0..self.edge_count() {
            let (a, b) = self.endpoints(e);
            m[a][b] += 1;
            if a != b {
                m[b][a] += 1;
            }
        }
        m
    }

    /// Builds the graph with the given multiplicity matrix.
    pub fn from_matrix(m: &[Vec<u8>]) -> Result<Self, GraphError> {
        let mut pairs = Vec::new();
        for i in 0..m.len() {
            for j in i..m.len() {
                for _ in 0..m[i][j] {
                    pairs.push((i, j));
                }
            }
        }
        Self::from_edges(m.len(), &pairs)
    }

    fn is_connected(&self) -> bool {
        let v = self.vertex_count();
        let mut seen = vec![false; v];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for d in Self::darts_at(x) {
                let y = self.mate[d] / 3;
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

fn take_dart(next: &mut [usize], v: usize) -> Result<usize, GraphError> {
    if next[v] >= 3 {
        return Err(GraphError::Structure(format!("vertex {v} has more than 3 half-edges")));
    }
    next[v] += 1;
    Ok(3 * v + next[v] - 1)
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    half_edges: usize,
    involution: Vec<usize>,
    vertices: Vec<[usize; 3]>,
}

impl Serialize for TrivalentGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphRepr {
            half_edges: self.dart_count(),
            involution: self.mate.clone(),
            vertices: (0..self.vertex_count()).map(Self::darts_at).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrivalentGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = GraphRepr::deserialize(d)?;
        if r.involution.len() != r.half_edges {
            return Err(serde::de::Error::custom("involution length differs from half_edges"));
        }
        let expected: Vec<[usize; 3]> = (0..r.half_edges / 3).map(Self::darts_at).collect();
        if r.vertices != expected {
            return Err(serde::de::Error::custom(
                "vertices must group half-edges as [3v, 3v+1, 3v+2]",
            ));
        }
        Self::from_mate(r.involution).map_err(serde::de::Error::custom)
    }
}
