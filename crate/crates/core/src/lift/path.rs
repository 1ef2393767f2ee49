use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::LiftError;
use crate::geom::{chain_frame, segment_distance, tangent_angle, Frame, GeodesicSegment, HPoint};

/// Angle between consecutive edges at every interior vertex.
pub const BEND: f64 = 2.0 * PI / 3.0;

/// A piecewise geodesic path whose consecutive edges meet at 120°.
///
/// The path is pinned by a frame at one of its vertices (the anchor vertex).
/// Edges are realised outward from the anchor and each edge is based at its
/// endpoint nearer the anchor, so the two outermost edges may be arbitrarily
/// long. Their far endpoints are then unrepresentable and recorded as `None`.
///
/// `dihedrals[v - 1]` selects the turning plane at interior vertex `v`. The
/// anchor frame is the outgoing frame at its vertex (incoming at the last).
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic120Path {
    anchor: Frame,
    anchor_vertex: usize,
    lengths: Vec<f64>,
    dihedrals: Vec<f64>,
    vertices: Vec<Option<HPoint>>,
    segments: Vec<GeodesicSegment>,
}

/// Path anchored at its first vertex.
pub fn build_path(lengths: &[f64], dihedrals: &[f64], anchor: Frame) -> Result<Geodesic120Path, LiftError> {
    build_path_at(lengths, dihedrals, anchor, 0)
}

/// Path whose vertex `anchor_vertex` carries the frame `anchor`.
pub fn build_path_at(
    lengths: &[f64],
    dihedrals: &[f64],
    anchor: Frame,
    anchor_vertex: usize,
) -> Result<Geodesic120Path, LiftError> {
    let k = lengths.len();
    if let Some(l) = lengths.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(LiftError::InvalidPath(format!("edge lengths must be positive and finite (got {l})")));
    }
    if dihedrals.len() != k.saturating_sub(1) {
        return Err(LiftError::InvalidPath(format!(
            "{k} edges need {} dihedrals (got {})",
            k.saturating_sub(1),
            dihedrals.len()
        )));
    }
    if dihedrals.iter().any(|d| !d.is_finite()) {
        return Err(LiftError::InvalidPath("non-finite dihedral".into()));
    }
    if anchor_vertex > k {
        return Err(LiftError::InvalidPath(format!("anchor vertex {anchor_vertex} beyond {k} edges")));
    }
    let j = anchor_vertex;
    let mut vertices = vec![None; k + 1];
    let mut segments = vec![None; k];
    vertices[j] = Some(anchor.position());

    let mut f = anchor;
    for i in j..k {
        let seg = GeodesicSegment::from_ray(f.position(), f.forward(), lengths[i])?;
        if i + 1 < k {
            f = chain_frame(&f, lengths[i], BEND, dihedrals[i])?;
            vertices[i + 1] = Some(f.position());
        } else {
            vertices[k] = seg.end().ok();
        }
        segments[i] = Some(seg);
    }

    let mut f = anchor;
    for i in (0..j).rev() {
        let incoming = if i + 1 < k { f.rotate(-(PI - BEND), dihedrals[i]) } else { f };
        let seg = GeodesicSegment::ending_at(incoming.position(), incoming.forward(), lengths[i])?;
        if i > 0 {
            f = incoming.transport(-lengths[i])?;
            vertices[i] = Some(f.position());
        } else {
            vertices[0] = seg.start().ok();
        }
        segments[i] = Some(seg);
    }

    Ok(Geodesic120Path {
        anchor,
        anchor_vertex,
        lengths: lengths.to_vec(),
        dihedrals: dihedrals.to_vec(),
        vertices,
        segments: segments.into_iter().map(|s| s.expect("every edge realised")).collect(),
    })
}

impl Geodesic120Path {
    pub fn anchor(&self) -> &Frame {
        &self.anchor
    }

    pub fn anchor_vertex(&self) -> usize {
        self.anchor_vertex
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn dihedrals(&self) -> &[f64] {
        &self.dihedrals
    }

    pub fn edge_count(&self) -> usize {
        self.lengths.len()
    }

    /// Vertices `v₀ … v_k`; `None` marks an endpoint too far out to store.
    pub fn vertices(&self) -> &[Option<HPoint>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Option<HPoint> {
        self.vertices.get(i).copied().flatten()
    }

    /// Edges in path order; edge `i` runs from `vᵢ` to `vᵢ₊₁`.
    pub fn segments(&self) -> &[GeodesicSegment] {
        &self.segments
    }

    pub fn segment(&self, i: usize) -> &GeodesicSegment {
        &self.segments[i]
    }

    /// Angle between the two edges at each interior vertex `1 … k-1`,
    /// measured from the tangents so that it is defined even when the
    /// neighbouring vertices are not representable.
    pub fn joint_angles(&self) -> Vec<f64> {
        (1..self.edge_count())
            .map(|v| {
                let prev = &self.segments[v - 1];
                let next = &self.segments[v];
                let back = -prev.velocity(prev.interval().1);
                let fwd = next.velocity(next.interval().0);
                let p = self.vertices[v].expect("interior vertices are representable");
                tangent_angle(&p, &back, &fwd)
            })
            .collect()
    }

    /// Smallest singular value of the normalised lifted vertex matrix
    /// relative to the largest: zero exactly when the representable vertices
    /// lie on one hyperbolic plane.
    pub fn plane_residual(&self) -> f64 {
        let rows: Vec<_> = self
            .vertices
            .iter()
            .flatten()
            .map(|v| {
                let l = v.lift();
                l / l.norm()
            })
            .collect();
        if rows.len() < 4 {
            return 0.0;
        }
        let m = DMatrix::from_fn(rows.len(), 4, |i, j| rows[i][j]);
        let sv = m.singular_values();
        sv.min() / sv.max()
    }

    /// Sub-path between two vertices.
    pub fn window(&self, start: usize, end: usize) -> Result<SegmentWindow, LiftError> {
        if start > end || end > self.edge_count() {
            return Err(LiftError::InvalidPath(format!(
                "window [{start}, {end}] outside a path with {} edges",
                self.edge_count()
            )));
        }
        Ok(SegmentWindow { start, end })
    }
}

/// The part of a path between vertices `start` and `end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentWindow {
    pub start: usize,
    pub end: usize,
}

impl SegmentWindow {
    pub fn edges(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }

    pub fn edge_count(&self) -> usize {
        self.end - self.start
    }
}

/// Result of the embeddedness check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub embedded: bool,
    /// First non-adjacent edge pair (in lexicographic order) closer than the
    /// tolerance.
    pub offending: Option<(usize, usize)>,
    /// Smallest distance between non-adjacent edges; infinite if there are
    /// no such pairs.
    pub min_distance: f64,
}

/// Whether all non-adjacent edge pairs are farther apart than `tol`.
pub fn is_embedded(p: &Geodesic120Path, tol: f64) -> Embedding {
    let segs = p.segments();
    let mut offending = None;
    let mut min_distance = f64::INFINITY;
    for i in 0..segs.len() {
        for j in i + 2..segs.len() {
            // Base the search on whichever edge is nearer the anchor.
            let d = if segs[i].base().radius() <= segs[j].base().radius() {
                segment_distance(&segs[i], &segs[j])
            } else {
                segment_distance(&segs[j], &segs[i])
            };
            if d <= tol && offending.is_none() {
                offending = Some((i, j));
            }
            min_distance = min_distance.min(d);
        }
    }
    Embedding {
        embedded: offending.is_none(),
        offending,
        min_distance,
    }
}

#[derive(Serialize)]
struct PathRepr<'a> {
    anchor: &'a Frame,
    anchor_vertex: usize,
    lengths: &'a [f64],
    dihedrals: &'a [f64],
    vertices: &'a [Option<HPoint>],
    segments: &'a [GeodesicSegment],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPath {
    anchor: Frame,
    #[serde(default)]
    anchor_vertex: usize,
    lengths: Vec<f64>,
    dihedrals: Vec<f64>,
    // Derived data is accepted but rebuilt from the parameters.
    #[serde(default)]
    #[allow(dead_code)]
    vertices: Option<serde::de::IgnoredAny>,
    #[serde(default)]
    #[allow(dead_code)]
    segments: Option<serde::de::IgnoredAny>,
}

impl Serialize for Geodesic120Path {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PathRepr {
            anchor: &self.anchor,
            anchor_vertex: self.anchor_vertex,
            lengths: &self.lengths,
            dihedrals: &self.dihedrals,
            vertices: &self.vertices,
            segments: &self.segments,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Geodesic120Path {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawPath::deserialize(d)?;
        build_path_at(&raw.lengths, &raw.dihedrals, raw.anchor, raw.anchor_vertex).map_err(serde::de::Error::custom)
    }
}
