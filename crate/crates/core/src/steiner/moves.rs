use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::optimize::{optimize, OptimizeOptions, MERGE_TOL};
use super::{CarrierConfig, SteinerError};
use crate::geom::{exp_map, exp_tangent, log_direction, tangent_norm, HPoint};

/// The best cut of a corner: two arms of length `c` meeting at angle
/// `gamma` are replaced by a stem of length `depth` along the bisector and
/// two arms of length `arm` from its end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerShortcut {
    /// `2c - (depth + 2·arm)`, never negative (depth 0 is no cut).
    pub gain: f64,
    pub depth: f64,
    pub arm: f64,
    /// Corner at the origin, arm ends, and the inserted vertex.
    pub corner: HPoint,
    pub ends: [HPoint; 2],
    pub inserted: HPoint,
}

fn arm_length(a: f64, c: f64, gamma: f64) -> f64 {
    let ch = a.cosh() * c.cosh() - a.sinh() * c.sinh() * (gamma / 2.0).cos();
    ch.max(1.0).acosh()
}

/// Optimal corner cut. The gain is concave in the depth, so a golden-section
/// search finds its maximum; it is positive exactly when `gamma < 2π/3`.
pub fn corner_shortcut(c_len: f64, gamma: f64) -> Result<CornerShortcut, SteinerError> {
    if !(c_len > 0.0 && c_len.is_finite()) {
        return Err(SteinerError::Invalid(format!("arm length must be positive, got {c_len}")));
    }
    if !(gamma > 0.0 && gamma < std::f64::consts::PI) {
        return Err(SteinerError::Invalid(format!("angle must lie in (0, π), got {gamma}")));
    }
    let gain = |a: f64| 2.0 * c_len - a - 2.0 * arm_length(a, c_len, gamma);
    let o = HPoint::origin();
    let h = gamma / 2.0;
    let ends = [h, -h].map(|s| exp_map(&o, &Vector3::new(s.cos(), s.sin(), 0.0), c_len));
    // The gain starts with slope 2cos(γ/2) - 1; by concavity a non-positive
    // slope means no cut helps, which rounding in the search could obscure.
    if 2.0 * h.cos() - 1.0 <= 0.0 {
        return Ok(CornerShortcut {
            gain: 0.0,
            depth: 0.0,
            arm: c_len,
            corner: o,
            ends: [ends[0].clone()?, ends[1].clone()?],
            inserted: o,
        });
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0, c_len);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (gain(x1), gain(x2));
    while hi - lo > 1e-13 * (1.0 + c_len) {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = gain(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = gain(x2);
        }
    }
    let mut depth = 0.5 * (lo + hi);
    let mut best = gain(depth);
    if best <= 0.0 {
        depth = 0.0;
        best = 0.0;
    }
    Ok(CornerShortcut {
        gain: best,
        depth,
        arm: arm_length(depth, c_len, gamma),
        corner: o,
        ends: [ends[0].clone()?, ends[1].clone()?],
        inserted: exp_map(&o, &Vector3::x(), depth)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairOutcome {
    pub config: CarrierConfig,
    /// False when there was no collapsed edge between free vertices.
    pub repaired: bool,
    pub edge: Option<usize>,
    pub length_before: f64,
    pub length_after: f64,
}

/// Separates two free vertices joined by a collapsed edge.
///
/// The merged vertex has four other edges; each of the three ways of
/// splitting them into two pairs is tried, with the two vertices pulled
/// slightly apart toward their pairs and the whole graph re-optimised. The
/// shortest result is kept, and never one longer than the input.
pub fn zero_edge_repair(
    c: &CarrierConfig,
    opts: &OptimizeOptions,
) -> Result<RepairOutcome, SteinerError> {
    let before = c.total_length();
    let noop = RepairOutcome {
        config: c.clone(),
        repaired: false,
        edge: None,
        length_before: before,
        length_after: before,
    };
    let Some(e) = (0..c.edges().len()).find(|&e| {
        let (u, v) = c.edges()[e];
        !c.is_pinned(u) && !c.is_pinned(v) && c.edge_length(e) < MERGE_TOL
    }) else {
        return Ok(noop);
    };
    let (u, v) = c.edges()[e];
    let mut slots = Vec::new();
    for owner in [u, v] {
        for (ei, x) in c.incident(owner) {
            if ei != e {
                slots.push((ei, x));
            }
        }
    }
    if slots.len() != 4 || slots.iter().any(|&(_, x)| x == u || x == v) {
        return Ok(noop);
    }
    let pairings = [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]];
    let mut best: (f64, CarrierConfig) = (before, c.clone());
    for p in pairings {
        let mut edges = c.edges().to_vec();
        for (k, &slot) in p.iter().enumerate() {
            let (ei, x) = slots[slot];
            edges[ei] = (if k < 2 { u } else { v }, x);
        }
        let mut pos = c.positions().to_vec();
        for (owner, pair) in [(u, [p[0], p[1]]), (v, [p[2], p[3]])] {
            let here = c.position(owner);
            let mut d = crate::geom::Tangent::zeros();
            for s in pair {
                if let Ok(t) = log_direction(&here, &c.position(slots[s].1)) {
                    d += t;
                }
            }
            let n = tangent_norm(&here, &d);
            if n > 1e-12 {
                pos[owner] = exp_tangent(&here, &(d / n), 1e-3)?;
            }
        }
        let trial = c.with_edges(edges).with_positions(pos);
        let result = match optimize(&trial, opts) {
            Ok(r) => r.config,
            Err(SteinerError::NotConverged { best, .. }) => *best,
            Err(err) => return Err(err),
        };
        let l = result.total_length();
        if l < best.0 {
            best = (l, result);
        }
    }
    Ok(RepairOutcome {
        length_after: best.0,
        config: best.1,
        repaired: true,
        edge: Some(e),
        length_before: before,
    })
}
