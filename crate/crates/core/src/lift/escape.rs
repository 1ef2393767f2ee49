use serde::{Deserialize, Serialize};

use super::{Geodesic120Path, LiftError};
use crate::geom::{dist, horoball_contains, GeodesicSegment, HPoint, HoroClass, BOUNDARY_BAND};

/// A point of a path strictly outside the canonical horoball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeWitness {
    pub edge: usize,
    /// Distance from the start of the edge.
    pub t: f64,
    pub point: HPoint,
    pub margin: f64,
}

impl EscapeWitness {
    /// Re-checks the witness against the path: the point is classified as
    /// outside and lies on the named edge.
    pub fn verify(&self, path: &Geodesic120Path) -> Result<(), String> {
        let test = horoball_contains(&self.point);
        if test.class != HoroClass::Outside {
            return Err(format!("witness point is not outside (margin {:e})", test.margin));
        }
        let seg = path
            .segments()
            .get(self.edge)
            .ok_or_else(|| format!("edge {} does not exist", self.edge))?;
        if !(self.t >= 0.0 && self.t <= seg.length()) {
            return Err(format!("parameter {} outside [0, {}]", self.t, seg.length()));
        }
        // The point is recomputed from its parameter; the allowance covers
        // rounding of the parameter itself on very long edges.
        let on_edge = seg.point_at(self.t).map_err(|e| e.to_string())?;
        let d = dist(&on_edge, &self.point);
        let tol = 1e-9 + 1e-15 * (seg.interval().0.abs() + self.t);
        if !(d <= tol) {
            return Err(format!("witness point is {d:e} away from its parameter on edge {}", self.edge));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Containment {
    Escape(EscapeWitness),
    Contained,
}

impl Containment {
    pub fn witness(&self) -> Option<&EscapeWitness> {
        match self {
            Containment::Escape(w) => Some(w),
            Containment::Contained => None,
        }
    }
}

/// A point of the path outside 𝒲 on the lowest-numbered edge that leaves.
///
/// Along an edge the horoball height `A eᵗ + B e⁻ᵗ` is convex, so the inside
/// part is a single parameter interval whose ends are closed-form roots.
/// Within the edge the witness is the outside point nearest the edge's base
/// (the endpoint nearer the anchor): either the base itself or the first
/// point past a root whose margin clears the boundary band. Far points carry
/// position errors growing like `eps·eʳ`, so this keeps witnesses checkable.
pub fn escapes_horoball(p: &Geodesic120Path) -> Result<Containment, LiftError> {
    let anchor = horoball_contains(&p.anchor().position());
    if anchor.class == HoroClass::Outside {
        return Err(LiftError::AnchorOutside { margin: anchor.margin });
    }
    for (i, seg) in p.segments().iter().enumerate() {
        if let Some((t, point, margin)) = first_outside(seg) {
            return Ok(Containment::Escape(EscapeWitness {
                edge: i,
                t: t - seg.interval().0,
                point,
                margin,
            }));
        }
    }
    Ok(Containment::Contained)
}

/// Parameter range on which the height is at most 1, or `None` if empty.
fn inside_interval(a: f64, b: f64) -> Option<(f64, f64)> {
    match (a > 0.0, b > 0.0) {
        (false, false) => Some((f64::NEG_INFINITY, f64::INFINITY)),
        (false, true) => Some((b.ln(), f64::INFINITY)),
        (true, false) => Some((f64::NEG_INFINITY, -a.ln())),
        (true, true) => {
            let disc = 1.0 - 4.0 * a * b;
            if disc < 0.0 {
                return None;
            }
            let r = 1.0 + disc.sqrt();
            Some(((2.0 * b / r).ln(), (r / (2.0 * a)).ln()))
        }
    }
}

fn outside(seg: &GeodesicSegment, t: f64) -> Option<Option<(HPoint, f64)>> {
    let p = seg.at(t).ok()?;
    let m = horoball_contains(&p).margin;
    Some((m > BOUNDARY_BAND).then_some((p, m)))
}

fn first_outside(seg: &GeodesicSegment) -> Option<(f64, HPoint, f64)> {
    let (t0, t1) = seg.interval();
    let prof = seg.busemann_profile();
    let Some((lo, hi)) = inside_interval(prof.a, prof.b) else {
        // Entirely outside: the base itself is a witness.
        let t = 0.0f64.clamp(t0, t1);
        return outside(seg, t).flatten().map(|(p, m)| (t, p, m));
    };
    // Outside parts are [t0, lo) and (hi, t1]; try the one nearer the base
    // first, since points near the base are the most accurately stored.
    let before = (t0 < lo).then(|| {
        if lo.min(t1) <= 0.0 {
            let t = 0.0f64.clamp(t0, lo.min(t1));
            match outside(seg, t) {
                Some(Some((p, m))) if t < lo => Some((t, p, m)),
                _ => probe(seg, lo.min(t1), t0),
            }
        } else {
            probe(seg, lo.min(t1), t0)
        }
    });
    let after = (t1 > hi).then(|| {
        if hi.max(t0) >= 0.0 {
            let t = 0.0f64.clamp(hi.max(t0), t1);
            match outside(seg, t) {
                Some(Some((p, m))) if t > hi => Some((t, p, m)),
                _ => probe(seg, hi.max(t0), t1),
            }
        } else {
            probe(seg, hi.max(t0), t1)
        }
    });
    let dist0 = |h: &Option<(f64, HPoint, f64)>| h.map_or(f64::INFINITY, |(t, _, _)| t.abs());
    match (before.flatten(), after.flatten()) {
        (Some(x), Some(y)) => Some(if dist0(&Some(x)) <= dist0(&Some(y)) { x } else { y }),
        (x, y) => x.or(y),
    }
}

/// Smallest step from the root `crossing` toward `end` that reaches a point
/// with margin above the band, refined by bisection.
fn probe(seg: &GeodesicSegment, crossing: f64, end: f64) -> Option<(f64, HPoint, f64)> {
    let dir = (end - crossing).signum();
    let span = (end - crossing).abs();
    let mut step = 1e-12 * (1.0 + crossing.abs());
    let mut inner = 0.0;
    let mut found;
    loop {
        let s = step.min(span);
        match outside(seg, crossing + dir * s)? {
            Some(_) => {
                found = s;
                break;
            }
            None => inner = s,
        }
        if s >= span {
            return None;
        }
        step *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (inner + found);
        if mid <= inner || mid >= found {
            break;
        }
        match outside(seg, crossing + dir * mid) {
            Some(Some(_)) => found = mid,
            _ => inner = mid,
        }
    }
    let t = crossing + dir * found;
    let (p, m) = outside(seg, t)??;
    Some((t, p, m))
}
