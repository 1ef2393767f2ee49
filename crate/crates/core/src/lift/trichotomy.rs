use serde::{Deserialize, Serialize};

use super::{
    escapes_horoball, is_embedded, prop42_select, short_cut, Containment, EscapeWitness, Geodesic120Path, LiftError,
    Prop42Case, ShortCutCertificate,
};
use crate::bounds::ConstantSchedule;
use crate::geom::{dist, HPoint};

/// A path together with the indices of its two long edges `A` and `B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrichotomyInput {
    pub path: Geodesic120Path,
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Trichotomy {
    Escape {
        selection: Prop42Case,
        witness: EscapeWitness,
    },
    ShortCut {
        selection: Prop42Case,
        certificate: ShortCutCertificate,
    },
}

impl Trichotomy {
    /// Re-validates the witness or certificate against the path.
    pub fn verify(&self, path: &Geodesic120Path) -> Result<(), String> {
        match self {
            Trichotomy::Escape { witness, .. } => witness.verify(path),
            Trichotomy::ShortCut { certificate, .. } => {
                let (Some(i), Some(j)) = (certificate.edge1, certificate.edge2) else {
                    return Err("certificate does not name its edges".into());
                };
                if i >= path.edge_count() || j >= path.edge_count() {
                    return Err(format!("edges {i}, {j} out of range"));
                }
                certificate.verify_on(&path.segment(i).reversed(), path.segment(j))
            }
        }
    }
}

fn hyp<T>(msg: String) -> Result<T, LiftError> {
    Err(LiftError::Hypothesis(msg))
}

/// Either a point of the path outside 𝒲 or a short-cut arc between two long
/// edges on opposite sides of the origin.
///
/// Requirements: `a < b`; the origin is a vertex strictly after edge `a`
/// and no later than the start of edge `b`; the `k = b - a - 1` edges
/// between them are at most `L(k)` long while `A` and `B` are longer; the
/// path is embedded.
///
/// Edge lengths are read outward from the origin: `x_i` is the `i`-th edge
/// before the origin (so `x_n = |A|`) and `y_i` the `i`-th edge after it
/// (`y_m = |B|`). The selection then either names edges `E₁ = x_r`,
/// `E₂ = y_s` to short-cut, or an initial edge long enough to leave 𝒲.
/// Escape is always confirmed geometrically, never inferred.
pub fn trichotomy(
    p: &Geodesic120Path,
    a: usize,
    b: usize,
    schedule: &ConstantSchedule,
) -> Result<Trichotomy, LiftError> {
    let edges = p.edge_count();
    if !(a < b && b < edges) {
        return hyp(format!("need a < b < {edges} (got a = {a}, b = {b})"));
    }
    let k = b - a - 1;
    if k > schedule.kmax() || !schedule.l(k).is_finite() {
        return hyp(format!("schedule does not reach L({k})"));
    }
    let lk = schedule.l(k);
    let o = HPoint::origin();
    let Some(j) = (a + 1..=b).find(|&v| p.vertex(v).is_some_and(|q| dist(&q, &o) < 1e-9)) else {
        return hyp("the origin is not a vertex between A and B".into());
    };
    let len = p.lengths();
    if !(len[a] > lk && len[b] > lk) {
        return hyp(format!("|A| = {}, |B| = {} must exceed L({k}) = {lk}", len[a], len[b]));
    }
    if let Some(i) = (a + 1..b).find(|&i| len[i] > lk) {
        return hyp(format!("window edge {i} has length {} > L({k}) = {lk}", len[i]));
    }
    let emb = is_embedded(p, 1e-9);
    if !emb.embedded {
        return hyp(format!("path is not embedded (edges {:?})", emb.offending));
    }

    let x: Vec<f64> = (a..j).rev().map(|i| len[i]).collect();
    let y: Vec<f64> = (j..=b).map(|i| len[i]).collect();
    let l = &schedule.values()[..=k];
    let selection = prop42_select(&x, &y, l)?;

    if let Prop42Case::Case1 { r, s } = selection {
        let (i1, i2) = (j - 1 - r, j + s);
        let q = r + s;
        let delta = q as f64 * l[q - 1];
        let ea = p.segment(i1).reversed();
        let eb = *p.segment(i2);
        let (e1, e2) = (ea.start()?, eb.start()?);
        if dist(&e1, &o) > delta || dist(&e2, &o) > delta {
            return Err(LiftError::Internal(format!(
                "inner endpoints of edges {i1}, {i2} lie outside B(0, {delta})"
            )));
        }
        if ea.in_horoball() && eb.in_horoball() {
            let mut certificate = short_cut(&ea, &eb, delta, schedule.delta)?;
            certificate.edge1 = Some(i1);
            certificate.edge2 = Some(i2);
            let out = Trichotomy::ShortCut { selection, certificate };
            out.verify(p).map_err(LiftError::Internal)?;
            return Ok(out);
        }
    }

    match escapes_horoball(p)? {
        Containment::Escape(witness) => {
            let out = Trichotomy::Escape { selection, witness };
            out.verify(p).map_err(LiftError::Internal)?;
            Ok(out)
        }
        Containment::Contained => Err(LiftError::Internal(format!(
            "selection {selection:?} did not lead to a short cut, yet the path stays in the horoball"
        ))),
    }
}
