use serde::{Deserialize, Serialize};

use super::{CarrierConfig, SteinerError};
use nalgebra::{Matrix3, Vector3};

use crate::geom::{
    ball_dir_to_tangent, exp_tangent, log_direction, tangent_norm, tangent_to_ball_dir, Tangent,
};

/// Edges shorter than this count as collapsed.
pub const MERGE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    /// Stationarity target at every free vertex.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iter: 2_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimized {
    pub config: CarrierConfig,
    pub iterations: usize,
    pub initial_length: f64,
    pub final_length: f64,
    /// Largest stationarity measure over free vertices at the end.
    pub measure: f64,
}

/// Sum of unit directions toward the neighbours of `v` along edges that have
/// not collapsed, and the number of collapsed edges at `v`.
fn descent_direction(c: &CarrierConfig, v: usize) -> (Tangent, usize) {
    let p = c.position(v);
    let mut sum = Tangent::zeros();
    let mut zero = 0;
    for (e, u) in c.incident(v) {
        if c.edge_length(e) < MERGE_TOL {
            zero += 1;
            continue;
        }
        match log_direction(&p, &c.position(u)) {
            Ok(d) => sum += d,
            Err(_) => zero += 1,
        }
    }
    (sum, zero)
}

/// First-order measure at a free vertex: the norm of the length gradient
/// over the intact edges, less one per collapsed edge (each of which
/// contributes a unit ball to the subdifferential).
pub fn stationarity(c: &CarrierConfig, v: usize) -> f64 {
    let (d, zero) = descent_direction(c, v);
    (tangent_norm(&c.position(v), &d) - zero as f64).max(0.0)
}

fn max_measure(c: &CarrierConfig) -> f64 {
    c.free_vertices()
        .into_iter()
        .map(|v| stationarity(c, v))
        .fold(0.0, f64::max)
}

/// Moves one free vertex onto a neighbour if that shortens the graph; this
/// reaches degenerate optima where the length is not differentiable.
fn try_snap(c: &CarrierConfig) -> Option<CarrierConfig> {
    let base = c.total_length();
    let mut best: Option<(f64, CarrierConfig)> = None;
    for v in c.free_vertices() {
        for (e, u) in c.incident(v) {
            if c.edge_length(e) < MERGE_TOL {
                continue;
            }
            let mut pos = c.positions().to_vec();
            pos[v] = c.position(u);
            let trial = c.with_positions(pos);
            let l = trial.total_length();
            if l < base - 1e-15 && best.as_ref().map_or(true, |(bl, _)| l < *bl) {
                best = Some((l, trial));
            }
        }
    }
    best.map(|(_, c)| c)
}

/// Newton direction at a free vertex in its ball chart: the sum `D` of unit
/// directions toward intact neighbours, preconditioned by the Hessian
/// `Σ coth(dᵢ)(I - uᵢuᵢᵀ)` of the summed distances. Falls back to `D` when
/// the Hessian is singular (all neighbours on one geodesic) or an edge has
/// collapsed, where the length is not smooth. Also returns the predicted
/// first-order decrease per unit step.
fn newton_step(c: &CarrierConfig, v: usize) -> (Vector3<f64>, f64) {
    let p = c.position(v);
    let mut d = Vector3::zeros();
    let mut h = Matrix3::zeros();
    let mut zero = 0;
    for (e, u) in c.incident(v) {
        let len = c.edge_length(e);
        if len < MERGE_TOL {
            zero += 1;
            continue;
        }
        let Ok(t) = log_direction(&p, &c.position(u)) else {
            continue;
        };
        let b = tangent_to_ball_dir(&p, &t);
        d += b;
        h += (Matrix3::identity() - b * b.transpose()) / len.tanh();
    }
    if zero > 0 {
        let n = d.norm();
        return (d, n * (n - zero as f64));
    }
    match h.try_inverse() {
        Some(hi) if hi.norm() < 1e8 && (hi * d).dot(&d) > 0.0 => (hi * d, (hi * d).dot(&d)),
        _ => (d, d.norm_squared()),
    }
}

/// Damped Newton iteration on the total length over free vertex positions,
/// one vertex block at a time in the Hessian, with backtracking along
/// geodesics. Accepted iterates never increase the length by more than a few
/// ulps.
pub fn optimize(c: &CarrierConfig, opts: &OptimizeOptions) -> Result<Optimized, SteinerError> {
    if !(opts.tol > 0.0) {
        return Err(SteinerError::BadTolerance(opts.tol));
    }
    let free = c.free_vertices();
    if free.is_empty() {
        return Err(SteinerError::NothingToOptimize);
    }
    let initial_length = c.total_length();
    let mut cur = c.clone();
    let mut len = initial_length;
    let done = |cur: CarrierConfig, len: f64, it: usize, measure: f64| Optimized {
        final_length: len,
        config: cur,
        iterations: it,
        initial_length,
        measure,
    };
    for it in 0..opts.max_iter {
        let measure = max_measure(&cur);
        if measure < opts.tol {
            return Ok(done(cur, len, it, measure));
        }
        let mut steps = Vec::with_capacity(free.len());
        let mut predicted = 0.0;
        for &v in &free {
            let (st, pr) = newton_step(&cur, v);
            if pr > 0.0 {
                steps.push((v, st));
                predicted += pr;
            }
        }
        let mut accepted = false;
        let mut s = 1.0;
        while s > 1e-12 {
            let mut pos = cur.positions().to_vec();
            for (v, st) in &steps {
                let n = st.norm();
                if n > 0.0 {
                    let dir = ball_dir_to_tangent(&pos[*v], &(st / n));
                    pos[*v] = exp_tangent(&pos[*v], &dir, (s * n).min(5.0))?;
                }
            }
            let trial = cur.with_positions(pos);
            let tl = trial.total_length();
            // Near the optimum the predicted decrease drops below the
            // rounding of the length; then accept a full step that improves
            // stationarity and changes the length only at rounding level.
            let sufficient = tl <= len - 1e-4 * s * predicted.max(0.0);
            let rounding = s == 1.0
                && tl <= len + 4.0 * f64::EPSILON * len
                && max_measure(&trial) < measure;
            if sufficient || rounding {
                cur = trial;
                len = tl;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if let Some(snapped) = try_snap(&cur) {
            let sl = snapped.total_length();
            if sl < len {
                cur = snapped;
                len = sl;
                accepted = true;
            }
        }
        if !accepted {
            return Err(SteinerError::NotConverged {
                iterations: it,
                measure,
                best: Box::new(cur),
            });
        }
    }
    let measure = max_measure(&cur);
    if measure < opts.tol {
        return Ok(done(cur, len, opts.max_iter, measure));
    }
    Err(SteinerError::NotConverged {
        iterations: opts.max_iter,
        measure,
        best: Box::new(cur),
    })
}
