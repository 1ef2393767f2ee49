use serde::{Deserialize, Serialize};

use super::optimize::MERGE_TOL;
use super::{CarrierConfig, SteinerError};
use crate::geom::{log_direction, tangent_angle, tangent_to_ball_dir};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexReport {
    pub vertex: usize,
    /// Angles between the edge pairs (1,2), (1,3), (2,3), in radians.
    pub angles: [f64; 3],
    pub angle_sum: f64,
    /// Distance of the third unit direction from the plane of the first two.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YReport {
    pub vertices: Vec<VertexReport>,
}

impl YReport {
    /// Largest deviation of any angle from 120°, in degrees.
    pub fn max_angle_deviation_deg(&self) -> f64 {
        self.vertices
            .iter()
            .flat_map(|v| v.angles)
            .map(|a| (a.to_degrees() - 120.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.vertices.iter().map(|v| v.residual).fold(0.0, f64::max)
    }
}

/// Incidence angles and coplanarity at every free vertex.
pub fn y_report(c: &CarrierConfig) -> Result<YReport, SteinerError> {
    let mut vertices = Vec::new();
    for v in c.free_vertices() {
        let p = c.position(v);
        let inc = c.incident(v);
        let mut dirs = Vec::with_capacity(3);
        for &(e, u) in &inc {
            let length = c.edge_length(e);
            if length < MERGE_TOL {
                return Err(SteinerError::ZeroEdge {
                    vertex: v,
                    edge: e,
                    length,
                });
            }
            dirs.push(log_direction(&p, &c.position(u))?);
        }
        let angles = [(0, 1), (0, 2), (1, 2)].map(|(i, j)| tangent_angle(&p, &dirs[i], &dirs[j]));
        let b: Vec<_> = dirs.iter().map(|d| tangent_to_ball_dir(&p, d)).collect();
        let n = b[0].cross(&b[1]);
        let residual = if n.norm() < 1e-12 {
            // The first two directions are collinear; any plane through them
            // can contain the third.
            0.0
        } else {
            (b[2].dot(&n) / n.norm()).abs()
        };
        vertices.push(VertexReport {
            vertex: v,
            angles,
            angle_sum: angles.iter().sum(),
            residual,
        });
    }
    Ok(YReport { vertices })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub instance: usize,
    pub initial_length: f64,
    pub final_length: f64,
    /// `None` when a collapsed edge makes the angles undefined.
    pub max_angle_deviation_deg: Option<f64>,
    pub residual: Option<f64>,
}

/// CSV with columns `instance,initial_length,final_length,max_angle_deviation_deg,residual`.
pub fn csv_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::from("instance,initial_length,final_length,max_angle_deviation_deg,residual\n");
    let opt = |x: Option<f64>| x.map_or_else(|| "degenerate".to_string(), |v| format!("{v:.17e}"));
    for r in rows {
        out.push_str(&format!(
            "{},{:.17e},{:.17e},{},{}\n",
            r.instance,
            r.initial_length,
            r.final_length,
            opt(r.max_angle_deviation_deg),
            opt(r.residual)
        ));
    }
    out
}
