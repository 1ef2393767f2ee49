use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::LiftError;
use crate::bounds::lbar;
use crate::geom::{dist, exp_map, GeodesicSegment, HPoint};

/// Short-cut arc `[e, f]` between two long edges, with every quantity needed
/// to re-check it from the stored points alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortCutCertificate {
    /// Path indices of the two edges, when the certificate came from a path.
    pub edge1: Option<usize>,
    pub edge2: Option<usize>,
    /// Inner endpoints of the two edges.
    pub e1: HPoint,
    pub e2: HPoint,
    pub e: HPoint,
    pub f: HPoint,
    pub d_e_e1: f64,
    pub d_f_e2: f64,
    pub d_e_f: f64,
    /// `min(d(e, e₁), d(f, e₂)) - d(e, f)`; exceeds `big_delta`.
    pub gain: f64,
    pub delta: f64,
    pub big_delta: f64,
    /// Threshold `L̄(δ)`; both cut-off pieces are shorter than a third of it.
    pub lbar: f64,
}

impl ShortCutCertificate {
    /// Recomputes the three distances from the stored points and checks the
    /// four inequalities and the gain.
    pub fn verify(&self) -> Result<(), String> {
        let de = dist(&self.e, &self.e1);
        let df = dist(&self.f, &self.e2);
        let def = dist(&self.e, &self.f);
        for (name, stored, fresh) in [("d(e,e1)", self.d_e_e1, de), ("d(f,e2)", self.d_f_e2, df), ("d(e,f)", self.d_e_f, def)] {
            if (stored - fresh).abs() > 1e-9 * (1.0 + fresh) {
                return Err(format!("{name} stored as {stored}, recomputed {fresh}"));
            }
        }
        if !(def < de - self.big_delta) {
            return Err(format!("d(e,f) = {def} is not below d(e,e1) - Δ = {}", de - self.big_delta));
        }
        if !(def < df - self.big_delta) {
            return Err(format!("d(e,f) = {def} is not below d(f,e2) - Δ = {}", df - self.big_delta));
        }
        if !(de < self.lbar / 3.0 && df < self.lbar / 3.0) {
            return Err(format!("cut-off pieces {de}, {df} not below L̄/3 = {}", self.lbar / 3.0));
        }
        let gain = de.min(df) - def;
        if (gain - self.gain).abs() > 1e-9 * (1.0 + gain) || !(gain > self.big_delta) {
            return Err(format!("gain stored as {}, recomputed {gain}", self.gain));
        }
        Ok(())
    }

    /// [`Self::verify`] plus membership of `e`, `f`, `e₁`, `e₂` in the
    /// given edges.
    pub fn verify_on(&self, a: &GeodesicSegment, b: &GeodesicSegment) -> Result<(), String> {
        self.verify()?;
        for (name, p, seg) in [("e", &self.e, a), ("e1", &self.e1, a), ("f", &self.f, b), ("e2", &self.e2, b)] {
            let d = seg.distance_to_point(p);
            if d > 1e-9 {
                return Err(format!("{name} is {d:e} away from its edge"));
            }
        }
        Ok(())
    }
}

/// Unit ball-chart direction from the origin toward the far end of `s`,
/// computed without forming the (possibly unrepresentable) endpoint.
fn far_direction(s: &GeodesicSegment) -> Option<Vector3<f64>> {
    let t1 = s.interval().1;
    let b = s.base().lift();
    let d = s.dir();
    let th = t1.tanh();
    let v = Vector3::new(b[1] + th * d[1], b[2] + th * d[2], b[3] + th * d[3]);
    let n = v.norm();
    (n > 0.0 && n.is_finite()).then(|| v / n)
}

/// Short-cut arc between edges `A` and `B`, each given as a segment starting
/// at its inner endpoint.
///
/// Points `x`, `y` are placed on the geodesics from the origin toward the far
/// endpoints at distance `δ' + 5Δ`, where `δ'` is the larger distance of the
/// two starts from the origin (at most `δ`). Then `e`, `f` are the nearest
/// points of `A`, `B` to `x`, `y`.
pub fn short_cut(
    a: &GeodesicSegment,
    b: &GeodesicSegment,
    delta: f64,
    big_delta: f64,
) -> Result<ShortCutCertificate, LiftError> {
    if !(delta >= 0.0 && delta.is_finite() && big_delta > 0.0 && big_delta.is_finite()) {
        return Err(LiftError::Hypothesis(format!("need δ ≥ 0 and Δ > 0 (got {delta}, {big_delta})")));
    }
    let o = HPoint::origin();
    let e1 = a.start()?;
    let e2 = b.start()?;
    let (ra, rb) = (dist(&o, &e1), dist(&o, &e2));
    if ra > delta + 1e-9 || rb > delta + 1e-9 {
        return Err(LiftError::Hypothesis(format!(
            "starts at distances {ra}, {rb} from the origin exceed δ = {delta}"
        )));
    }
    if !a.in_horoball() || !b.in_horoball() {
        return Err(LiftError::Hypothesis("edges must lie in the horoball".into()));
    }
    let lb = lbar(delta, big_delta)?;
    if a.length() < lb || b.length() < lb {
        return Err(LiftError::Hypothesis(format!(
            "lengths {}, {} below L̄(δ) = {lb}",
            a.length(),
            b.length()
        )));
    }
    let rho = ra.max(rb) + 5.0 * big_delta;
    let (ua, ub) = match (far_direction(a), far_direction(b)) {
        (Some(ua), Some(ub)) => (ua, ub),
        _ => return Err(LiftError::Hypothesis("far endpoint direction undefined".into())),
    };
    let x = exp_map(&o, &ua, rho)?;
    let y = exp_map(&o, &ub, rho)?;
    let e = a.project(&x)?;
    let f = b.project(&y)?;
    let d_e_e1 = dist(&e, &e1);
    let d_f_e2 = dist(&f, &e2);
    let d_e_f = dist(&e, &f);
    let cert = ShortCutCertificate {
        edge1: None,
        edge2: None,
        e1,
        e2,
        e,
        f,
        d_e_e1,
        d_f_e2,
        d_e_f,
        gain: d_e_e1.min(d_f_e2) - d_e_f,
        delta,
        big_delta,
        lbar: lb,
    };
    cert.verify().map_err(LiftError::Internal)?;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::phi_max;
    use crate::geom::{ball_dir_to_tangent, DEFAULT_DELTA};
    use crate::lift::random_admissible_pair;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ray_from_origin(angle: f64, len: f64) -> GeodesicSegment {
        let o = HPoint::origin();
        let w = Vector3::new(-angle.cos(), angle.sin(), 0.0);
        GeodesicSegment::from_ray(o, ball_dir_to_tangent(&o, &w), len).unwrap()
    }

    #[test]
    fn symmetric_pair_at_maximal_angle() {
        let lb = lbar(0.0, DEFAULT_DELTA).unwrap();
        let half = 0.5 * phi_max(lb, 0.0).unwrap() * (1.0 - 1e-9);
        let a = ray_from_origin(half, lb);
        let b = ray_from_origin(-half, lb);
        assert!(a.in_horoball() && b.in_horoball());
        let c = short_cut(&a, &b, 0.0, DEFAULT_DELTA).unwrap();
        assert!(c.d_e_f < 3.0 * DEFAULT_DELTA, "d(e,f) = {}", c.d_e_f);
        assert!(c.gain > DEFAULT_DELTA);
        c.verify_on(&a, &b).unwrap();
    }

    #[test]
    fn random_admissible_pairs_always_certify() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &delta in &[0.0, 0.5, 1.0] {
            for _ in 0..100 {
                let p = random_admissible_pair(&mut rng, delta, DEFAULT_DELTA).unwrap();
                let c = short_cut(&p.a, &p.b, delta, DEFAULT_DELTA).unwrap();
                c.verify_on(&p.a, &p.b).unwrap();
                assert!(c.d_e_e1.min(c.d_f_e2) - c.d_e_f > DEFAULT_DELTA);
            }
        }
    }

    #[test]
    fn preconditions_are_checked() {
        let lb = lbar(0.0, DEFAULT_DELTA).unwrap();
        let good = ray_from_origin(0.0, lb);
        let short = ray_from_origin(0.0, lb - 1.0);
        assert!(matches!(short_cut(&good, &short, 0.0, DEFAULT_DELTA), Err(LiftError::Hypothesis(_))));
        let outside = ray_from_origin(0.5, lb);
        assert!(matches!(short_cut(&good, &outside, 0.0, DEFAULT_DELTA), Err(LiftError::Hypothesis(_))));
        let o = HPoint::origin();
        let start = exp_map(&o, &Vector3::new(-1.0, 0.0, 0.0), 0.7).unwrap();
        let far = GeodesicSegment::from_ray(start, ball_dir_to_tangent(&start, &Vector3::new(-1.0, 0.0, 0.0)), 2.0 * lb).unwrap();
        assert!(matches!(short_cut(&good, &far, 0.5, DEFAULT_DELTA), Err(LiftError::Hypothesis(_))));
        let long = ray_from_origin(0.0, 2.0 * lb);
        assert!(short_cut(&long, &far, 0.7 + 1e-6, DEFAULT_DELTA).is_ok());
        assert!(short_cut(&good, &good, -1.0, DEFAULT_DELTA).is_err());
    }

    #[test]
    fn tampered_certificate_fails() {
        let lb = lbar(0.0, DEFAULT_DELTA).unwrap();
        let c = short_cut(&ray_from_origin(1e-8, lb), &ray_from_origin(-1e-8, lb), 0.0, DEFAULT_DELTA).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: ShortCutCertificate = serde_json::from_str(&json).unwrap();
        back.verify().unwrap();
        let mut bad = c;
        bad.f = bad.e1;
        assert!(bad.verify().is_err());
        let mut bad = c;
        bad.lbar = 1.0;
        assert!(bad.verify().is_err());
    }
}
