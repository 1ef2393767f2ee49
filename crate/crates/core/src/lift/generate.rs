//! Seeded generators of admissible inputs for the short-cut and trichotomy
//! constructions.

use nalgebra::{Matrix3, Rotation3, Vector3, Vector4};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use super::path::{build_path_at, is_embedded, BEND};
use super::{escapes_horoball, Containment, LiftError, TrichotomyInput};
use crate::bounds::{lbar, ConstantSchedule};
use crate::geom::{
    exp_map, horoball_contains, tangent_dot, Frame, GeodesicSegment, HPoint, HoroClass, IdealPoint, Isometry, Tangent,
};

const MAX_ATTEMPTS: usize = 10_000;

/// Two edges satisfying the short-cut hypotheses: starts within `δ` of the
/// origin, both inside 𝒲, lengths at least `L̄(δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub a: GeodesicSegment,
    pub b: GeodesicSegment,
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

fn random_frame_at_origin<R: Rng + ?Sized>(rng: &mut R) -> Frame {
    let rot = Isometry::rotation(random_unit(rng), rng.gen_range(0.0..TAU));
    rot.apply_frame(&Frame::standard()).expect("rotation fixes the origin")
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Edge from `start` heading for the horoball's basepoint, tilted by a
/// log-uniform angle, kept only if it stays in 𝒲.
fn random_edge<R: Rng + ?Sized>(rng: &mut R, start: HPoint, len: f64) -> Option<GeodesicSegment> {
    let d = IdealPoint::canonical().direction_from(&start);
    let f = Frame::with_forward(start, d).ok()?;
    let tilt = 10f64.powf(rng.gen_range(-18.0..0.0));
    let tilt = if tilt < 1e-17 { 0.0 } else { tilt };
    let psi = rng.gen_range(0.0..TAU);
    let [e1, e2, e3] = *f.axes();
    let v = e1 * tilt.cos() + (e2 * psi.cos() + e3 * psi.sin()) * tilt.sin();
    let seg = GeodesicSegment::from_ray(start, v, len).ok()?;
    seg.in_horoball().then_some(seg)
}

/// Start within `radius` of the origin and inside 𝒲. A point at distance
/// `r` lies in 𝒲 when its direction is within `acos(tanh(r/2))` of the
/// horoball axis, so the direction is drawn from that cap.
fn random_start<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Option<HPoint> {
    if radius == 0.0 {
        return Some(HPoint::origin());
    }
    let r = radius * rng.gen::<f64>().cbrt();
    // 1 - cos φ = u (1 - tanh(r/2)) without cancellation.
    let phi = 2.0 * (rng.gen::<f64>() / (r.exp() + 1.0)).sqrt().asin();
    let psi = rng.gen_range(0.0..TAU);
    let u = Vector3::new(-phi.cos(), phi.sin() * psi.cos(), phi.sin() * psi.sin());
    let p = exp_map(&HPoint::origin(), &u, r).ok()?;
    (horoball_contains(&p).class != HoroClass::Outside).then_some(p)
}

/// Random admissible pair for [`super::short_cut`], lengths log-uniform in
/// `[L̄(δ), 3 L̄(δ)]`.
pub fn random_admissible_pair<R: Rng + ?Sized>(
    rng: &mut R,
    delta: f64,
    big_delta: f64,
) -> Result<AdmissiblePair, LiftError> {
    random_admissible_pair_within(rng, delta, delta, big_delta)
}

/// As [`random_admissible_pair`], with starts drawn from the smaller ball
/// `B̄(0, start_radius)`. Containment in 𝒲 is resolved in ball coordinates,
/// which lose it beyond radius about 30, so large `δ` is sampled this way.
pub fn random_admissible_pair_within<R: Rng + ?Sized>(
    rng: &mut R,
    start_radius: f64,
    delta: f64,
    big_delta: f64,
) -> Result<AdmissiblePair, LiftError> {
    if !(start_radius >= 0.0 && start_radius <= delta) {
        return Err(LiftError::Hypothesis(format!(
            "start radius {start_radius} must lie in [0, δ = {delta}]"
        )));
    }
    let lb = lbar(delta, big_delta)?;
    let edge = |rng: &mut R| {
        for _ in 0..MAX_ATTEMPTS {
            let Some(start) = random_start(rng, start_radius) else { continue };
            let len = log_uniform(rng, lb, 3.0 * lb);
            if let Some(seg) = random_edge(rng, start, len) {
                return Ok(seg);
            }
        }
        Err(LiftError::GeneratorExhausted { attempts: MAX_ATTEMPTS })
    };
    Ok(AdmissiblePair {
        a: edge(rng)?,
        b: edge(rng)?,
    })
}

/// Euclidean normal in R⁴ of the span of three vectors.
fn normal4(p: &Vector4<f64>, q: &Vector4<f64>, r: &Vector4<f64>) -> Vector4<f64> {
    let minor = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        Matrix3::from_fn(|i, j| [p, q, r][i][cols[j]]).determinant()
    };
    Vector4::new(minor(0), -minor(1), minor(2), -minor(3))
}

/// Plane `n·ω = c` cutting out the ideal endpoints of rays from `frame`'s
/// position whose direction is `base + sin(π/3)(cos ψ e₂ + sin ψ e₃)`.
fn endpoint_circle(frame: &Frame, base: Tangent) -> (Vector3<f64>, f64) {
    let [_, e2, e3] = *frame.axes();
    let m = normal4(&(frame.position().lift() + base), &e2, &e3);
    // A null vector (1, ω) lies in the span iff its Minkowski product with
    // J m vanishes, i.e. m·(1, ω) = 0 in Euclidean terms.
    (Vector3::new(m[1], m[2], m[3]), -m[0])
}

fn circle_intersection<R: Rng + ?Sized>(
    rng: &mut R,
    (n1, c1): (Vector3<f64>, f64),
    (n2, c2): (Vector3<f64>, f64),
) -> Option<Vector3<f64>> {
    let d = n1.cross(&n2);
    let dd = d.norm_squared();
    if dd < 1e-20 * n1.norm_squared() * n2.norm_squared() {
        return None;
    }
    let (a11, a12, a22) = (n1.dot(&n1), n1.dot(&n2), n2.dot(&n2));
    let det = a11 * a22 - a12 * a12;
    let a = (c1 * a22 - c2 * a12) / det;
    let b = (a11 * c2 - a12 * c1) / det;
    let p0 = n1 * a + n2 * b;
    let rest = 1.0 - p0.norm_squared();
    if rest <= 1e-9 {
        return None;
    }
    let t = (rest / dd).sqrt();
    let w = if rng.gen() { p0 + d * t } else { p0 - d * t };
    Some(w / w.norm())
}

/// Dihedral at `frame` whose turned direction `base + sin(π/3)(cos ψ e₂ +
/// sin ψ e₃)` heads for `omega`.
fn dihedral_toward(frame: &Frame, base: Tangent, omega: Vector3<f64>) -> Option<f64> {
    let p = frame.position();
    let u = IdealPoint::new(omega).ok()?.direction_from(&p);
    let w = u - base;
    let [_, e2, e3] = *frame.axes();
    Some(tangent_dot(&p, &w, &e3).atan2(tangent_dot(&p, &w, &e2)))
}

fn rotation_to_basepoint(omega: Vector3<f64>) -> Isometry {
    let target = IdealPoint::canonical().direction();
    match Rotation3::rotation_between(&omega, &target).and_then(|r| r.axis_angle()) {
        Some((axis, angle)) => Isometry::rotation(axis.into_inner(), angle),
        None if omega.dot(&target) > 0.0 => Isometry::identity(),
        None => Isometry::rotation(Vector3::z(), PI),
    }
}

/// Path `A, x_{n-1}, …, x₀, y₀, …, y_{m-1}, B` through the origin (between
/// `x₀` and `y₀`) lying entirely in 𝒲.
///
/// Random dihedrals shape the middle; the two dihedrals at the ends of the
/// middle are then solved so that `A` and `B` run toward a common ideal
/// point, and a rotation about the origin moves that point to the
/// horoball's basepoint. Shapes whose middle leaves 𝒲 are redrawn. Needs at
/// least two middle edges on each side.
pub fn contained_instance<R: Rng + ?Sized>(
    rng: &mut R,
    x_inner: &[f64],
    y_inner: &[f64],
    a_len: f64,
    b_len: f64,
) -> Result<TrichotomyInput, LiftError> {
    let (n, m) = (x_inner.len(), y_inner.len());
    if n < 2 || m < 2 {
        return Err(LiftError::Hypothesis("a contained instance needs two inner edges per side".into()));
    }
    let middle: Vec<f64> = x_inner.iter().rev().chain(y_inner).copied().collect();
    let k = middle.len();
    let half = (PI - BEND).cos();
    for _ in 0..MAX_ATTEMPTS {
        let anchor = random_frame_at_origin(rng);
        // dihedrals[i] belongs to middle vertex i + 1.
        let inner_dihedrals: Vec<f64> = (1..k).map(|_| rng.gen_range(0.0..TAU)).collect();
        let mut f = anchor;
        for i in n..k {
            let moved = f.transport(middle[i])?;
            f = if i + 1 < k { moved.rotate(PI - BEND, inner_dihedrals[i]) } else { moved };
        }
        let b_frame = f;
        let mut f = anchor;
        for i in (0..n).rev() {
            let incoming = f.rotate(-(PI - BEND), inner_dihedrals[i]);
            f = incoming.transport(-middle[i])?;
        }
        let a_frame = f;
        let a_base = -a_frame.forward() * half;
        let b_base = b_frame.forward() * half;
        let Some(omega) = circle_intersection(
            rng,
            endpoint_circle(&a_frame, a_base),
            endpoint_circle(&b_frame, b_base),
        ) else {
            continue;
        };
        let (Some(psi_a), Some(psi_b)) = (
            dihedral_toward(&a_frame, a_base, omega),
            dihedral_toward(&b_frame, b_base, omega),
        ) else {
            continue;
        };
        let spin = Isometry::rotation(Vector3::x(), rng.gen_range(0.0..TAU));
        let rot = spin.compose(&rotation_to_basepoint(omega));
        let lengths: Vec<f64> = std::iter::once(a_len).chain(middle.iter().copied()).chain([b_len]).collect();
        let dihedrals: Vec<f64> = std::iter::once(psi_a).chain(inner_dihedrals).chain([psi_b]).collect();
        let path = build_path_at(&lengths, &dihedrals, rot.apply_frame(&anchor)?, n + 1)?;
        if escapes_horoball(&path)? != Containment::Contained || !is_embedded(&path, 1e-9).embedded {
            continue;
        }
        return Ok(TrichotomyInput { path, a: 0, b: k + 1 });
    }
    Err(LiftError::GeneratorExhausted { attempts: MAX_ATTEMPTS })
}

/// Random input satisfying the trichotomy hypotheses for some window size
/// `k ≤ kmax`: a window through the origin with edges at most `L(k)`
/// (occasionally long enough to be selected themselves), flanked by two
/// edges longer than `L(k)`. A quarter of the draws with room for it are
/// built to lie in 𝒲; the rest have random geometry and mostly escape.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    kmax: usize,
    schedule: &ConstantSchedule,
) -> Result<TrichotomyInput, LiftError> {
    let kmax = kmax.min(schedule.kmax());
    for _ in 0..MAX_ATTEMPTS {
        let k = rng.gen_range(0..=kmax);
        let lk = schedule.l(k);
        if !lk.is_finite() {
            continue;
        }
        let n = rng.gen_range(0..=k);
        let m = k - n;
        let l2 = if schedule.kmax() >= 2 { schedule.l(2) } else { f64::INFINITY };
        let inner = |rng: &mut R| {
            if lk > 2.0 * l2 && rng.gen_bool(0.15) {
                log_uniform(rng, 0.5 * l2, lk.min(200.0))
            } else {
                log_uniform(rng, 0.02, lk.min(5.0))
            }
        };
        let x_inner: Vec<f64> = (0..n).map(|_| inner(rng)).collect();
        let y_inner: Vec<f64> = (0..m).map(|_| inner(rng)).collect();
        let a_len = lk * (1.0 + log_uniform(rng, 1e-3, 10.0));
        let b_len = lk * (1.0 + log_uniform(rng, 1e-3, 10.0));
        if n >= 2 && m >= 2 && rng.gen_bool(0.25) {
            let short = |v: &[f64]| v.iter().map(|&l| l.min(0.5)).collect::<Vec<_>>();
            match contained_instance(rng, &short(&x_inner), &short(&y_inner), a_len, b_len) {
                Ok(inst) => return Ok(inst),
                Err(LiftError::GeneratorExhausted { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        let middle: Vec<f64> = x_inner.iter().rev().chain(&y_inner).copied().collect();
        let lengths: Vec<f64> = std::iter::once(a_len).chain(middle).chain([b_len]).collect();
        let dihedrals: Vec<f64> = (1..lengths.len()).map(|_| rng.gen_range(0.0..TAU)).collect();
        let path = match build_path_at(&lengths, &dihedrals, random_frame_at_origin(rng), n + 1) {
            Ok(p) => p,
            Err(LiftError::Geom(_)) => continue,
            Err(e) => return Err(e),
        };
        if !is_embedded(&path, 1e-9).embedded {
            continue;
        }
        return Ok(TrichotomyInput { path, a: 0, b: k + 1 });
    }
    Err(LiftError::GeneratorExhausted { attempts: MAX_ATTEMPTS })
}
