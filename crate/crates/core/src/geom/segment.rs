//! Geodesic segments.
//!
//! A segment is stored as a base point, a unit tangent there and a parameter
//! interval `[t0, t1]`; the segment runs from `γ(t0)` to `γ(t1)` where
//! `γ(t) = cosh t · base + sinh t · dir`. Keeping the base at the end that is
//! near the region of interest lets segments be far longer than the range in
//! which both endpoints could be represented.

use serde::{Deserialize, Serialize};

use super::horoball::{ball_margin, horo_height, BOUNDARY_BAND};
use super::point::{
    minkowski_sum2,
    dist, exp_tangent, log_direction, minkowski, project_tangent, tangent_norm, HPoint, Tangent,
};
use super::GeomError;

/// Distance from the base beyond which [`segment_distance`] does not search.
pub const SEARCH_RADIUS: f64 = 16.0;

/// Relative size below which a Busemann coefficient is treated as zero, so
/// that edges asymptotic to the horoball's basepoint stay inside it.
pub const ASYMPTOTIC_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicSegment {
    base: HPoint,
    dir: Tangent,
    t0: f64,
    t1: f64,
}

impl GeodesicSegment {
    /// Segment between two points.
    pub fn new(start: HPoint, end: HPoint) -> Self {
        if end.radius() < start.radius() {
            return Self::new(end, start).reversed();
        }
        match log_direction(&start, &end) {
            Ok(dir) => Self {
                base: start,
                dir,
                t0: 0.0,
                t1: dist(&start, &end),
            }
            .centred(),
            Err(_) => Self {
                base: start,
                dir: any_unit_tangent(&start),
                t0: 0.0,
                t1: 0.0,
            },
        }
    }

    /// Segment of length `len` leaving `start` along the unit tangent `dir`.
    pub fn from_ray(start: HPoint, dir: Tangent, len: f64) -> Result<Self, GeomError> {
        Self::with_base(start, dir, 0.0, len)
    }

    /// Segment of length `len` arriving at `end` with unit velocity `dir`.
    pub fn ending_at(end: HPoint, dir: Tangent, len: f64) -> Result<Self, GeomError> {
        Self::with_base(end, dir, -len, 0.0)
    }

    fn with_base(base: HPoint, dir: Tangent, t0: f64, t1: f64) -> Result<Self, GeomError> {
        if !(t1 - t0).is_finite() || t1 < t0 {
            return Err(GeomError::NegativeLength(t1 - t0));
        }
        let d = project_tangent(&base, &dir);
        let n = tangent_norm(&base, &d);
        if (n - 1.0).abs() > 1e-9 {
            return Err(GeomError::NonUnitDirection { norm: n });
        }
        Ok(Self {
            base,
            dir: d / n,
            t0,
            t1,
        }
        .centred())
    }

    /// The same segment re-based at its point nearest the origin when the
    /// current base is far out. The base and direction satisfy the
    /// hyperboloid identities only to about `eps·e^{2r}`, so every later
    /// computation is best conditioned with the base as close in as possible.
    fn centred(self) -> Self {
        if self.base.radius() < 1.0 {
            return self;
        }
        let b = self.base.lift();
        // Time component cosh t·b₀ + sinh t·d₀ is least at tanh t = -d₀/b₀.
        let r = -self.dir[0] / b[0];
        if !(r.abs() < 1.0) {
            return self;
        }
        let ts = r.atanh().clamp(self.t0, self.t1);
        if ts.abs() < 1e-6 {
            return self;
        }
        let Ok(base) = self.at(ts) else { return self };
        let d = project_tangent(&base, &self.velocity(ts));
        let n = tangent_norm(&base, &d);
        if !(n > 0.0 && n.is_finite()) {
            return self;
        }
        Self {
            base,
            dir: d / n,
            t0: self.t0 - ts,
            t1: self.t1 - ts,
        }
    }

    pub fn base(&self) -> HPoint {
        self.base
    }

    pub fn dir(&self) -> Tangent {
        self.dir
    }

    /// Parameter interval relative to the base.
    pub fn interval(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn length(&self) -> f64 {
        self.t1 - self.t0
    }

    /// The same segment traversed the other way.
    pub fn reversed(&self) -> Self {
        Self {
            base: self.base,
            dir: -self.dir,
            t0: -self.t1,
            t1: -self.t0,
        }
    }

    /// Point at parameter `t` (relative to the base).
    pub fn at(&self, t: f64) -> Result<HPoint, GeomError> {
        if t == 0.0 {
            return Ok(self.base);
        }
        exp_tangent(&self.base, &self.dir, t)
    }

    /// Point at distance `s` from the start.
    pub fn point_at(&self, s: f64) -> Result<HPoint, GeomError> {
        self.at(self.t0 + s.clamp(0.0, self.length()))
    }

    pub fn start(&self) -> Result<HPoint, GeomError> {
        self.at(self.t0)
    }

    pub fn end(&self) -> Result<HPoint, GeomError> {
        self.at(self.t1)
    }

    /// Unit velocity at parameter `t`.
    pub fn velocity(&self, t: f64) -> Tangent {
        self.base.lift() * t.sinh() + self.dir * t.cosh()
    }

    /// Parameter of the point of the segment nearest to `x`.
    ///
    /// With `n± = base ± dir` (null), the foot of the perpendicular lies at
    /// `½ ln(<x, n₋> / <x, n₊>)`, with the products taken in compensated
    /// arithmetic. Lorentz products of far points amplify their rounding by
    /// `e^{r}`, so the estimate is then refined from distances alone: along
    /// the geodesic `cosh d(x, γ(t + s)) = P cosh s + Q sinh s`, and three
    /// distances at `s = -1, 0, 1` give `P` and `Q`.
    pub fn closest_param(&self, x: &HPoint) -> f64 {
        let xl = x.lift();
        let b = self.base.lift();
        let base_dot = |sign: f64| -minkowski_sum2(&[(&xl, &b), (&xl, &(self.dir * sign))]);
        let (ahead, behind) = (base_dot(1.0), base_dot(-1.0));
        if !(ahead > 0.0 && behind > 0.0) {
            return self.closest_param_search(x);
        }
        let mut t = 0.5 * (behind.ln() - ahead.ln());
        for _ in 0..4 {
            let Some(s) = self.foot_correction(x, t) else { break };
            t += s;
            if s.abs() <= 1e-14 * (1.0 + t.abs()) {
                break;
            }
        }
        t.clamp(self.t0, self.t1)
    }

    /// Offset from `t` to the foot of the perpendicular from `x`, measured on
    /// the full geodesic.
    fn foot_correction(&self, x: &HPoint, t: f64) -> Option<f64> {
        let d = |s: f64| self.at(t + s).ok().map(|y| dist(x, &y));
        let (dm, d0, dp) = (d(-1.0)?, d(0.0)?, d(1.0)?);
        // cosh(a) / cosh(d0) without overflow.
        let ratio = |a: f64| (a - d0).exp() * (1.0 + (-2.0 * a).exp()) / (1.0 + (-2.0 * d0).exp());
        let (cm, cp) = (ratio(dm), ratio(dp));
        let p = (cp + cm) / (2.0 * 1f64.cosh());
        let q = (cp - cm) / (2.0 * 1f64.sinh());
        let r = -q / p;
        (r.abs() < 1.0).then(|| r.atanh())
    }

    /// Golden-section search on the distance, for points so far from the
    /// base that even the compensated products lose their sign.
    fn closest_param_search(&self, x: &HPoint) -> f64 {
        let reach = dist(&self.base, x) + 1.0;
        let (lo, hi) = (self.t0.max(-reach), self.t1.min(reach));
        if lo >= hi {
            return lo.clamp(self.t0, self.t1);
        }
        golden_min(|t| self.distance_at(x, t), lo, hi, 1e-13)
    }

    /// Distance from `x` to the point at parameter `t`, valid for any `t`
    /// in the interval even when that point is not representable.
    pub fn distance_at(&self, x: &HPoint, t: f64) -> f64 {
        if t.abs() <= 300.0 {
            if let Ok(y) = self.at(t) {
                return dist(x, &y);
            }
        }
        // cosh d = P cosh t + Q sinh t, evaluated in the log domain.
        let p = -minkowski(&x.lift(), &self.base.lift());
        let q = -minkowski(&x.lift(), &self.dir);
        let lead = if t > 0.0 { p + q } else { p - q };
        if lead <= 0.0 {
            return f64::INFINITY;
        }
        (lead.ln() + t.abs()) + (1.0f64 - (-(2.0 * t.abs())).exp()).ln().min(0.0)
    }

    pub fn distance_to_point(&self, x: &HPoint) -> f64 {
        self.distance_at(x, self.closest_param(x))
    }

    /// Nearest point of the segment to `x`.
    pub fn project(&self, x: &HPoint) -> Result<HPoint, GeomError> {
        self.at(self.closest_param(x))
    }

    /// Coefficients of the horoball height along the whole geodesic.
    pub fn busemann_profile(&self) -> BusemannProfile {
        BusemannProfile::new(&self.base, &self.dir)
    }

    /// Whether the segment lies in the canonical horoball, allowing the
    /// boundary band. The height is convex along a geodesic, so the
    /// endpoints decide.
    pub fn in_horoball(&self) -> bool {
        let prof = self.busemann_profile();
        [self.t0, self.t1].iter().all(|&t| {
            if t.abs() <= 30.0 {
                if let Ok(p) = self.at(t) {
                    return ball_margin(&p) <= BOUNDARY_BAND;
                }
            }
            prof.ln_height(t) <= BOUNDARY_BAND
        })
    }
}

fn any_unit_tangent(p: &HPoint) -> Tangent {
    for v in [Tangent::new(0.0, 1.0, 0.0, 0.0), Tangent::new(0.0, 0.0, 1.0, 0.0)] {
        let w = project_tangent(p, &v);
        let n = tangent_norm(p, &w);
        if n > 0.5 {
            return w / n;
        }
    }
    Tangent::new(0.0, 0.0, 0.0, 1.0)
}

/// The horoball height `t + x₁` along `γ(t)`, written `A eᵗ + B e⁻ᵗ` with
/// `A, B ≥ 0`; the curve lies in 𝒲 exactly where this is at most 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BusemannProfile {
    pub a: f64,
    pub b: f64,
}

impl BusemannProfile {
    pub fn new(base: &HPoint, dir: &Tangent) -> Self {
        let l = base.lift();
        let alpha = horo_height(&l);
        let beta = dir[0] + dir[1];
        // 4AB = α² - β² = |α v⊥ - β p⊥|², free of the cancellation in α ± β.
        let wy = alpha * dir[2] - beta * l[2];
        let wz = alpha * dir[3] - beta * l[3];
        let w2 = wy * wy + wz * wz;
        let (mut a, mut b) = if beta < 0.0 {
            (w2 / (2.0 * (alpha - beta)), 0.5 * (alpha - beta))
        } else {
            (0.5 * (alpha + beta), w2 / (2.0 * (alpha + beta)))
        };
        let scale = alpha + beta.abs();
        if a <= ASYMPTOTIC_TOL * scale {
            a = 0.0;
        }
        if b <= ASYMPTOTIC_TOL * scale {
            b = 0.0;
        }
        Self { a, b }
    }

    /// `ln(t + x₁)` at parameter `t`; finite for every `t` unless the
    /// coefficient in the relevant direction vanishes.
    pub fn ln_height(&self, t: f64) -> f64 {
        let x = if self.a > 0.0 { self.a.ln() + t } else { f64::NEG_INFINITY };
        let y = if self.b > 0.0 { self.b.ln() - t } else { f64::NEG_INFINITY };
        let m = x.max(y);
        if m == f64::NEG_INFINITY {
            return m;
        }
        m + ((x - m).exp() + (y - m).exp()).ln()
    }

    /// Largest parameter at which the height equals 1, if the geodesic ever
    /// leaves 𝒲 in the forward direction.
    pub fn exit_param(&self) -> Option<f64> {
        if self.a <= 0.0 {
            return None;
        }
        let disc = 1.0 - 4.0 * self.a * self.b;
        if disc < 0.0 {
            return None;
        }
        Some(((1.0 + disc.sqrt()) / (2.0 * self.a)).ln())
    }
}

/// Minimiser of a unimodal function on `[lo, hi]`.
fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > rel_tol * (1.0 + a.abs().max(b.abs())) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    [(lo, f(lo)), (hi, f(hi)), (mid, f(mid))]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|p| p.0)
        .unwrap_or(mid)
}

/// Minimum distance between two segments.
///
/// The distance from a point of `s1` to `s2` is convex along `s1`, so a
/// golden-section search over `s1` finds it; the search is confined to
/// parameters within [`SEARCH_RADIUS`] of the base of `s1`.
pub fn segment_distance(s1: &GeodesicSegment, s2: &GeodesicSegment) -> f64 {
    let (t0, t1) = s1.interval();
    let mut lo = t0.max(-SEARCH_RADIUS);
    let mut hi = t1.min(SEARCH_RADIUS);
    if lo > hi {
        let t = if t0 > SEARCH_RADIUS { t0 } else { t1 };
        lo = t;
        hi = t;
    }
    let f = |t: f64| match s1.at(t) {
        Ok(x) => s2.distance_to_point(&x),
        Err(_) => f64::INFINITY,
    };
    let mut best = f(lo).min(f(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-11 * (1.0 + a.abs().max(b.abs())) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        best = best.min(fc).min(fd);
    }
    best.min(f(0.5 * (a + b)))
}

/// Van der Corput positions `0, 1, 1/2, 1/4, 3/4, 1/8, …`; every prefix is
/// contained in every longer one.
fn nested_position(j: usize) -> f64 {
    match j {
        0 => 0.0,
        1 => 1.0,
        _ => {
            let mut k = j - 1;
            let mut x = 0.0;
            let mut scale = 0.5;
            while k > 0 {
                if k & 1 == 1 {
                    x += scale;
                }
                k >>= 1;
                scale *= 0.5;
            }
            x
        }
    }
}

/// Largest distance from a sampled point on one side of the triangle to the
/// union of the other two sides. Sample sets are nested, so the result is
/// nondecreasing in `samples`.
pub fn thin_triangle_gap(a: &HPoint, b: &HPoint, c: &HPoint, samples: usize) -> f64 {
    let sides = [
        GeodesicSegment::new(*a, *b),
        GeodesicSegment::new(*b, *c),
        GeodesicSegment::new(*c, *a),
    ];
    let mut gap: f64 = 0.0;
    for i in 0..3 {
        let side = &sides[i];
        let (o1, o2) = (&sides[(i + 1) % 3], &sides[(i + 2) % 3]);
        for j in 0..samples.max(2) {
            let Ok(x) = side.point_at(nested_position(j) * side.length()) else {
                continue;
            };
            let d = o1.distance_to_point(&x).min(o2.distance_to_point(&x));
            gap = gap.max(d);
        }
    }
    gap
}

#[derive(Serialize, Deserialize)]
struct SegmentRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<HPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    end: Option<HPoint>,
    length: f64,
    base: HPoint,
    direction: [f64; 4],
    interval: [f64; 2],
}

impl Serialize for GeodesicSegment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rep = |t: f64| {
            self.at(t)
                .ok()
                .filter(|p| p.is_representable_in_ball())
        };
        SegmentRepr {
            start: rep(self.t0),
            end: rep(self.t1),
            length: self.length(),
            base: self.base,
            direction: [self.dir[0], self.dir[1], self.dir[2], self.dir[3]],
            interval: [self.t0, self.t1],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GeodesicSegment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = SegmentRepr::deserialize(d)?;
        let dir = Tangent::new(r.direction[0], r.direction[1], r.direction[2], r.direction[3]);
        GeodesicSegment::with_base(r.base, dir, r.interval[0], r.interval[1])
            .map_err(serde::de::Error::custom)
    }
}
