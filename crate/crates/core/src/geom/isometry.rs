use nalgebra::{Matrix4, Rotation3, Unit, Vector2, Vector3, Vector4};
use rand::Rng;

use super::frame::Frame;
use super::point::{HPoint, Tangent};
use super::GeomError;

/// An orientation-preserving isometry, acting linearly on the hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    m: Matrix4<f64>,
}

impl Isometry {
    pub fn identity() -> Self {
        Self {
            m: Matrix4::identity(),
        }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    /// Rotation about the origin.
    pub fn rotation(axis: Vector3<f64>, angle: f64) -> Self {
        let r = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(r.matrix());
        Self { m }
    }

    /// Translation by `t` along the geodesic through the origin in direction `axis`.
    pub fn boost(axis: Vector3<f64>, t: f64) -> Self {
        let u = axis.normalize();
        let (c, s) = (t.cosh(), t.sinh());
        let mut m = Matrix4::identity();
        m[(0, 0)] = c;
        for i in 0..3 {
            m[(0, i + 1)] = s * u[i];
            m[(i + 1, 0)] = s * u[i];
            for j in 0..3 {
                m[(i + 1, j + 1)] += (c - 1.0) * u[i] * u[j];
            }
        }
        Self { m }
    }

    /// Parabolic map fixing `(-1, 0, 0)`, translating horospheres there by
    /// `w` in the `(y, z)` directions. Preserves the canonical horoball.
    pub fn parabolic(w: Vector2<f64>) -> Self {
        let n = Vector4::new(1.0, -1.0, 0.0, 0.0);
        let wv = Vector4::new(0.0, 0.0, w[0], w[1]);
        let ww = w.norm_squared();
        let j = Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0));
        // T(v) = v + <v,n> w - <v,w> n - ½<w,w><v,n> n
        let jn = j * n;
        let jw = j * wv;
        let m = Matrix4::identity() + wv * jn.transpose() - n * jw.transpose()
            - n * jn.transpose() * (0.5 * ww);
        Self { m }
    }

    /// A random isometry: a rotation followed by a boost of length up to `max_shift`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_shift: f64) -> Self {
        let axis = random_unit(rng);
        let rot = Self::rotation(random_unit(rng), rng.gen_range(0.0..std::f64::consts::TAU));
        Self::boost(axis, rng.gen_range(0.0..max_shift)).compose(&rot)
    }

    /// A random isometry preserving the canonical horoball.
    pub fn random_preserving_horoball<R: Rng + ?Sized>(rng: &mut R, max_shift: f64) -> Self {
        let rot = Self::rotation(Vector3::x(), rng.gen_range(0.0..std::f64::consts::TAU));
        let w = Vector2::new(
            rng.gen_range(-max_shift..max_shift),
            rng.gen_range(-max_shift..max_shift),
        );
        Self::parabolic(w).compose(&rot)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { m: self.m * other.m }
    }

    pub fn inverse(&self) -> Self {
        let j = Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0));
        Self {
            m: j * self.m.transpose() * j,
        }
    }

    pub fn apply(&self, p: &HPoint) -> Result<HPoint, GeomError> {
        HPoint::from_lift_unchecked(self.m * p.lift())
    }

    pub fn apply_tangent(&self, v: &Tangent) -> Tangent {
        self.m * v
    }

    pub fn apply_frame(&self, f: &Frame) -> Result<Frame, GeomError> {
        let p = self.apply(&f.position())?;
        Frame::from_tangents(p, f.axes().map(|a| self.m * a))
    }
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{angle, dist, horoball_contains, minkowski, HoroClass};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, r: f64) -> HPoint {
        let b = random_unit(rng) * rng.gen_range(0.0..r);
        HPoint::from_ball(b).unwrap()
    }

    #[test]
    fn isometries_preserve_the_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = Isometry::random(&mut rng, 3.0).compose(&Isometry::parabolic(Vector2::new(0.4, -1.2)));
            let p = random_point(&mut rng, 0.9);
            let q = g.apply(&p).unwrap();
            assert!((minkowski(&q.lift(), &q.lift()) + 1.0).abs() < 1e-9);
            let back = g.inverse().apply(&q).unwrap();
            assert!(dist(&back, &p) < 1e-9);
        }
    }

    #[test]
    fn boost_moves_origin_by_its_length() {
        let g = Isometry::boost(Vector3::new(1.0, 2.0, -1.0), 2.5);
        let o = HPoint::origin();
        assert!((dist(&o, &g.apply(&o).unwrap()) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn dist_and_angle_are_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let g = Isometry::random(&mut rng, 2.0);
            let [p, q, r] = [0; 3].map(|_| random_point(&mut rng, 0.8));
            let [gp, gq, gr] = [p, q, r].map(|x| g.apply(&x).unwrap());
            assert!((dist(&p, &q) - dist(&gp, &gq)).abs() < 1e-9);
            let a = angle(&p, &q, &r).unwrap();
            let b = angle(&gp, &gq, &gr).unwrap();
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn horoball_side_is_invariant_under_its_stabiliser() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let g = Isometry::random_preserving_horoball(&mut rng, 1.0);
            let p = random_point(&mut rng, 0.9);
            let before = horoball_contains(&p);
            if before.class == HoroClass::Boundary || before.margin.abs() < 1e-9 {
                continue;
            }
            let after = horoball_contains(&g.apply(&p).unwrap());
            assert_eq!(before.class, after.class);
        }
    }
}
