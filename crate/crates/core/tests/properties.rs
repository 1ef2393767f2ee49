use std::f64::consts::PI;

use h3bound::bounds::{phi_max, schedule};
use h3bound::geom::{
    angle, ball_dir_to_tangent, chord_distance, dist, exp_map, GeodesicSegment, horoball_contains, ray_exit_length, HPoint, Isometry, DEFAULT_DELTA,
};
use h3bound::graphs::{enumerate_n_graphs, girth_length, random_reduced_closed_path, window_long_edge_check, LengthAssignment, WindowOutcome};
use h3bound::lift::{random_admissible_pair_within, short_cut, two_long_edges};
use h3bound::steiner::{optimize, random_three_terminal, CarrierConfig, OptimizeOptions, SteinerError};
use nalgebra::Vector3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit() -> impl Strategy<Value = Vector3<f64>> {
    (0.0..PI, 0.0..2.0 * PI).prop_map(|(t, p)| Vector3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos()))
}

fn point(max_r: f64) -> impl Strategy<Value = HPoint> {
    (unit(), 0.0..max_r).prop_map(|(u, r)| exp_map(&HPoint::origin(), &u, r).unwrap())
}

proptest! {
    #[test]
    fn metric_axioms(p in point(6.0), q in point(6.0), r in point(6.0)) {
        prop_assert!((dist(&p, &q) - dist(&q, &p)).abs() < 1e-10);
        prop_assert!(dist(&p, &p) < 1e-7);
        prop_assert!(dist(&p, &r) <= dist(&p, &q) + dist(&q, &r) + 1e-10);
    }

    #[test]
    fn ray_exit_is_strictly_decreasing(a in 0.01..1.56f64, b in 0.01..1.56f64) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(ray_exit_length(lo) > ray_exit_length(hi));
    }

    #[test]
    fn chord_distance_increases_with_angle(rho in 0.01..20.0f64, a in 0.0..PI, b in 0.0..PI) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(chord_distance(rho, lo) < chord_distance(rho, hi));
    }

    #[test]
    fn phi_max_decreases_with_length(delta in 0.0..5.0f64, a in 0.01..30.0f64, b in 0.01..30.0f64) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(phi_max(delta + lo, delta).unwrap() > phi_max(delta + hi, delta).unwrap());
    }

    #[test]
    fn schedules_are_monotone(big in 0.5..1.5f64) {
        let s = schedule(10, big).unwrap();
        for k in 1..=10 {
            prop_assert!(s.l(k) > s.l(k - 1));
        }
        for k in 2..=10 {
            prop_assert!(s.l(k) >= 2.0 * (k as f64 * s.l(k - 1) + big));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn isometries_preserve_distance_and_angle(seed in any::<u64>(), p in point(4.0), q in point(4.0), r in point(4.0)) {
        let g = Isometry::random(&mut ChaCha8Rng::seed_from_u64(seed), 3.0);
        let (gp, gq, gr) = (g.apply(&p).unwrap(), g.apply(&q).unwrap(), g.apply(&r).unwrap());
        let d = dist(&p, &q);
        prop_assert!((dist(&gp, &gq) - d).abs() < 1e-9 * (1.0 + d));
        if dist(&p, &q) > 1e-3 && dist(&p, &r) > 1e-3 {
            prop_assert!((angle(&gp, &gq, &gr).unwrap() - angle(&p, &q, &r).unwrap()).abs() < 1e-7);
        }
    }

    #[test]
    fn horoball_side_survives_its_stabiliser(seed in any::<u64>(), p in point(4.0)) {
        let g = Isometry::random_preserving_horoball(&mut ChaCha8Rng::seed_from_u64(seed), 2.0);
        let m = horoball_contains(&p).margin;
        prop_assume!(m.abs() > 1e-9);
        let gm = horoball_contains(&g.apply(&p).unwrap()).margin;
        prop_assert_eq!(m > 0.0, gm > 0.0);
    }

    #[test]
    fn optimizer_never_lengthens(seed in any::<u64>(), steps in 1usize..12) {
        let c = random_three_terminal(&mut ChaCha8Rng::seed_from_u64(seed));
        let best = |max_iter: usize| match optimize(&c, &OptimizeOptions { tol: 1e-300, max_iter }) {
            Ok(r) => r.final_length,
            Err(SteinerError::NotConverged { best, .. }) => best.total_length(),
            Err(e) => panic!("{e}"),
        };
        let slack = 8.0 * f64::EPSILON * c.total_length();
        prop_assert!(best(steps) <= best(steps - 1) + slack);
        prop_assert!(best(steps) <= c.total_length());
    }
}

/// Start in B̄(0, δ) ∩ 𝒲 and a direction keeping an edge of length `len` in 𝒲.
fn edge_in_horoball(rng: &mut ChaCha8Rng, delta: f64, len: f64) -> GeodesicSegment {
    let o = HPoint::origin();
    loop {
        let u = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let start = exp_map(&o, &u.normalize(), delta * rng.gen::<f64>()).unwrap();
        if horoball_contains(&start).margin > 0.0 {
            continue;
        }
        let w = Vector3::new(-1.0, 0.3 * rng.gen_range(-1.0..1.0), 0.3 * rng.gen_range(-1.0..1.0));
        let seg = GeodesicSegment::from_ray(start, ball_dir_to_tangent(&start, &w.normalize()), len).unwrap();
        if seg.in_horoball() {
            return seg;
        }
    }
}

/// Far endpoints of two edges in 𝒲 starting within δ of the origin subtend
/// at most `phi_max` there.
#[test]
fn phi_max_bounds_the_far_angle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let o = HPoint::origin();
    let mut worst: f64 = 0.0;
    for delta in [0.0, 0.5, 1.0, 2.0] {
        for _ in 0..500 {
            let l = delta + rng.gen_range(0.1..6.0);
            let (a, b) = (edge_in_horoball(&mut rng, delta, l), edge_in_horoball(&mut rng, delta, l));
            let phi = angle(&o, &a.end().unwrap(), &b.end().unwrap()).unwrap();
            let bound = phi_max(l, delta).unwrap();
            assert!(phi <= bound + 1e-9, "δ = {delta}, L = {l}: {phi} > {bound}");
            worst = worst.max(phi / bound);
        }
    }
    assert!(worst > 0.3, "audit never came near the bound ({worst})");
}

/// The schedule delivers the short-cut hypothesis: pairs of length at least
/// L(k) starting within k·L(k-1) always certify. Horoball containment of
/// starts is not resolvable in doubles much beyond radius 30, so for large k
/// they are drawn from B̄(0, 30).
#[test]
fn schedule_feeds_the_short_cut() {
    let s = schedule(6, DEFAULT_DELTA).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 2..=6 {
        let delta = k as f64 * s.l(k - 1);
        for trial in 0..1000 {
            let pair = random_admissible_pair_within(&mut rng, delta.min(30.0), delta, DEFAULT_DELTA).unwrap();
            assert!(pair.a.length() >= s.l(k) && pair.b.length() >= s.l(k));
            let cert = short_cut(&pair.a, &pair.b, delta, DEFAULT_DELTA)
                .unwrap_or_else(|e| panic!("k = {k}, trial {trial}: {e}"));
            cert.verify_on(&pair.a, &pair.b)
                .unwrap_or_else(|e| panic!("k = {k}, trial {trial}: {e}"));
        }
    }
}

/// Girth above [3(n-1)]²·L puts an edge of length 3(n-1)·L in every window of
/// 3(n-1) steps, hence two edges of length L in every period of a closed path.
#[test]
fn girth_bound_gives_two_long_edges() {
    let l = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [2usize, 3] {
        let width = 3 * (n - 1);
        let g_bound = (width * width) as f64 * l;
        for g in enumerate_n_graphs(n).unwrap() {
            for _ in 0..100 {
                let raw: Vec<f64> = (0..g.edge_count()).map(|_| rng.gen_range(0.01..1.0)).collect();
                let w = LengthAssignment::new(&g, raw).unwrap();
                let (girth, _) = girth_length(&g, &w);
                let w = w.scaled(g_bound * 1.0001 / girth);
                for k in 1..=10 {
                    let Ok(path) = random_reduced_closed_path(&g, k, rng.gen()) else { continue };
                    let out = window_long_edge_check(&g, &w, &path, n, g_bound).unwrap();
                    assert_eq!(out, WindowOutcome::Pass);
                    let period: Vec<f64> = path.steps.iter().map(|st| w.get(st.edge)).collect();
                    let unrolled: Vec<f64> = period.iter().cycle().take(2 * width.max(k)).copied().collect();
                    assert!(two_long_edges(&unrolled, l).is_some(), "{period:?}");
                }
            }
        }
    }
}

/// Weiszfeld iteration for the Euclidean Fermat point.
fn fermat(t: &[Vector3<f64>; 3]) -> Vector3<f64> {
    let mut x = (t[0] + t[1] + t[2]) / 3.0;
    for _ in 0..10_000 {
        let (mut num, mut den) = (Vector3::zeros(), 0.0);
        for p in t {
            let d = (p - x).norm().max(1e-300);
            num += p / d;
            den += 1.0 / d;
        }
        x = num / den;
    }
    x
}

/// Tiny terminal triangles are nearly Euclidean: the hyperbolic optimum sees
/// the terminals at Euclidean angles within 0.1° of 120° in ball coordinates
/// and sits on the Euclidean Fermat point.
#[test]
fn small_instances_approach_euclidean_fermat_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let o = HPoint::origin();
    let mut checked = 0;
    while checked < 50 {
        let centre = exp_map(&o, &Vector3::new(rng.gen(), rng.gen(), rng.gen()).normalize(), rng.gen_range(0.0..1.5)).unwrap();
        let t = [0; 3].map(|_| {
            let u = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            exp_map(&centre, &u.normalize(), rng.gen_range(0.001..0.004)).unwrap()
        });
        let interior = (0..3).all(|i| angle(&t[i], &t[(i + 1) % 3], &t[(i + 2) % 3]).unwrap() < 2.0 * PI / 3.0 - 0.05);
        if !interior {
            continue;
        }
        checked += 1;
        let r = optimize(&CarrierConfig::three_terminal(t, centre), &OptimizeOptions::default()).unwrap();
        let s = r.config.position(3).ball();
        let b = t.map(|p| p.ball());
        for i in 0..3 {
            let (u, v) = (b[i] - s, b[(i + 1) % 3] - s);
            let a = (u.dot(&v) / (u.norm() * v.norm())).acos().to_degrees();
            assert!((a - 120.0).abs() < 0.1, "angle {a}");
        }
        let scale = (b[0] - b[1]).norm();
        assert!((fermat(&b) - s).norm() < 0.01 * scale);
    }
}
