//! Seeded Monte Carlo and oracle suites over every module.
//!
//! Each trial draws from its own ChaCha stream `(seed, trial)`, so results do
//! not depend on how trials are spread over threads. Statistics are folded in
//! trial order after the parallel phase, which keeps reports byte-identical
//! across runs and thread counts.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{schedule, ConstantSchedule};
use crate::geom::{
    dist, exp_map, horoball_contains, ray_exit_length, thin_triangle_gap, HPoint, DEFAULT_DELTA,
};
use crate::graphs::{
    enumerate_n_graphs, girth_length, reduced_closed_paths, window_long_edge_check, DirectedEdgePath,
    LengthAssignment, TrivalentGraph, WindowOutcome,
};
use crate::lift::{
    prop42_check, prop42_oracle, prop42_select, random_admissible_pair, random_instance, random_prop42_instance,
    short_cut, trichotomy, Prop42Case,
};
use crate::steiner::{corner_shortcut, optimize, random_three_terminal, star_candidates, y_report, SteinerError};

/// Environment variable capping the worker threads of a run.
pub const THREADS_ENV: &str = "H3BOUND_THREADS";

/// Failures kept in a report; the count covers all of them.
pub const MAX_REPORTED_FAILURES: usize = 50;

const THIN_SAMPLES: usize = 32;
const TRICHOTOMY_KMAX: usize = 8;
const WINDOW_MAX_LEN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ThinTriangles,
    Prop42,
    Shortcut,
    Trichotomy,
    Steiner,
    Window,
    Metric,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::ThinTriangles,
        Suite::Prop42,
        Suite::Shortcut,
        Suite::Trichotomy,
        Suite::Steiner,
        Suite::Window,
        Suite::Metric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ThinTriangles => "thin-triangles",
            Suite::Prop42 => "prop42",
            Suite::Shortcut => "shortcut",
            Suite::Trichotomy => "trichotomy",
            Suite::Steiner => "steiner",
            Suite::Window => "window",
            Suite::Metric => "metric",
        }
    }

    /// Trial count used when none is given.
    pub fn default_trials(self) -> u64 {
        match self {
            Suite::ThinTriangles => 100_000,
            Suite::Prop42 => 10_000,
            Suite::Shortcut => 3_000,
            Suite::Trichotomy => 1_000,
            Suite::Steiner => 100,
            Suite::Window => 700,
            Suite::Metric => 1_000,
        }
    }

    /// The suite's main tolerance when none is given.
    ///
    /// thin-triangles: slack over Δ for the sampled gap. metric: agreement
    /// with the line-element integral. steiner: angle deviation in degrees.
    /// shortcut, trichotomy: extra gain required over Δ. prop42, window:
    /// unused.
    pub fn default_tol(self) -> f64 {
        match self {
            Suite::ThinTriangles => 1e-3,
            Suite::Metric => 1e-6,
            Suite::Steiner => 0.5,
            Suite::Shortcut | Suite::Trichotomy | Suite::Prop42 | Suite::Window => 0.0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| VerifyError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}` (expected one of thin-triangles, prop42, shortcut, trichotomy, steiner, window, metric)")]
    UnknownSuite(String),
    #[error("invalid options: {0}")]
    Options(String),
    #[error("could not set up the suite: {0}")]
    Setup(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyOptions {
    pub seed: u64,
    pub trials: u64,
    pub tol: f64,
    pub big_delta: f64,
}

impl VerifyOptions {
    pub fn new(suite: Suite, seed: u64) -> Self {
        Self {
            seed,
            trials: suite.default_trials(),
            tol: suite.default_tol(),
            big_delta: DEFAULT_DELTA,
        }
    }
}

/// A failing trial with everything needed to run it again.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Failure {
    pub suite: Suite,
    pub seed: u64,
    pub trial: u64,
    pub tol: f64,
    pub big_delta: f64,
    pub input: Value,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: u64,
    pub tol: f64,
    pub big_delta: f64,
    pub failure_count: u64,
    /// The first failures by trial index, at most [`MAX_REPORTED_FAILURES`].
    pub failures: Vec<Failure>,
    pub stats: BTreeMap<String, f64>,
    pub pass: bool,
}

#[derive(Clone, Copy)]
enum Fold {
    Max,
    Min,
    Sum,
}

type Stats = Vec<(&'static str, Fold, f64)>;

struct TrialError {
    input: Value,
    message: String,
}

fn fail<T>(input: Value, message: impl Into<String>) -> Result<T, TrialError> {
    Err(TrialError {
        input,
        message: message.into(),
    })
}

/// Data shared by all trials of a run.
struct Context {
    suite: Suite,
    tol: f64,
    big_delta: f64,
    schedule: Option<ConstantSchedule>,
    window: Vec<(TrivalentGraph, usize, Vec<DirectedEdgePath>)>,
}

impl Context {
    fn new(suite: Suite, tol: f64, big_delta: f64) -> Result<Self, VerifyError> {
        if !(tol.is_finite()) {
            return Err(VerifyError::Options(format!("tolerance must be finite, got {tol}")));
        }
        if !(big_delta > 0.0 && big_delta.is_finite()) {
            return Err(VerifyError::Options(format!("Δ must be positive, got {big_delta}")));
        }
        let mut ctx = Context {
            suite,
            tol,
            big_delta,
            schedule: None,
            window: Vec::new(),
        };
        match suite {
            Suite::Trichotomy => {
                let s = schedule(TRICHOTOMY_KMAX, big_delta).map_err(|e| VerifyError::Setup(e.to_string()))?;
                ctx.schedule = Some(s);
            }
            Suite::Window => {
                for n in [2, 3] {
                    let graphs = enumerate_n_graphs(n).map_err(|e| VerifyError::Setup(e.to_string()))?;
                    for g in graphs {
                        let paths = reduced_closed_paths(&g, WINDOW_MAX_LEN);
                        ctx.window.push((g, n, paths));
                    }
                }
            }
            _ => {}
        }
        Ok(ctx)
    }

    fn trial(&self, seed: u64, trial: u64) -> Result<Stats, TrialError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        match self.suite {
            Suite::ThinTriangles => self.thin_triangles(&mut rng),
            Suite::Prop42 => prop42_trial(&mut rng),
            Suite::Shortcut => self.shortcut(&mut rng, trial),
            Suite::Trichotomy => self.trichotomy(&mut rng),
            Suite::Steiner => self.steiner(&mut rng, trial),
            Suite::Window => self.window(&mut rng, trial),
            Suite::Metric => self.metric(&mut rng),
        }
    }

    fn thin_triangles(&self, rng: &mut ChaCha8Rng) -> Result<Stats, TrialError> {
        let [a, b, c] = [0; 3].map(|_| random_point(rng, 10.0));
        let gap = thin_triangle_gap(&a, &b, &c, THIN_SAMPLES);
        let bound = self.big_delta + self.tol;
        if !(gap <= bound) {
            return fail(json!({ "triangle": [a, b, c] }), format!("gap {gap} exceeds {bound}"));
        }
        Ok(vec![("max_gap", Fold::Max, gap)])
    }

    fn shortcut(&self, rng: &mut ChaCha8Rng, trial: u64) -> Result<Stats, TrialError> {
        let delta = [0.0, 0.5, 1.0][(trial % 3) as usize];
        let pair = random_admissible_pair(rng, delta, self.big_delta)
            .map_err(|e| TrialError { input: json!({ "delta": delta }), message: e.to_string() })?;
        let input = || json!({ "delta": delta, "a": pair.a, "b": pair.b });
        let c = match short_cut(&pair.a, &pair.b, delta, self.big_delta) {
            Ok(c) => c,
            Err(e) => return fail(input(), e.to_string()),
        };
        if let Err(e) = c.verify_on(&pair.a, &pair.b) {
            return fail(input(), e);
        }
        if !(c.gain > self.big_delta + self.tol) {
            return fail(input(), format!("gain {} not above Δ + tol", c.gain));
        }
        Ok(vec![
            ("min_gain", Fold::Min, c.gain),
            ("max_d_e_f", Fold::Max, c.d_e_f),
        ])
    }

    fn trichotomy(&self, rng: &mut ChaCha8Rng) -> Result<Stats, TrialError> {
        let s = self.schedule.as_ref().expect("schedule is built for this suite");
        let inst = random_instance(rng, TRICHOTOMY_KMAX, s)
            .map_err(|e| TrialError { input: Value::Null, message: e.to_string() })?;
        let input = || serde_json::to_value(&inst).unwrap_or(Value::Null);
        let out = match trichotomy(&inst.path, inst.a, inst.b, s) {
            Ok(o) => o,
            Err(e) => return fail(input(), e.to_string()),
        };
        if let Err(e) = out.verify(&inst.path) {
            return fail(input(), e);
        }
        Ok(match out {
            crate::lift::Trichotomy::Escape { .. } => vec![("escapes", Fold::Sum, 1.0)],
            crate::lift::Trichotomy::ShortCut { certificate, .. } => {
                if !(certificate.gain > self.big_delta + self.tol) {
                    return fail(input(), format!("gain {} not above Δ + tol", certificate.gain));
                }
                vec![("short_cuts", Fold::Sum, 1.0), ("min_gain", Fold::Min, certificate.gain)]
            }
        })
    }

    fn steiner(&self, rng: &mut ChaCha8Rng, trial: u64) -> Result<Stats, TrialError> {
        let c = random_three_terminal(rng);
        let terminals = [c.position(0), c.position(1), c.position(2)];
        let input = || json!({ "terminals": terminals });
        let r = match optimize(&c, &Default::default()) {
            Ok(r) => r,
            Err(e) => return fail(input(), e.to_string()),
        };
        let best_star = star_candidates(&terminals).into_iter().fold(f64::INFINITY, f64::min);
        if !(r.final_length <= best_star + 1e-12) {
            return fail(input(), format!("length {} above the best star {best_star}", r.final_length));
        }
        let mut stats: Stats = vec![];
        match y_report(&r.config) {
            Ok(y) => {
                let dev = y.max_angle_deviation_deg();
                if !(dev <= self.tol) {
                    return fail(input(), format!("angle deviation {dev}° above {}°", self.tol));
                }
                if !(y.max_residual() < 1e-6) {
                    return fail(input(), format!("coplanarity residual {}", y.max_residual()));
                }
                stats.push(("max_angle_deviation_deg", Fold::Max, dev));
                stats.push(("max_residual", Fold::Max, y.max_residual()));
            }
            Err(SteinerError::ZeroEdge { edge, .. }) => {
                // The free vertex merged with a terminal, which then needs an
                // angle of at least 120° between the other two.
                let t = terminals[r.config.edges()[edge].0.min(r.config.edges()[edge].1)];
                let others: Vec<HPoint> = terminals.iter().copied().filter(|p| dist(p, &t) > 1e-9).collect();
                let ang = crate::geom::angle(&t, &others[0], &others[1])
                    .map_err(|e| TrialError { input: input(), message: e.to_string() })?;
                if !(ang.to_degrees() >= 120.0 - self.tol) {
                    return fail(input(), format!("collapsed at a terminal with angle {}°", ang.to_degrees()));
                }
                stats.push(("collapsed", Fold::Sum, 1.0));
            }
            Err(e) => return fail(input(), e.to_string()),
        }
        // One point of the corner-cut sign grid per trial.
        let gamma = corner_grid(trial % 100);
        let len = rng.gen_range(0.1..5.0);
        let cut = corner_shortcut(len, gamma)
            .map_err(|e| TrialError { input: json!({ "c": len, "gamma": gamma }), message: e.to_string() })?;
        let ok = if (gamma - 2.0 * PI / 3.0).abs() < 1e-15 {
            cut.gain.abs() <= 1e-9
        } else if gamma < 2.0 * PI / 3.0 {
            cut.gain > 0.0
        } else {
            cut.gain <= 0.0
        };
        if !ok {
            return fail(json!({ "c": len, "gamma": gamma }), format!("corner gain {} has the wrong sign", cut.gain));
        }
        stats.push(("max_final_length", Fold::Max, r.final_length));
        Ok(stats)
    }

    fn window(&self, rng: &mut ChaCha8Rng, trial: u64) -> Result<Stats, TrialError> {
        let (g, n, paths) = &self.window[(trial % self.window.len() as u64) as usize];
        let raw: Vec<f64> = (0..g.edge_count()).map(|_| 10f64.powf(rng.gen_range(-1.0..1.0))).collect();
        let w = LengthAssignment::new(g, raw).map_err(|e| TrialError { input: Value::Null, message: e.to_string() })?;
        let (girth, _) = girth_length(g, &w);
        let w = w.scaled(1.0 / girth);
        let (bound, _) = girth_length(g, &w);
        let input = |p: Option<&DirectedEdgePath>| json!({ "graph": g, "n": n, "lengths": w, "path": p });
        for p in paths {
            match window_long_edge_check(g, &w, p, *n, bound) {
                Ok(WindowOutcome::Pass) => {}
                Ok(v) => return fail(input(Some(p)), format!("window violation {}", json!(v))),
                Err(e) => return fail(input(Some(p)), e.to_string()),
            }
        }
        Ok(vec![("paths_checked", Fold::Sum, paths.len() as f64)])
    }

    fn metric(&self, rng: &mut ChaCha8Rng) -> Result<Stats, TrialError> {
        let (p, q) = (random_point(rng, 3.0), random_point(rng, 3.0));
        let d = dist(&p, &q);
        let oracle = line_element_length(&p.ball(), &q.ball());
        let err = (d - oracle).abs();
        if !(err <= self.tol) {
            return fail(json!({ "p": p, "q": q }), format!("dist {d} vs integral {oracle}"));
        }
        let theta = rng.gen_range(0.01..FRAC_PI_2 - 0.01);
        let exit = ray_exit_length(theta);
        let bisected = bisect_exit(theta);
        let exit_err = (exit - bisected).abs();
        if !(exit_err <= 1e-9) {
            return fail(json!({ "theta": theta }), format!("exit length {exit} vs bisection {bisected}"));
        }
        Ok(vec![("max_dist_error", Fold::Max, err), ("max_exit_error", Fold::Max, exit_err)])
    }
}

fn prop42_trial(rng: &mut ChaCha8Rng) -> Result<Stats, TrialError> {
    let (x, y, l) = random_prop42_instance(rng, 12);
    let input = || json!({ "x": x, "y": y, "l": l });
    let c = match prop42_select(&x, &y, &l) {
        Ok(c) => c,
        Err(e) => return fail(input(), e.to_string()),
    };
    if let Err(e) = prop42_check(&x, &y, &l, &c) {
        return fail(input(), e);
    }
    let oracle = prop42_oracle(&x, &y, &l);
    match c {
        Prop42Case::Case1 { r, s } if oracle.first() != Some(&(r, s)) => {
            fail(input(), format!("selected ({r}, {s}), oracle {:?}", oracle.first()))
        }
        Prop42Case::Case2 { .. } if !oracle.is_empty() => {
            fail(input(), format!("second case chosen, oracle has {:?}", oracle[0]))
        }
        Prop42Case::Case1 { .. } => Ok(vec![("case1", Fold::Sum, 1.0)]),
        Prop42Case::Case2 { .. } => Ok(vec![("case2", Fold::Sum, 1.0)]),
    }
}

/// Point at a uniform random direction and hyperbolic radius in `[0, r]`.
fn random_point(rng: &mut ChaCha8Rng, r: f64) -> HPoint {
    let u = loop {
        let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            break v / n;
        }
    };
    exp_map(&HPoint::origin(), &u, rng.gen_range(0.0..r)).expect("unit direction")
}

/// Corner angles of the sign grid: 100 points in `(0, π)` including 120°.
pub fn corner_grid(i: u64) -> f64 {
    if i == 66 {
        2.0 * PI / 3.0
    } else {
        PI * (i as f64 + 0.5) / 100.0
    }
}

/// Hyperbolic length of the ball-model geodesic from `p` to `q`, by
/// integrating `2|dx| / (1 - |x|²)` along the Euclidean arc orthogonal to
/// the unit sphere.
pub fn line_element_length(p: &Vector3<f64>, q: &Vector3<f64>) -> f64 {
    // The geodesic lies on the circle through p, q and the inversion p/|p|²
    // (or q/|q|²), unless it is a diameter.
    let (a, b) = if p.norm() >= q.norm() { (p, q) } else { (q, p) };
    let inv = a / a.norm_squared();
    let ab = b - a;
    let ai = inv - a;
    let n = ab.cross(&ai);
    let curve: Box<dyn Fn(f64) -> (Vector3<f64>, f64)> = if a.norm() < 1e-12 || n.norm() < 1e-12 * ab.norm() * ai.norm() {
        let d = ab;
        Box::new(move |s| (a + d * s, d.norm()))
    } else {
        // Circumcentre of a, b, inv.
        let c = a + (n.cross(&ab) * ai.norm_squared() + ai.cross(&n) * ab.norm_squared()) / (2.0 * n.norm_squared());
        let r = (a - c).norm();
        let e1 = (a - c) / r;
        let e2 = n.cross(&e1).normalize();
        let ang = |x: &Vector3<f64>| {
            let v = x - c;
            v.dot(&e2).atan2(v.dot(&e1))
        };
        let mut phi_b = ang(b);
        let phi_i = ang(&inv);
        // Take the arc from a to b that avoids the inverse point.
        let between = |x: f64, end: f64| if end >= 0.0 { x > 0.0 && x < end } else { x < 0.0 && x > end };
        if between(phi_i, phi_b) || between(phi_i - 2.0 * PI, phi_b) || between(phi_i + 2.0 * PI, phi_b) {
            phi_b -= phi_b.signum() * 2.0 * PI;
        }
        Box::new(move |s| {
            let t = phi_b * s;
            (c + (e1 * t.cos() + e2 * t.sin()) * r, r * phi_b.abs())
        })
    };
    // Composite 5-point Gauss-Legendre on [0, 1].
    const NODES: [(f64, f64); 5] = [
        (0.0, 0.568_888_888_888_888_9),
        (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    const PANELS: usize = 256;
    let h = 1.0 / PANELS as f64;
    let mut total = 0.0;
    for k in 0..PANELS {
        let mid = (k as f64 + 0.5) * h;
        for (x, w) in NODES {
            let (pt, speed) = curve(mid + 0.5 * h * x);
            total += 0.5 * h * w * 2.0 * speed / (1.0 - pt.norm_squared());
        }
    }
    total
}

/// Exit length of the ray at angle `theta` from `(-1, 0, 0)`, by bisection
/// on the sign of the membership margin alone.
pub fn bisect_exit(theta: f64) -> f64 {
    let o = HPoint::origin();
    let u = Vector3::new(-theta.cos(), theta.sin(), 0.0);
    let outside = |t: f64| exp_map(&o, &u, t).map_or(true, |p| horoball_contains(&p).margin > 0.0);
    let (mut lo, mut hi) = (0.0, 1.0);
    while !outside(hi) && hi < 500.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if outside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-14 * (1.0 + hi) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn thread_pool() -> Result<rayon::ThreadPool, VerifyError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| VerifyError::Options(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(VerifyError::Options(format!("{THREADS_ENV} must be positive")));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| VerifyError::Setup(e.to_string()))
}

/// Runs `opts.trials` seeded trials of `suite` in parallel.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<VerificationReport, VerifyError> {
    let ctx = Context::new(suite, opts.tol, opts.big_delta)?;
    let pool = thread_pool()?;
    let results: Vec<Result<Stats, TrialError>> =
        pool.install(|| (0..opts.trials).into_par_iter().map(|t| ctx.trial(opts.seed, t)).collect());

    let mut stats: BTreeMap<String, f64> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut failure_count = 0u64;
    for (t, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => {
                for (name, fold, v) in s {
                    stats
                        .entry(name.to_string())
                        .and_modify(|acc| {
                            *acc = match fold {
                                Fold::Max => acc.max(v),
                                Fold::Min => acc.min(v),
                                Fold::Sum => *acc + v,
                            }
                        })
                        .or_insert(v);
                }
            }
            Err(e) => {
                failure_count += 1;
                if failures.len() < MAX_REPORTED_FAILURES {
                    failures.push(Failure {
                        suite,
                        seed: opts.seed,
                        trial: t as u64,
                        tol: opts.tol,
                        big_delta: opts.big_delta,
                        input: e.input,
                        message: e.message,
                    });
                }
            }
        }
    }
    Ok(VerificationReport {
        suite,
        seed: opts.seed,
        trials: opts.trials,
        tol: opts.tol,
        big_delta: opts.big_delta,
        failure_count,
        failures,
        stats,
        pass: failure_count == 0,
    })
}

/// Runs the trial named by a failure again. Returns the new failure, or
/// `None` if the trial now passes.
pub fn replay(f: &Failure) -> Result<Option<Failure>, VerifyError> {
    let ctx = Context::new(f.suite, f.tol, f.big_delta)?;
    Ok(ctx.trial(f.seed, f.trial).err().map(|e| Failure {
        input: e.input,
        message: e.message,
        ..f.clone()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(suite: Suite, trials: u64) -> VerificationReport {
        let opts = VerifyOptions {
            trials,
            ..VerifyOptions::new(suite, 3)
        };
        run_suite(suite, &opts).unwrap()
    }

    #[test]
    fn every_suite_passes_a_short_run() {
        for s in Suite::ALL {
            let r = quick(s, 30);
            assert!(r.pass, "{s}: {:?}", r.failures.first());
            assert_eq!(r.trials, 30);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        for s in [Suite::ThinTriangles, Suite::Shortcut, Suite::Prop42] {
            let a = serde_json::to_string(&quick(s, 40)).unwrap();
            let b = serde_json::to_string(&quick(s, 40)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn failures_replay() {
        let opts = VerifyOptions {
            trials: 20,
            tol: -0.8,
            ..VerifyOptions::new(Suite::ThinTriangles, 5)
        };
        let r = run_suite(Suite::ThinTriangles, &opts).unwrap();
        assert!(!r.pass);
        assert_eq!(r.failure_count as usize, r.failures.len());
        let f = &r.failures[0];
        let json = serde_json::to_string(f).unwrap();
        let back: Failure = serde_json::from_str(&json).unwrap();
        assert_eq!(replay(&back).unwrap().as_ref(), Some(f));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(serde_json::to_value(s).unwrap(), json!(s.name()));
        }
        assert!(matches!("nope".parse::<Suite>(), Err(VerifyError::UnknownSuite(_))));
    }

    #[test]
    fn line_element_matches_closed_forms() {
        let o = Vector3::zeros();
        let x = Vector3::new(0.5, 0.0, 0.0);
        assert!((line_element_length(&o, &x) - 3f64.ln()).abs() < 1e-10);
        let p = Vector3::new(0.3, -0.2, 0.1);
        let q = Vector3::new(-0.4, 0.5, 0.2);
        let d = dist(&HPoint::from_ball(p).unwrap(), &HPoint::from_ball(q).unwrap());
        assert!((line_element_length(&p, &q) - d).abs() < 1e-10);
        assert!((line_element_length(&q, &p) - d).abs() < 1e-10);
    }

    #[test]
    fn bisection_matches_exit_length() {
        for theta in [0.1, PI / 6.0, PI / 3.0, 1.5] {
            assert!((bisect_exit(theta) - ray_exit_length(theta)).abs() < 1e-9);
        }
    }

    #[test]
    fn bad_options_are_rejected() {
        let mut o = VerifyOptions::new(Suite::Metric, 1);
        o.big_delta = 0.0;
        assert!(matches!(run_suite(Suite::Metric, &o), Err(VerifyError::Options(_))));
    }
}
