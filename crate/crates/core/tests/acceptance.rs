//! Acceptance criteria, one line each. Runs without the test harness so the
//! lines always show; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use h3bound::bounds::l0;
use h3bound::geom::DEFAULT_DELTA;
use h3bound::graphs::{edge_count, enumerate_n_graphs};
use h3bound::verify::{run_suite, Suite, VerificationReport, VerifyOptions};

const SEED: u64 = 1;

type Outcome = Result<String, String>;

fn suite(s: Suite) -> Result<VerificationReport, String> {
    let r = run_suite(s, &VerifyOptions::new(s, SEED)).map_err(|e| e.to_string())?;
    if r.trials != s.default_trials() {
        return Err(format!("ran {} trials, expected {}", r.trials, s.default_trials()));
    }
    if !r.pass {
        let first = r.failures.first().map(|f| f.message.as_str()).unwrap_or("");
        return Err(format!("{} of {} trials failed; first: {first}", r.failure_count, r.trials));
    }
    Ok(r)
}

fn stat(r: &VerificationReport, key: &str) -> f64 {
    r.stats.get(key).copied().unwrap_or(f64::NAN)
}

fn constants() -> Outcome {
    let v = l0();
    if (v - 2.6338).abs() > 2e-4 {
        return Err(format!("L0 = {v:.6} is not within 2e-4 of 2.6338"));
    }
    if (2.0 * v - 5.2676).abs() > 3e-4 {
        return Err(format!("2 L0 = {:.6} is not within 3e-4 of 5.2676", 2.0 * v));
    }
    Ok(format!("L0 = {v:.6}, 2 L0 = {:.6}", 2.0 * v))
}

fn graph_catalog() -> Outcome {
    let n = 2;
    let gs = enumerate_n_graphs(n).map_err(|e| e.to_string())?;
    if gs.len() != 2 {
        return Err(format!("{} classes", gs.len()));
    }
    let e = edge_count(n).map_err(|e| e.to_string())?;
    for g in &gs {
        if g.vertex_count() != 2 * (n - 1) || g.edge_count() != e || 2 * g.edge_count() != 3 * g.vertex_count() {
            return Err(format!("{} vertices, {} edges", g.vertex_count(), g.edge_count()));
        }
    }
    let mut loops: Vec<usize> = gs
        .iter()
        .map(|g| (0..g.edge_count()).filter(|&i| g.is_loop(i)).count())
        .collect();
    loops.sort();
    if loops != [0, 2] {
        return Err(format!("loop counts {loops:?}, expected theta and dumbbell"));
    }
    Ok("theta and dumbbell, 2 vertices and 3 edges each".into())
}

fn prop42() -> Outcome {
    let r = suite(Suite::Prop42)?;
    Ok(format!(
        "{} instances, {} case 1, {} case 2, 0 mismatches",
        r.trials,
        stat(&r, "case1"),
        stat(&r, "case2")
    ))
}

fn shortcut() -> Outcome {
    let r = suite(Suite::Shortcut)?;
    let g = stat(&r, "min_gain");
    if !(g > DEFAULT_DELTA) {
        return Err(format!("min gain {g}"));
    }
    Ok(format!("{} certificates over delta in {{0, 0.5, 1}}, min gain {g:.4}", r.trials))
}

fn trichotomy() -> Outcome {
    let r = suite(Suite::Trichotomy)?;
    Ok(format!(
        "{} paths: {} escapes, {} short cuts, all re-validated",
        r.trials,
        stat(&r, "escapes"),
        stat(&r, "short_cuts")
    ))
}

fn steiner() -> Outcome {
    let r = suite(Suite::Steiner)?;
    Ok(format!(
        "{} instances, max angle deviation {:.2e} deg, max residual {:.2e}, corner grid signs hold",
        r.trials,
        stat(&r, "max_angle_deviation_deg"),
        stat(&r, "max_residual")
    ))
}

fn thin_triangles() -> Outcome {
    let r = suite(Suite::ThinTriangles)?;
    let gap = stat(&r, "max_gap");
    if !(gap <= 0.8814 + 1e-3) {
        return Err(format!("max gap {gap}"));
    }
    Ok(format!("{} triangles, max gap {gap:.5}", r.trials))
}

fn metric() -> Outcome {
    let r = suite(Suite::Metric)?;
    Ok(format!("{} pairs and {} angles agree", r.trials, r.trials))
}

fn window() -> Outcome {
    let r = suite(Suite::Window)?;
    Ok(format!("{} length assignments over 7 graphs, 0 violations", r.trials))
}

fn determinism() -> Outcome {
    for s in Suite::ALL {
        let mut opts = VerifyOptions::new(s, 11);
        opts.trials = (s.default_trials() / 20).max(100);
        let a = run_suite(s, &opts).map_err(|e| e.to_string())?;
        let b = run_suite(s, &opts).map_err(|e| e.to_string())?;
        let (a, b) = (serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        if a != b {
            return Err(format!("{s} reports differ"));
        }
    }
    Ok(format!("{} suites re-run with identical bytes", Suite::ALL.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("constant reproduction", constants, Duration::from_millis(1)),
        ("graph catalog", graph_catalog, Duration::from_secs(1)),
        ("case selection oracle equivalence", prop42, Duration::from_secs(10)),
        ("short-cut soundness", shortcut, Duration::from_secs(60)),
        ("trichotomy", trichotomy, Duration::from_secs(120)),
        ("steiner and Y-certificates", steiner, Duration::from_secs(60)),
        ("thin triangles", thin_triangles, Duration::from_secs(60)),
        ("metric oracle", metric, Duration::from_secs(10)),
        ("window property", window, Duration::from_secs(60)),
        ("determinism", determinism, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let out = match out {
            Ok(d) if took > limit => Err(format!("{d}; took {took:.2?}, limit {limit:.0?}")),
            o => o,
        };
        match out {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d} [{took:.2?}]", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d} [{took:.2?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
