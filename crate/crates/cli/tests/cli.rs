use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_h3bound"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn load(name: &str) -> Value {
    let text = std::fs::read_to_string(schema_dir().join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn assert_valid(schema: &str, doc: &Value) {
    let common = load("common.schema.json");
    let registry = jsonschema::Registry::new()
        .add("urn:h3bound:common", common)
        .and_then(|b| b.prepare())
        .unwrap();
    let validator = jsonschema::options().with_registry(&registry).build(&load(schema)).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}");
}

fn write_json(dir: &tempfile::TempDir, name: &str, v: &Value) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn constants_table_for_rank_two() {
    let o = run(&["constants", "--n", "2"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("2.633916") && s.contains("5.267832"), "{s}");
}

#[test]
fn constants_json_matches_table() {
    let o = run(&["constants", "--n", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_valid("constants.schema.json", &v);
    assert_eq!(format!("{:.6}", v["schedule"]["l0"].as_f64().unwrap()), "2.633916");
    assert_eq!(format!("{:.6}", v["sharp_r2"].as_f64().unwrap()), "5.267832");
    let l3 = v["schedule"]["entries"][3]["value"].as_f64().unwrap();
    assert!((v["r"].as_f64().unwrap() - 9.0 * l3).abs() < 1e-9 * l3);
}

#[test]
fn constants_rank_three_row() {
    let o = run(&["constants", "--n", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("R_3"));
    let v = json_out(&run(&["constants", "--n", "3", "--format", "json"]));
    assert_valid("constants.schema.json", &v);
    let l = |k: usize| v["schedule"]["entries"][k]["value"].as_f64().unwrap();
    let expect = (36.0 * l(6)).max(6.0 * l(5));
    assert!((v["r_n"].as_f64().unwrap() - expect).abs() < 1e-9 * expect);
    assert!(v.get("sharp_r2").is_none());
}

#[test]
fn constants_csv_has_header_and_bound_rows() {
    let s = stdout(&run(&["constants", "--n", "2", "--format", "csv"]));
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("k,L(k),provenance"));
    assert!(s.lines().any(|l| l.starts_with("R_2,")));
}

#[test]
fn constants_overflow_exits_two_with_log_table() {
    let o = run(&["constants", "--n", "40"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("[log domain]"));
    let o = run(&["constants", "--n", "40", "--format", "json"]);
    assert_eq!(code(&o), 2);
    let v = json_out(&o);
    assert_valid("constants.schema.json", &v);
    assert_eq!(v["log_domain"], json!(true));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&run(&["constants", "--n", "1"])), 64);
    assert_eq!(code(&run(&["constants", "--bogus"])), 64);
    assert_eq!(code(&run(&["constants", "--format", "svg"])), 64);
    assert_eq!(code(&run(&["verify", "no-such-suite"])), 64);
    assert_eq!(code(&run(&["verify"])), 64);
    assert_eq!(code(&run(&["graphs", "--n", "1"])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
}

#[test]
fn graphs_catalog() {
    let o = run(&["graphs", "--n", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_valid("graphs.schema.json", &v);
    assert_eq!(v["count"], json!(2));
    for g in v["graphs"].as_array().unwrap() {
        assert_eq!(g["vertices"], json!(2));
        assert_eq!(g["edges"].as_array().unwrap().len(), 3);
    }
    let loops: Vec<u64> = v["graphs"].as_array().unwrap().iter().map(|g| g["loops"].as_u64().unwrap()).collect();
    assert!(loops.contains(&0) && loops.contains(&2));
    let text = stdout(&run(&["graphs", "--n", "3"]));
    assert!(!text.trim().is_empty());
}

#[test]
fn verify_prop42_passes() {
    let o = run(&["verify", "prop42", "--seed", "7", "--trials", "10000"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_out(&o);
    assert_valid("verify.schema.json", &v);
    assert_eq!(v["pass"], json!(true));
    assert_eq!(v["trials"], json!(10000));
}

#[test]
fn verify_reports_are_byte_identical() {
    let args = ["verify", "shortcut", "--seed", "3", "--trials", "60"];
    let a = run(&args);
    let b = bin().args(args).env("H3BOUND_THREADS", "1").output().unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_text_format() {
    let o = run(&["verify", "metric", "--trials", "20", "--format", "text"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("metric seed=0 trials=20 failures=0 PASS"));
}

#[test]
fn failures_exit_one_and_replay() {
    let o = run(&["verify", "thin-triangles", "--trials", "20", "--tol", "-0.8"]);
    assert_eq!(code(&o), 1);
    let v = json_out(&o);
    assert_valid("verify.schema.json", &v);
    assert_eq!(v["pass"], json!(false));
    let count = v["failure_count"].as_u64().unwrap();
    assert!(count > 0 && v["failures"].as_array().unwrap().len() as u64 == count.min(50));

    let dir = tempfile::tempdir().unwrap();
    let f = &v["failures"][0];
    let file = write_json(&dir, "failure.json", f);
    let r = run(&["verify", "--replay", &file]);
    assert_eq!(code(&r), 1);
    let rv = json_out(&r);
    assert_valid("verify.schema.json", &rv);
    assert_eq!(rv["reproduced"], json!(true));
    assert_eq!(&rv["failure"], f);
    assert_eq!(code(&run(&["verify", "thin-triangles", "--replay", &file])), 1);
    assert_eq!(code(&run(&["verify", "metric", "--replay", &file])), 64);

    // With the default tolerance the same trial passes.
    let mut loose = f.clone();
    loose["tol"] = json!(1e-3);
    let file = write_json(&dir, "loose.json", &loose);
    let r = run(&["verify", "--replay", &file]);
    assert_eq!(code(&r), 0);
    assert_eq!(json_out(&r)["reproduced"], json!(false));
}

#[test]
fn steiner_json_and_csv() {
    let o = run(&["steiner", "--seed", "5", "--trials", "3"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_valid("steiner.schema.json", &v);
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(o.stdout, run(&["steiner", "--seed", "5", "--trials", "3"]).stdout);

    let dir = tempfile::tempdir().unwrap();
    let file = write_json(&dir, "config.json", &v[0]["result"]["config"]);
    let again = json_out(&run(&["steiner", &file]));
    let l0 = v[0]["result"]["final_length"].as_f64().unwrap();
    assert!((again[0]["result"]["final_length"].as_f64().unwrap() - l0).abs() < 1e-9);

    let csv = stdout(&run(&["steiner", "--trials", "2", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn lift_and_shortcut_outputs() {
    for seed in ["1", "2"] {
        let o = run(&["lift", "--seed", seed]);
        assert_eq!(code(&o), 0);
        assert_valid("lift.schema.json", &json_out(&o));
    }
    let o = run(&["shortcut", "--seed", "4", "--radius", "0.5"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_valid("shortcut.schema.json", &v);
    assert!(v["certificate"]["gain"].as_f64().unwrap() > v["certificate"]["big_delta"].as_f64().unwrap());

    let dir = tempfile::tempdir().unwrap();
    let file = write_json(&dir, "pair.json", &v);
    assert_eq!(code(&run(&["shortcut", &file])), 65);
    let pair = json!({ "a": v["a"], "b": v["b"], "radius": v["radius"] });
    let file = write_json(&dir, "pair.json", &pair);
    let again = json_out(&run(&["shortcut", &file, "--radius", "0.5"]));
    let gain = |d: &Value| d["certificate"]["gain"].as_f64().unwrap();
    assert!((gain(&again) - gain(&v)).abs() < 1e-9);
}

/// Path of one edge of length 2.7 from the origin at 30 degrees to the
/// horoball axis.
fn escape_example() -> Value {
    let (s, c) = (std::f64::consts::FRAC_PI_6.sin(), std::f64::consts::FRAC_PI_6.cos());
    json!({
        "anchor": {
            "position": { "ball": [0.0, 0.0, 0.0] },
            "axes": [[-c, s, 0.0], [s, c, 0.0], [0.0, 0.0, -1.0]],
        },
        "lengths": [2.7],
        "dihedrals": [],
    })
}

fn polyline_points(svg: &str) -> Vec<(f64, f64)> {
    let start = svg.find("<polyline").expect("polyline");
    let rest = &svg[start..];
    let p = rest.find("points=\"").unwrap() + 8;
    let end = rest[p..].find('"').unwrap();
    rest[p..p + end]
        .split(' ')
        .map(|xy| {
            let (x, y) = xy.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

#[test]
fn render_escape_example_crosses_horoball() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_json(&dir, "path.json", &escape_example());
    let lift = run(&["lift", &path]);
    assert_eq!(code(&lift), 0);
    let doc = json_out(&lift);
    assert_valid("lift.schema.json", &doc);
    assert_eq!(doc["containment"]["result"], json!("escape"));
    let report = write_json(&dir, "lift.json", &doc);

    let o = run(&["render", &report]);
    assert_eq!(code(&o), 0);
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    let pts = polyline_points(&svg);
    assert_eq!(pts.len(), 64);
    // Horoball circle: centre (-100, 0), radius 100 in pixels.
    let inside = |&(x, y): &(f64, f64)| (x + 100.0).hypot(y) < 100.0;
    assert!(pts.iter().any(inside) && !pts.iter().all(inside));
    assert!(svg.contains(r#"data-label="witness""#));
    assert_eq!(o.stdout, run(&["render", &report]).stdout);

    // The bare path renders the same polyline.
    let bare = stdout(&run(&["render", &path, "--plane", "xy"]));
    assert_eq!(polyline_points(&bare), pts);
}

#[test]
fn render_empty_and_malformed() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_json(&dir, "empty.json", &json!({}));
    let o = run(&["render", &empty]);
    assert_eq!(code(&o), 0);
    let svg = stdout(&o);
    assert!(svg.contains(r#"id="disc""#) && svg.contains(r#"id="horoball""#));
    assert!(!svg.contains("polyline") && !svg.contains("class="));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&run(&["render", bad.to_str().unwrap()])), 65);
    let wrong = write_json(&dir, "wrong.json", &json!({ "lengths": [1.0], "dihedrals": [] }));
    assert_eq!(code(&run(&["render", &wrong])), 65);
    assert_eq!(code(&run(&["render", "/nonexistent/input.json"])), 65);
    assert_eq!(code(&run(&["render", &empty, "--format", "json"])), 64);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("constants.json");
    let o = run(&["constants", "--format", "json", "--out", target.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_valid("constants.schema.json", &v);
    let missing = dir.path().join("no/such/dir/x.json");
    assert_eq!(code(&run(&["constants", "--out", missing.to_str().unwrap()])), 64);
}
