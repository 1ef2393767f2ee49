//! Disc-model SVG: the unit disc, the horoball 𝒲, path edges as projected
//! polylines and marked certificate points.

use std::fmt::Write as _;

use clap::ValueEnum;
use h3bound::geom::{GeodesicSegment, HPoint};
use h3bound::lift::Geodesic120Path;
use nalgebra::Vector3;
use serde_json::Value;

pub const SAMPLES_PER_EDGE: usize = 64;
const SCALE: f64 = 200.0;
/// Beyond this distance from its base a sample is on the sphere at pixel
/// resolution.
const CLIP: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Plane {
    Xy,
    Xz,
    Yz,
}

impl Plane {
    fn project(self, v: &Vector3<f64>) -> (f64, f64) {
        match self {
            Plane::Xy => (v[0], v[1]),
            Plane::Xz => (v[0], v[2]),
            Plane::Yz => (v[1], v[2]),
        }
    }
}

struct Mark {
    label: &'static str,
    point: HPoint,
}

fn parse<T: for<'de> serde::Deserialize<'de>>(v: &Value, what: &str) -> Result<T, String> {
    serde_json::from_value(v.clone()).map_err(|e| format!("{what}: {e}"))
}

/// Finds the path and the marked points in any of the documents the other
/// commands write: a bare path, a path with long-edge indices, a `lift` or
/// `shortcut` report, or a bare certificate.
fn extract(doc: &Value) -> Result<(Option<Geodesic120Path>, Vec<GeodesicSegment>, Vec<Mark>), String> {
    let obj = doc.as_object().ok_or("expected a JSON object")?;
    let path = if let Some(p) = obj.get("path") {
        Some(parse::<Geodesic120Path>(p, "path")?)
    } else if obj.contains_key("lengths") {
        Some(parse::<Geodesic120Path>(doc, "path")?)
    } else {
        None
    };
    let mut extra = Vec::new();
    for key in ["a", "b"] {
        if let Some(v) = obj.get(key).filter(|v| v.is_object()) {
            extra.push(parse::<GeodesicSegment>(v, key)?);
        }
    }
    let mut marks = Vec::new();
    let mut push = |label: &'static str, v: Option<&Value>| -> Result<(), String> {
        if let Some(v) = v {
            marks.push(Mark {
                label,
                point: parse(v, label)?,
            });
        }
        Ok(())
    };
    let result = obj.get("result").or_else(|| obj.get("containment"));
    // Trichotomy results nest the witness; containment results flatten it.
    if let Some(r) = result {
        push("witness", r.get("witness").unwrap_or(r).get("point"))?;
    }
    let cert = result
        .and_then(|r| r.get("certificate"))
        .or_else(|| obj.get("certificate"))
        .or_else(|| obj.contains_key("e1").then_some(doc));
    if let Some(c) = cert {
        for (label, key) in [("e", "e"), ("f", "f"), ("e1", "e1"), ("e2", "e2")] {
            push(label, c.get(key))?;
        }
    }
    if path.is_none() && extra.is_empty() && marks.is_empty() && !obj.is_empty() {
        return Err("no path, segments or certificate points found".into());
    }
    Ok((path, extra, marks))
}

fn px(x: f64) -> String {
    format!("{:.3}", x * SCALE)
}

/// Samples of a segment in ball coordinates, skipping the part too far out
/// to show.
fn polyline(seg: &GeodesicSegment) -> Vec<Vector3<f64>> {
    let (t0, t1) = seg.interval();
    let (a, b) = (t0.max(-CLIP), t1.min(CLIP));
    if a > b {
        return Vec::new();
    }
    (0..SAMPLES_PER_EDGE)
        .filter_map(|i| {
            let t = a + (b - a) * i as f64 / (SAMPLES_PER_EDGE - 1) as f64;
            seg.at(t).ok().map(|p| p.ball())
        })
        .collect()
}

/// SVG document for `doc` projected onto `plane`. Output depends only on
/// the input.
pub fn render(doc: &Value, plane: Plane) -> Result<String, String> {
    let (path, extra, marks) = extract(doc)?;
    let mut s = String::new();
    let half = 1.1 * SCALE;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="{:.0}" height="{:.0}">"#,
        px(-1.1),
        px(-1.1),
        px(2.2),
        px(2.2),
        2.0 * half,
        2.0 * half
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)">"#);
    let _ = writeln!(
        s,
        r#"<circle id="disc" cx="0.000" cy="0.000" r="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        px(1.0)
    );
    let (hx, hy) = plane.project(&Vector3::new(-0.5, 0.0, 0.0));
    let _ = writeln!(
        s,
        r##"<circle id="horoball" cx="{}" cy="{}" r="{}" fill="#dde8f5" fill-opacity="0.5" stroke="#3366aa" stroke-width="1"/>"##,
        px(hx),
        px(hy),
        px(0.5)
    );
    let mut segments: Vec<(String, GeodesicSegment)> = Vec::new();
    if let Some(p) = &path {
        for (i, seg) in p.segments().iter().enumerate() {
            segments.push((format!("edge-{i}"), *seg));
        }
    }
    for (i, seg) in extra.iter().enumerate() {
        segments.push((format!("segment-{}", ["a", "b"][i]), *seg));
    }
    for (id, seg) in &segments {
        let pts = polyline(seg);
        if pts.is_empty() {
            continue;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|v| {
                let (x, y) = plane.project(v);
                format!("{},{}", px(x), px(y))
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline id="{id}" points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
    }
    if let Some(p) = &path {
        for v in p.vertices().iter().flatten() {
            let (x, y) = plane.project(&v.ball());
            let _ = writeln!(s, r#"<circle class="vertex" cx="{}" cy="{}" r="2" fill="black"/>"#, px(x), px(y));
        }
    }
    for m in &marks {
        let (x, y) = plane.project(&m.point.ball());
        let colour = match m.label {
            "witness" => "#cc2222",
            "e" | "f" => "#228833",
            _ => "#aa7700",
        };
        let _ = writeln!(
            s,
            r##"<circle class="mark" data-label="{}" cx="{}" cy="{}" r="4" fill="{colour}"/>"##,
            m.label,
            px(x),
            px(y)
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}
