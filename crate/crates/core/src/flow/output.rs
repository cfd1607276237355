//! CSV and SVG output for trajectories.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::torus::{normalize_to_fundamental_domain, MarkovPoint};

use super::Trajectory;

/// Writes `t, x, y, z, syst, l_min` rows with a header.
pub fn write_csv<S: Real, W: Write>(traj: &Trajectory<S>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["t", "x", "y", "z", "syst", "l_min"]).map_err(io)?;
    for s in &traj.samples {
        let row = [s.t, s.point.x(), s.point.y(), s.point.z(), s.syst, s.l_min];
        w.write_record(row.iter().map(|v| format!("{:e}", v.as_f64()))).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

/// Plot window: normalized `x` against `log y`.
const X_RANGE: (f64, f64) = (2.0, 3.05);
const Y_MAX: f64 = 60.0;
const SIZE: (f64, f64) = (640.0, 480.0);
const MARGIN: f64 = 40.0;

fn to_px(x: f64, y: f64) -> (f64, f64) {
    let (w, h) = (SIZE.0 - 2.0 * MARGIN, SIZE.1 - 2.0 * MARGIN);
    let u = (x - X_RANGE.0) / (X_RANGE.1 - X_RANGE.0);
    let v = (y.min(Y_MAX).ln() - 2f64.ln()) / (Y_MAX.ln() - 2f64.ln());
    (MARGIN + u * w, SIZE.1 - MARGIN - v * h)
}

fn polyline(out: &mut String, pts: &[(f64, f64)], style: &str) {
    if pts.len() < 2 {
        return;
    }
    let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(out, r#"<polyline points="{}" {style}/>"#, coords.join(" "));
}

/// Static figure of the fundamental domain `2 < x ≤ y ≤ z ≤ xy − z`, drawn
/// in normalized `(x, log y)`, with critical orbits as dots and trajectories
/// as polylines.
///
/// A polyline is broken wherever normalization jumps across the domain.
pub fn render_svg<S: Real>(trajectories: &[Trajectory<S>], critical: &[MarkovPoint<S>]) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        SIZE.0, SIZE.1, SIZE.0, SIZE.1
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    // sides y = x and y = x / √(x − 2) (where y = z), meeting at (3, 3)
    let n = 200;
    let mut side: Vec<(f64, f64)> = Vec::new();
    for k in 0..=n {
        let x = 2.0 + 1e-4 + (1.0 - 1e-4) * k as f64 / n as f64;
        side.push(to_px(x, x));
    }
    for k in (0..=n).rev() {
        let x = 2.0 + 1e-4 + (1.0 - 1e-4) * k as f64 / n as f64;
        side.push(to_px(x, x / (x - 2.0).sqrt()));
    }
    polyline(&mut out, &side, r##"fill="#eef" stroke="#446" stroke-width="1.5""##);
    for traj in trajectories {
        let mut run: Vec<(f64, f64)> = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for s in &traj.samples {
            let p = normalize_to_fundamental_domain(&s.point)?.point;
            let q = to_px(p.x().as_f64(), p.y().as_f64());
            if let Some(r) = prev {
                if (q.0 - r.0).hypot(q.1 - r.1) > 60.0 {
                    polyline(&mut out, &run, r##"fill="none" stroke="#c33" stroke-width="1""##);
                    run.clear();
                }
            }
            run.push(q);
            prev = Some(q);
        }
        polyline(&mut out, &run, r##"fill="none" stroke="#c33" stroke-width="1""##);
    }
    for c in critical {
        let p = normalize_to_fundamental_domain(c)?.point;
        let (x, y) = to_px(p.x().as_f64(), p.y().as_f64());
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="black"/>"#);
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
