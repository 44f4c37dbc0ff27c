//! Planar traces of the kernel and image solvers for the browser page in `www/`.
//!
//! Every entry point takes and returns JSON text, so the same functions run
//! natively in tests and behind `wasm_bindgen` in the page.

use conic_rescale::conditioning::condition_report;
use conic_rescale::image::{ImageEvent, ImageSolver};
use conic_rescale::kernel::{KernelEvent, KernelSolver};
use conic_rescale::linalg::{norm, Matrix};
use conic_rescale::report::default_epsilon;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

pub const MAX_FRAMES: usize = 2000;

#[derive(Deserialize)]
struct Request {
    columns: Vec<Vec<f64>>,
    #[serde(default = "default_steps")]
    max_steps: usize,
    epsilon: Option<f64>,
}

fn default_steps() -> usize {
    400
}

#[derive(Serialize)]
struct KernelFrame {
    event: &'static str,
    cosine: Option<f64>,
    column: Option<usize>,
    /// Current columns scaled to unit length.
    columns: Vec<[f64; 2]>,
    hull: Vec<[f64; 2]>,
    /// `hull ∩ −hull`, whose area grows by a constant factor per rescaling.
    core: Vec<[f64; 2]>,
    /// `y / ‖y‖`, absent when `y = 0`.
    y_dir: Option<[f64; 2]>,
    area: f64,
    rescalings: u64,
}

#[derive(Serialize)]
struct KernelTrace {
    epsilon: f64,
    status: &'static str,
    frames: Vec<KernelFrame>,
    x: Vec<f64>,
    support: Vec<usize>,
}

#[derive(Serialize)]
struct ImageFrame {
    event: &'static str,
    /// Row-major `R`; the page draws `{z : zᵀRz ≤ 1}`.
    r: [f64; 4],
    log_det: f64,
    fo_iterations: Option<usize>,
    rescalings: u64,
}

#[derive(Serialize)]
struct ImageTrace {
    epsilon: f64,
    status: &'static str,
    columns: Vec<[f64; 2]>,
    frames: Vec<ImageFrame>,
    y: Option<Vec<f64>>,
}

fn parse(input: &str) -> Result<(Matrix, Request), String> {
    let req: Request = serde_json::from_str(input).map_err(|e| format!("bad request: {e}"))?;
    if req.columns.is_empty() {
        return Err("no columns".into());
    }
    let a = Matrix::from_columns(&req.columns).map_err(|e| e.to_string())?;
    Ok((a, req))
}

fn planar(input: &str) -> Result<(Matrix, Request), String> {
    let (a, req) = parse(input)?;
    if a.rows() != 2 {
        return Err(format!("the traces are drawn in the plane; columns have {} entries", a.rows()));
    }
    Ok((a, req))
}

fn unit2(v: &[f64]) -> Option<[f64; 2]> {
    let n = norm(v);
    (n > 0.0).then(|| [v[0] / n, v[1] / n])
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull of planar points (monotone chain).
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        if pass == 1 {
            p.reverse();
        }
        for &q in &p {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull
}

pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let k = poly.len();
    (0..k).map(|i| cross([0.0, 0.0], poly[i], poly[(i + 1) % k])).sum::<f64>().abs() / 2.0
}

/// Intersection of two counter-clockwise convex polygons (Sutherland-Hodgman).
pub fn clip(subject: &[[f64; 2]], window: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut out = subject.to_vec();
    for i in 0..window.len() {
        if out.is_empty() {
            break;
        }
        let (a, b) = (window[i], window[(i + 1) % window.len()]);
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let (p, q) = (input[j], input[(j + 1) % input.len()]);
            let (cp, cq) = (cross(a, b, p), cross(a, b, q));
            if cp >= 0.0 {
                out.push(p);
            }
            if (cp >= 0.0) != (cq >= 0.0) {
                let t = cp / (cp - cq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
    }
    out
}

/// `conv(P) ∩ −conv(P)`, empty when either hull is degenerate.
pub fn symmetric_core(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let neg: Vec<[f64; 2]> = points.iter().map(|p| [-p[0], -p[1]]).collect();
    let (h, g) = (convex_hull(points), convex_hull(&neg));
    if h.len() < 3 || g.len() < 3 {
        return Vec::new();
    }
    clip(&h, &g)
}

fn kernel_frame(s: &KernelSolver, event: &KernelEvent) -> KernelFrame {
    let cur = s.current_columns();
    let columns: Vec<[f64; 2]> = (0..cur.cols()).filter_map(|j| unit2(&cur.column(j))).collect();
    let (name, cosine, column) = match event {
        KernelEvent::Dv { column, cosine } => ("dv", Some(*cosine), Some(*column)),
        KernelEvent::Rescale { cosine, .. } => ("rescale", Some(*cosine), None),
        KernelEvent::Done => ("done", None, None),
        KernelEvent::Stalled => ("stalled", None, None),
    };
    let core = symmetric_core(&columns);
    KernelFrame {
        event: name,
        cosine,
        column,
        area: polygon_area(&core),
        hull: convex_hull(&columns),
        core,
        columns,
        y_dir: unit2(s.y()),
        rescalings: s.rescalings(),
    }
}

/// Runs the full-support kernel solver step by step. Request:
/// `{"columns": [[a, b], ...], "max_steps": 400, "epsilon": null}`.
pub fn kernel_trace_json(input: &str) -> Result<String, String> {
    let (a, req) = planar(input)?;
    let eps = req.epsilon.unwrap_or(default_epsilon(2));
    let mut s = KernelSolver::new(&a, eps, None).map_err(|e| e.to_string())?;
    let mut frames = vec![kernel_frame(&s, &KernelEvent::Stalled)];
    frames[0].event = "start";
    let mut status = "step_limit";
    for _ in 0..req.max_steps.min(MAX_FRAMES) {
        let ev = s.step().map_err(|e| e.to_string())?;
        frames.push(kernel_frame(&s, &ev));
        if matches!(ev, KernelEvent::Done) {
            status = "solved";
            break;
        }
        if matches!(ev, KernelEvent::Stalled) {
            status = "stalled";
            break;
        }
    }
    let cert = s.certificate();
    let trace = KernelTrace { epsilon: eps, status, frames, x: cert.unnormalized(&a), support: cert.support };
    serde_json::to_string(&trace).map_err(|e| e.to_string())
}

fn image_frame(s: &ImageSolver, event: &'static str, fo_iterations: Option<usize>) -> ImageFrame {
    let r = s.metric().matrix();
    ImageFrame {
        event,
        r: [r[(0, 0)], r[(0, 1)], r[(1, 0)], r[(1, 1)]],
        log_det: s.metric().log_det(),
        fo_iterations,
        rescalings: s.rescalings(),
    }
}

/// Runs the full-support image solver step by step and records `R` after each
/// step. Same request shape as [`kernel_trace_json`].
pub fn image_trace_json(input: &str) -> Result<String, String> {
    let (a, req) = planar(input)?;
    let eps = req.epsilon.unwrap_or(default_epsilon(2));
    let mut s = ImageSolver::new(&a, (0..a.cols()).collect(), eps, None).map_err(|e| e.to_string())?;
    let mut frames = vec![image_frame(&s, "start", None)];
    let mut status = "step_limit";
    for _ in 0..req.max_steps.min(MAX_FRAMES) {
        let ev = s.step().map_err(|e| e.to_string())?;
        let (name, fo) = match ev {
            ImageEvent::Separated => ("separated", None),
            ImageEvent::Rescale { fo_iterations } => ("rescale", Some(fo_iterations)),
            ImageEvent::Remove { .. } => ("remove", None),
            ImageEvent::Exhausted => ("exhausted", None),
            ImageEvent::Stalled => ("stalled", None),
        };
        frames.push(image_frame(&s, name, fo));
        if !matches!(ev, ImageEvent::Rescale { .. }) {
            status = if name == "separated" { "solved" } else { name };
            break;
        }
    }
    let columns = (0..a.cols()).filter_map(|j| unit2(&a.column(j))).collect();
    let trace = ImageTrace { epsilon: eps, status, columns, frames, y: s.result().map(<[f64]>::to_vec) };
    serde_json::to_string(&trace).map_err(|e| e.to_string())
}

/// Goffin measure `ρ`, `Δ` and `θ` of any small instance.
pub fn measure_json(input: &str) -> Result<String, String> {
    let (a, _) = parse(input)?;
    let report = condition_report(&a, 1e-9).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn kernel_trace(input: &str) -> Result<String, JsError> {
    kernel_trace_json(input).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn image_trace(input: &str) -> Result<String, JsError> {
    image_trace_json(input).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn measure(input: &str) -> Result<String, JsError> {
    measure_json(input).map_err(|e| JsError::new(&e))
}
