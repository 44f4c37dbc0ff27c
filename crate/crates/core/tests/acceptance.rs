//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use conic_rescale::certify::{check_complementary_pair, check_image_certificate, check_kernel_certificate};
use conic_rescale::conditioning::{encoding_length, goffin_oracle, theta, RHO_TOL};
use conic_rescale::error::Error;
use conic_rescale::first_order::{dv_step, FoState};
use conic_rescale::image::{full_support_image, image_rescaling_bound, max_support_image, ImageEvent, ImageSolver, LedgerKind};
use conic_rescale::instance::{
    exact_support_oracle, gen_degenerate, gen_image_feasible, gen_kernel_feasible, lp_feasible_exact,
    solve_lp_feasibility, LpFeasibilityProblem,
};
use conic_rescale::kernel::{full_support_kernel, kernel_rescaling_bound, max_support_kernel, KernelEvent, KernelSolver};
use conic_rescale::linalg::{dot, norm, Matrix};
use conic_rescale::oracle::{strict_conic_feasibility, OracleReply, PolyhedralOracle, SeparationOracle};
use conic_rescale::report::{default_epsilon, SolveOptions, SolveStatus};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn dv_identity() -> Outcome {
    let mut rng = common::rng(1);
    let mut steps = 0usize;
    let mut worst: f64 = 0.0;
    while steps < 100_000 {
        let m = rng.random_range(1..=6);
        let n = rng.random_range(1..=10);
        let cols: Vec<Vec<f64>> = (0..n).map(|_| common::gaussian(&mut rng, m)).collect();
        let a = ok(Matrix::from_columns(&cols))?;
        let mut st = FoState { x: vec![0.0; n], y: common::gaussian(&mut rng, m) };
        for _ in 0..200 {
            let ny = norm(&st.y);
            if ny == 0.0 || steps == 100_000 {
                break;
            }
            let k = rng.random_range(0..n);
            let col = a.column(k);
            let c = dot(&col, &st.y) / (norm(&col) * ny);
            st = ok(dv_step(&a, &st, k))?;
            let expected = ny * (1.0 - c * c).max(0.0).sqrt();
            worst = worst.max((norm(&st.y) - expected).abs() / ny);
            steps += 1;
        }
    }
    ensure!(worst <= 1e-12, "relative error {worst:e} above 1e-12");
    Ok(format!("{steps} steps, max relative error {worst:.2e}"))
}

fn kernel_volume_growth() -> Outcome {
    let (mut instances, mut events, mut worst) = (0, 0, f64::INFINITY);
    for seed in 0..100_000 {
        if instances == 50 {
            break;
        }
        let Some(a) = common::thin_planar_instance(seed) else { continue };
        let mut solver = ok(KernelSolver::new(&a, default_epsilon(2), None))?;
        let mut area = common::symmetric_hull_area(solver.current_columns());
        let mut rescaled = false;
        for _ in 0..1_000_000 {
            match ok(solver.step())? {
                KernelEvent::Rescale { .. } => {
                    let next = common::symmetric_hull_area(solver.current_columns());
                    let ratio = next / area;
                    ensure!(ratio >= 1.5 - 1e-9, "seed {seed}: area ratio {ratio}");
                    worst = worst.min(ratio);
                    area = next;
                    events += 1;
                    rescaled = true;
                }
                KernelEvent::Done => break,
                KernelEvent::Stalled => return Err(format!("seed {seed}: stalled")),
                KernelEvent::Dv { .. } => {}
            }
        }
        ensure!(solver.is_done(), "seed {seed}: did not finish");
        instances += rescaled as usize;
    }
    ensure!(instances == 50, "only {instances} instances reached the rescale branch");
    Ok(format!("{instances} instances, {events} rescalings, min area ratio {worst:.4}"))
}

fn kernel_end_to_end() -> Outcome {
    let mut worst_slack = f64::INFINITY;
    let mut total_rescalings = 0;
    for i in 0..100u64 {
        let m = 2 + (i as usize % 4);
        let n = m + 2 + (i as usize * 7) % (19 - m);
        let inst = ok(gen_kernel_feasible(m, n, 0.05, 1000 + i))?;
        let rho = match inst.known_rho {
            Some(r) => r,
            None => ok(goffin_oracle(&inst.a, RHO_TOL))?,
        };
        ensure!(rho <= -0.05, "instance {i}: rho {rho}");
        let out = ok(full_support_kernel(&inst.a, &SolveOptions::default()))?;
        ensure!(out.report.status == SolveStatus::Solved, "instance {i}: {}", out.report.status.as_str());
        let cert = out.certificate.ok_or("missing certificate")?;
        let check = ok(check_kernel_certificate(&inst.a, &cert.x, &cert.support, 1e-8 * n as f64))?;
        ensure!(check.valid, "instance {i}: {}", check.message);
        ensure!(cert.support.len() == n && cert.x.iter().all(|v| *v > 0.0), "instance {i}: x not positive");
        let bound = kernel_rescaling_bound(m, rho) + m as f64;
        let r = out.report.rescalings as f64;
        ensure!(r <= bound, "instance {i}: {r} rescalings above {bound}");
        worst_slack = worst_slack.min(bound - r);
        total_rescalings += out.report.rescalings;
    }
    Ok(format!("100 instances, {total_rescalings} rescalings, min bound slack {worst_slack}"))
}

fn image_potential() -> Outcome {
    let (mut rescales, mut points, mut worst_ratio, mut worst_q) = (0, 0, f64::INFINITY, 0.0f64);
    for i in 0..40u64 {
        let m = 2 + (i as usize % 4);
        let n = 3 * m + (i as usize * 5) % 8;
        let delta = [1e-2, 1e-3, 1e-4, 1e-5][i as usize % 4];
        let a = &common::rim_instance(m, n, delta, 2000 + i);
        let full = ok(full_support_image(a, &SolveOptions::default()))?;
        let y = full.certificate.ok_or("missing certificate")?.y;
        let sample = common::sample_feasible_set(a, &y, 1000, i);
        ensure!(sample.len() == 1000, "instance {i}: sampled only {} points", sample.len());
        let mut solver = ok(ImageSolver::new(a, (0..n).collect(), default_epsilon(m), None))?;
        let mut ev = ImageEvent::Rescale { fo_iterations: 0 };
        loop {
            for z in &sample {
                let q = solver.metric().norm(z).powi(2);
                worst_q = worst_q.max(q);
                ensure!(q <= 1.0 + 1e-8, "instance {i}: zᵀRz = {q}");
            }
            match ev {
                ImageEvent::Separated => break,
                ImageEvent::Rescale { .. } => {}
                other => return Err(format!("instance {i}: unexpected {other:?}")),
            }
            ev = ok(solver.step())?;
        }
        for e in solver.ledger() {
            ensure!(e.kind == LedgerKind::Rescale, "instance {i}: removal in full support run");
            ensure!(e.ratio >= 16.0 / 9.0 * (1.0 - 1e-8), "instance {i}: det ratio {}", e.ratio);
            worst_ratio = worst_ratio.min(e.ratio);
            rescales += 1;
        }
        points += sample.len();
    }
    ensure!(rescales > 0, "no rescalings observed");
    Ok(format!(
        "{rescales} rescalings, min det ratio {worst_ratio:.4}, {points} points, max zᵀRz {worst_q:.6}"
    ))
}

fn image_end_to_end() -> Outcome {
    let (mut total_rescalings, mut worst_call) = (0, 0.0f64);
    for i in 0..100u64 {
        let m = 2 + (i as usize % 4);
        let n = m + (i as usize * 3) % (21 - m);
        let inst = ok(gen_image_feasible(m, n, 0.05, 3000 + i))?;
        let rho = match goffin_oracle(&inst.a, RHO_TOL) {
            Ok(r) => r,
            Err(Error::Unsupported(_)) => 0.05,
            Err(e) => return Err(e.to_string()),
        };
        ensure!(rho >= 0.05 - 1e-9, "instance {i}: rho {rho}");
        let out = ok(full_support_image(&inst.a, &SolveOptions::default()))?;
        ensure!(out.report.status == SolveStatus::Solved, "instance {i}: {}", out.report.status.as_str());
        let cert = out.certificate.ok_or("missing certificate")?;
        ensure!(inst.a.tr_mul_vec(&cert.y).iter().all(|v| *v > 0.0), "instance {i}: Aᵀy not positive");
        let bound = image_rescaling_bound(m, rho);
        let r = out.report.rescalings as f64;
        ensure!(r <= bound, "instance {i}: {r} rescalings above {bound}");
        let per_call = (121.0 * (m * m) as f64).ceil();
        let check = out
            .report
            .bound_checks
            .iter()
            .find(|b| b.name.starts_with("fo iterations per call"))
            .ok_or("missing per-call check")?;
        ensure!(check.observed <= per_call, "instance {i}: {} iterations in one call", check.observed);
        worst_call = worst_call.max(check.observed / per_call);
        total_rescalings += out.report.rescalings;
    }
    Ok(format!("100 instances, {total_rescalings} rescalings, max call/⌈121m²⌉ {worst_call:.3}"))
}

/// Deterministic degenerate instances with `m ≤ 4`, `n ≤ 10`.
fn degenerate_family(count: usize, seed: u64) -> Result<Vec<conic_rescale::instance::ConicInstance>, String> {
    let mut rng = common::rng(seed);
    let mut out = Vec::new();
    let mut k = 0;
    while out.len() < count {
        let m = rng.random_range(2..=4);
        let n = rng.random_range(m + 1..=10);
        let s = rng.random_range(1..n);
        k += 1;
        match gen_degenerate(m, n, s, seed * 10_000 + k) {
            Ok(inst) => out.push(inst),
            Err(Error::InvalidArgument(_)) => {}
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(out)
}

fn max_support_complementarity() -> Outcome {
    let insts = degenerate_family(50, 4)?;
    let mut sizes = 0;
    for (i, inst) in insts.iter().enumerate() {
        let n = inst.cols();
        let exact = ok(exact_support_oracle(&inst.a))?;
        let s = ok(max_support_kernel(&inst.a, &SolveOptions::default()))?;
        let t = ok(max_support_image(&inst.a, &SolveOptions::default()))?;
        let s = s.certificate.ok_or(format!("instance {i}: kernel {}", s.report.status.as_str()))?.support;
        let t = t.certificate.ok_or(format!("instance {i}: image {}", t.report.status.as_str()))?.support;
        let pair = check_complementary_pair(&s, &t, n);
        ensure!(pair.valid, "instance {i}: {}", pair.message);
        ensure!(s == exact.kernel, "instance {i}: S {s:?} vs exact {:?}", exact.kernel);
        ensure!(t == exact.image, "instance {i}: T {t:?} vs exact {:?}", exact.image);
        sizes += n;
    }
    Ok(format!("{} instances, {sizes} columns classified", insts.len()))
}

fn condition_chain() -> Outcome {
    let mut rng = common::rng(7);
    let (mut kept, mut drawn, mut worst_gap) = (0, 0, f64::INFINITY);
    while kept < 200 {
        drawn += 1;
        ensure!(drawn < 100_000, "only {kept} matrices with |rho| > 1e-3");
        let m = rng.random_range(1..=3);
        let n = rng.random_range(1..=6);
        let a = common::random_integer_matrix(&mut rng, m, n, 10);
        if !a.zero_columns().is_empty() {
            continue;
        }
        let rho = ok(goffin_oracle(&a, RHO_TOL))?;
        if rho.abs() <= 1e-3 {
            continue;
        }
        let th = theta(&a);
        let l = ok(encoding_length(&a))? as f64;
        ensure!(rho.abs() >= th, "|rho| {} below theta {th}", rho.abs());
        ensure!(th.log2() >= -4.0 * l, "theta {th} below 2^(-4L), L = {l}");
        worst_gap = worst_gap.min(rho.abs().log2() - th.log2());
        kept += 1;
    }
    Ok(format!("{kept} matrices of {drawn} drawn, min log2(|rho|/theta) {worst_gap:.3}"))
}

fn oracle_equivalence() -> Outcome {
    let mut calls = 0;
    for i in 0..30u64 {
        let m = 2 + (i as usize % 4);
        let n = m + (i as usize * 3) % 10;
        let inst = ok(gen_image_feasible(m, n, 0.05, 4000 + i))?;
        let all: Vec<usize> = (0..n).collect();
        let mut oracle = ok(PolyhedralOracle::new(&inst.a))?;
        let res = ok(strict_conic_feasibility(&mut oracle, &SolveOptions::default()))?;
        let y_oracle = res.y.ok_or(format!("cone {i}: oracle solver {}", res.report.status.as_str()))?;
        let mat = ok(full_support_image(&inst.a, &SolveOptions::default()))?;
        let y_matrix = mat.certificate.ok_or(format!("cone {i}: matrix solver failed"))?.y;
        let r = ok(check_image_certificate(&inst.a, &y_oracle, &all, 0.0))?;
        ensure!(r.valid, "cone {i}: oracle point rejected: {}", r.message);
        let reply = ok(oracle.query(&y_matrix))?;
        ensure!(reply == OracleReply::Yes, "cone {i}: matrix point rejected by the oracle");
        calls += res.oracle_calls;
    }
    Ok(format!("30 cones, {calls} oracle calls"))
}

fn lp_front_end() -> Outcome {
    let mut rng = common::rng(9);
    let mut verdicts = [0usize; 2];
    for i in 0..40 {
        let m = rng.random_range(2..=4);
        let d = rng.random_range(1..=3);
        let a = common::random_integer_matrix(&mut rng, m, d, 3);
        let b: Vec<f64> = (0..m).map(|_| rng.random_range(-3..=2) as f64).collect();
        let exact = ok(lp_feasible_exact(&a, &b))?.is_some();
        let p = ok(LpFeasibilityProblem::new(a.clone(), b.clone()))?;
        let v = ok(solve_lp_feasibility(&p, &SolveOptions::default()))?;
        ensure!(v.feasible == Some(exact), "system {i}: verdict {:?}, exact {exact}", v.feasible);
        if exact {
            let x = v.x.ok_or(format!("system {i}: no point recovered"))?;
            let ax = a.mul_vec(&x);
            ensure!(ax.iter().zip(&b).all(|(l, r)| *l <= r + 1e-8), "system {i}: Ax ≤ b violated");
        }
        verdicts[exact as usize] += 1;
    }
    ensure!(verdicts[0] > 0 && verdicts[1] > 0, "one-sided sample {verdicts:?}");
    Ok(format!("40 systems, {} feasible, {} infeasible", verdicts[1], verdicts[0]))
}

fn gamma_decomposition() -> Outcome {
    let insts = degenerate_family(50, 10)?;
    let (mut steps, mut removals, mut worst_res, mut worst_removal) = (0, 0, 0.0f64, f64::INFINITY);
    for (i, inst) in insts.iter().enumerate() {
        let th = theta(&inst.a);
        let norms = inst.a.column_norms();
        let active: Vec<usize> = (0..inst.cols()).filter(|&j| norms[j] > 0.0).collect();
        let mut solver = ok(ImageSolver::new(&inst.a, active, default_epsilon(inst.rows()), Some(th)))?;
        loop {
            let ev = ok(solver.step())?;
            steps += 1;
            let res = solver.decomposition_residual();
            worst_res = worst_res.max(res);
            ensure!(res <= 1e-8, "instance {i}: decomposition residual {res:e}");
            let gmax = solver.gamma().iter().cloned().fold(0.0, f64::max);
            ensure!(gmax <= 2.0 / (th * th), "instance {i}: gamma {gmax} above 2/theta^2");
            match ev {
                ImageEvent::Separated | ImageEvent::Exhausted => break,
                ImageEvent::Stalled => return Err(format!("instance {i}: stalled")),
                _ => {}
            }
        }
        for e in solver.ledger().iter().filter(|e| e.kind == LedgerKind::Remove) {
            let bound = th * th / (2.0 * (inst.cols() + 1) as f64);
            ensure!(e.ratio >= bound * (1.0 - 1e-8), "instance {i}: removal ratio {} below {bound}", e.ratio);
            worst_removal = worst_removal.min(e.ratio / bound);
            removals += 1;
        }
    }
    ensure!(removals > 0, "no removals observed");
    Ok(format!(
        "{} runs, {steps} steps, max residual {worst_res:.1e}, {removals} removals, min ratio/bound {worst_removal:.3e}",
        insts.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("dv identity", dv_identity, Some(5)),
        ("kernel volume growth", kernel_volume_growth, Some(10)),
        ("full-support kernel", kernel_end_to_end, Some(60)),
        ("image determinant potential", image_potential, None),
        ("full-support image", image_end_to_end, Some(120)),
        ("max-support complementarity", max_support_complementarity, Some(120)),
        ("condition-measure chain", condition_chain, Some(30)),
        ("oracle/matrix equivalence", oracle_equivalence, Some(60)),
        ("lp front-end", lp_front_end, Some(60)),
        ("gamma decomposition", gamma_decomposition, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(s)) if elapsed > Duration::from_secs(*s) => Err(format!("exceeded {s} s")),
            (r, _) => r,
        };
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name:<28} {:>8.2}s  {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
