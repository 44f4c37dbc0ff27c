use std::io::{BufRead, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use conic_rescale::certify::{
    check_image_certificate, check_kernel_certificate, default_image_tol, default_kernel_tol, CertReport,
};
use conic_rescale::error::Error;
use conic_rescale::image::{full_support_image, max_support_image};
use conic_rescale::instance::{
    gen_degenerate, gen_image_feasible, gen_kernel_feasible, parse_certificate, parse_instance, solve_lp_feasibility,
    write_certificate, write_instance, CertificateFile, CertificateKind, LpFeasibilityProblem,
};
use conic_rescale::kernel::{full_support_kernel, max_support_kernel};
use conic_rescale::linalg::Matrix;
use conic_rescale::oracle::{strict_conic_feasibility, OracleReply, PolyhedralOracle, SeparationOracle, SubprocessOracle};
use conic_rescale::report::{SolveReport, SolveStatus};
use serde_json::{json, Value};

use crate::{
    CertifyArgs, Family, GenArgs, LpArgs, Mode, OracleServeArgs, SolveArgs, SupportKind, EXIT_INVALID,
    EXIT_NO_CONVERGE, EXIT_SOLVED,
};

pub fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Value of a `known_rho=<v>` token in a comment line, as written by `gen`.
pub fn known_rho_from_comments(text: &str) -> Option<f64> {
    text.lines()
        .filter(|l| l.trim_start().starts_with('#'))
        .flat_map(|l| l.split_whitespace())
        .find_map(|t| t.strip_prefix("known_rho=")?.parse().ok())
}

fn emit(value: &Value) {
    println!("{value}");
}

fn one_based(support: &[usize]) -> Vec<usize> {
    support.iter().map(|j| j + 1).collect()
}

pub fn report_json(report: &SolveReport, extra: Value) -> Result<Value> {
    let mut v = serde_json::to_value(report)?;
    let obj = v.as_object_mut().expect("report serialises to an object");
    obj.insert("type".into(), json!("report"));
    if let Value::Object(extra) = extra {
        obj.extend(extra);
    }
    Ok(v)
}

fn status_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Solved => EXIT_SOLVED,
        SolveStatus::NoConverge | SolveStatus::InfeasibleDetected => EXIT_NO_CONVERGE,
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Kernel => "kernel",
        Mode::Image => "image",
    }
}

fn support_name(s: SupportKind) -> &'static str {
    match s {
        SupportKind::Full => "full",
        SupportKind::Max => "max",
    }
}

fn self_check(a: &Matrix, kind: CertificateKind, v: &[f64], support: &[usize], tol: Option<f64>) -> Result<CertReport> {
    Ok(match kind {
        CertificateKind::Kernel => check_kernel_certificate(a, v, support, tol.unwrap_or(default_kernel_tol(a.cols())))?,
        CertificateKind::Image => check_image_certificate(a, v, support, tol.unwrap_or(default_image_tol(a, v)))?,
    })
}

pub fn solve(args: &SolveArgs) -> Result<u8> {
    if let Some(cmd) = &args.oracle_cmd {
        return solve_oracle(args, cmd);
    }
    let path = args.input.as_deref().context("--input is required")?;
    let text = read_input(path)?;
    let inst = parse_instance(&text).with_context(|| format!("cannot parse {}", path.display()))?;
    let a = &inst.a;
    let known_rho = args.known_rho.or_else(|| known_rho_from_comments(&text));
    let opts = args.limits.options(known_rho);
    if args.mode == Mode::Kernel && args.limits.fo.is_some() {
        log::warn!("--fo selects the image solver's method and is ignored in kernel mode");
    }
    let (kind, cert, mut report) = match (args.mode, args.support) {
        (Mode::Kernel, s) => {
            let out = if s == SupportKind::Full { full_support_kernel(a, &opts)? } else { max_support_kernel(a, &opts)? };
            (CertificateKind::Kernel, out.certificate.map(|c| (c.x, c.support)), out.report)
        }
        (Mode::Image, s) => {
            let out = if s == SupportKind::Full { full_support_image(a, &opts)? } else { max_support_image(a, &opts)? };
            (CertificateKind::Image, out.certificate.map(|c| (c.y, c.support)), out.report)
        }
    };
    if !args.timing {
        report.wall_ms = 0.0;
    }
    let mut code = status_code(report.status);
    let mut check = None;
    if let Some((vector, support)) = &cert {
        let r = self_check(a, kind, vector, support, args.tol)?;
        if !r.valid {
            code = EXIT_INVALID;
        }
        emit(&json!({
            "type": "certificate",
            "kind": kind.as_str(),
            "vector": vector,
            "support": one_based(support),
        }));
        if let Some(out) = &args.cert_out {
            let file = CertificateFile { kind, vector: vector.clone(), support: support.clone() };
            std::fs::write(out, write_certificate(&file)).with_context(|| format!("cannot write {}", out.display()))?;
        }
        check = Some(r);
    }
    emit(&report_json(
        &report,
        json!({
            "mode": mode_name(args.mode),
            "support": support_name(args.support),
            "m": a.rows(),
            "n": a.cols(),
            "certified": check.as_ref().map(|r| r.valid),
        }),
    )?);
    eprintln!(
        "{} {}/{} on {}x{}: {} first-order updates, {} rescalings, {} removals",
        report.status.as_str(),
        mode_name(args.mode),
        support_name(args.support),
        a.rows(),
        a.cols(),
        report.fo_iters,
        report.rescalings,
        report.removals
    );
    if let Some((_, support)) = &cert {
        eprintln!("support size {} of {}", support.len(), a.cols());
    }
    if let Some(r) = check.filter(|r| !r.valid) {
        eprintln!("certificate rejected: {}", r.message);
    }
    for b in report.bound_checks.iter().filter(|b| !b.pass) {
        eprintln!("bound violated: {} (bound {}, observed {})", b.name, b.bound, b.observed);
    }
    Ok(code)
}

fn solve_oracle(args: &SolveArgs, cmd: &str) -> Result<u8> {
    if args.mode != Mode::Image || args.support != SupportKind::Full {
        bail!("--oracle-cmd solves the strict image problem only (--mode image --support full)");
    }
    let inst = match &args.input {
        Some(p) => Some(parse_instance(&read_input(p)?).with_context(|| format!("cannot parse {}", p.display()))?),
        None => None,
    };
    let dim = match (args.dim, &inst) {
        (Some(d), Some(i)) if d != i.rows() => bail!("--dim {d} disagrees with the instance's {} rows", i.rows()),
        (Some(d), _) => d,
        (None, Some(i)) => i.rows(),
        (None, None) => bail!("--dim is required when no instance is given"),
    };
    let mut oracle = SubprocessOracle::spawn(cmd, dim)?;
    let mut res = strict_conic_feasibility(&mut oracle, &args.limits.options(args.known_rho))?;
    if !args.timing {
        res.report.wall_ms = 0.0;
    }
    let mut code = status_code(res.report.status);
    let mut certified = None;
    if let Some(y) = &res.y {
        if let Some(i) = &inst {
            let all: Vec<usize> = (0..i.cols()).collect();
            let r = self_check(&i.a, CertificateKind::Image, y, &all, args.tol)?;
            if !r.valid {
                code = EXIT_INVALID;
            }
            certified = Some(r.valid);
        }
        emit(&json!({ "type": "certificate", "kind": "image", "vector": y }));
    }
    let min_ratio = res.det_ratios.iter().cloned().reduce(f64::min);
    emit(&report_json(
        &res.report,
        json!({
            "mode": "oracle",
            "m": dim,
            "oracle_calls": res.oracle_calls,
            "max_active_set": res.max_active_set,
            "min_det_ratio": min_ratio,
            "certified": certified,
        }),
    )?);
    eprintln!(
        "{} oracle/{dim}: {} oracle calls, {} rescalings",
        res.report.status.as_str(),
        res.oracle_calls,
        res.report.rescalings
    );
    Ok(code)
}

pub fn gen(args: &GenArgs) -> Result<u8> {
    let inst = match args.family {
        Family::Kernel => gen_kernel_feasible(args.m, args.n, args.rho, args.seed)?,
        Family::Image => gen_image_feasible(args.m, args.n, args.rho, args.seed)?,
        Family::Degenerate => gen_degenerate(args.m, args.n, args.s.unwrap_or((args.n / 2).max(1)), args.seed)?,
    };
    let family = match args.family {
        Family::Kernel => "kernel",
        Family::Image => "image",
        Family::Degenerate => "degenerate",
    };
    let mut text = write_instance(&inst.a);
    text.push_str(&format!("# family={family} seed={}\n", args.seed));
    if let Some(rho) = inst.known_rho {
        text.push_str(&format!("# known_rho={rho}\n"));
    }
    if let Some((s, t)) = &inst.known_supports {
        let list = |v: &[usize]| one_based(v).iter().map(|j| j.to_string()).collect::<Vec<_>>().join(" ");
        text.push_str(&format!("# S*: {}\n# T*: {}\n", list(s), list(t)));
    }
    match &args.output {
        Some(p) => std::fs::write(p, &text).with_context(|| format!("cannot write {}", p.display()))?,
        None => print!("{text}"),
    }
    eprintln!("generated {family} instance {}x{} (seed {})", args.m, args.n, args.seed);
    Ok(EXIT_SOLVED)
}

pub fn certify(args: &CertifyArgs) -> Result<u8> {
    let inst = parse_instance(&read_input(&args.input)?).with_context(|| format!("cannot parse {}", args.input.display()))?;
    let cert = parse_certificate(&read_input(&args.cert)?).with_context(|| format!("cannot parse {}", args.cert.display()))?;
    let report = match self_check(&inst.a, cert.kind, &cert.vector, &cert.support, args.tol) {
        Ok(r) => r,
        Err(e) => match e.downcast_ref::<Error>() {
            Some(inner @ Error::DimensionMismatch { .. }) => CertReport {
                valid: false,
                residual: f64::INFINITY,
                margin: 0.0,
                message: inner.to_string(),
            },
            _ => return Err(e),
        },
    };
    let mut v = serde_json::to_value(&report)?;
    v.as_object_mut().expect("object").insert("type".into(), json!("certify"));
    emit(&v);
    if report.valid {
        eprintln!("valid {} certificate (residual {:.3e}, margin {:.3e})", cert.kind.as_str(), report.residual, report.margin);
        Ok(EXIT_SOLVED)
    } else {
        eprintln!("invalid {} certificate: {}", cert.kind.as_str(), report.message);
        Ok(EXIT_INVALID)
    }
}

pub fn lp(args: &LpArgs) -> Result<u8> {
    let inst = parse_instance(&read_input(&args.input)?).with_context(|| format!("cannot parse {}", args.input.display()))?;
    let (m, cols) = (inst.rows(), inst.cols());
    if cols < 2 {
        bail!("expected the matrix [A | b] with at least two columns, found {cols}");
    }
    let d = cols - 1;
    let a = inst.a.select_columns(&(0..d).collect::<Vec<_>>());
    let b = inst.a.column(d);
    let problem = LpFeasibilityProblem::new(a.clone(), b.clone())?;
    let mut verdict = solve_lp_feasibility(&problem, &args.limits.options(None))?;
    if !args.timing {
        verdict.report.wall_ms = 0.0;
    }
    let satisfied = verdict.x.as_ref().map(|x| a.mul_vec(x).iter().zip(&b).all(|(l, r)| *l <= r + 1e-8));
    emit(&json!({ "type": "lp", "feasible": verdict.feasible, "x": verdict.x, "satisfied": satisfied }));
    emit(&report_json(&verdict.report, json!({ "mode": "lp", "m": m, "d": d }))?);
    match verdict.feasible {
        Some(true) => eprintln!("feasible: Ax ≤ b has a solution"),
        Some(false) => eprintln!("infeasible: Ax ≤ b has no solution"),
        None => eprintln!("undecided: the kernel solver did not converge"),
    }
    Ok(match (verdict.feasible, satisfied) {
        (None, _) => EXIT_NO_CONVERGE,
        (Some(_), Some(false)) => EXIT_INVALID,
        _ => EXIT_SOLVED,
    })
}

pub fn oracle_serve(args: &OracleServeArgs) -> Result<u8> {
    let inst = parse_instance(&read_input(&args.input)?).with_context(|| format!("cannot parse {}", args.input.display()))?;
    let mut oracle = PolyhedralOracle::new(&inst.a)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in std::io::stdin().lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().with_context(|| format!("unreadable query {line:?}")))
            .collect::<Result<Vec<f64>>>()?;
        match oracle.query(&v)? {
            OracleReply::Yes => writeln!(out, "YES")?,
            OracleReply::Violated(a) => {
                writeln!(out, "{}", a.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" "))?
            }
        }
        out.flush()?;
    }
    Ok(EXIT_SOLVED)
}
