//! Strict conic feasibility for a cone known only through a strict separation oracle.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::first_order::von_neumann_bound;
use crate::linalg::{dot, Matrix, SymPosDef};
use crate::report::{BoundCheck, SolveOptions, SolveReport, SolveStatus, Stopwatch};

/// Reply of a strict separation oracle to the query `v`.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleReply {
    /// `v` lies in the interior of the cone.
    Yes,
    /// A vector `a` with `aᵀv ≤ 0` that is non-negative on the cone.
    Violated(Vec<f64>),
}

pub trait SeparationOracle {
    fn dim(&self) -> usize;
    fn query(&mut self, v: &[f64]) -> Result<OracleReply>;
}

/// Oracle for `Σ = {y : Aᵀy ≥ 0}`: answers YES when `Aᵀv > 0`, otherwise
/// returns the most violated normalised column (lowest index on ties).
#[derive(Clone, Debug)]
pub struct PolyhedralOracle {
    ahat: Matrix,
    calls: u64,
}

impl PolyhedralOracle {
    pub fn new(a: &Matrix) -> Result<Self> {
        if let Some(j) = a.zero_columns().first() {
            return Err(Error::DegenerateColumn { index: *j });
        }
        Ok(PolyhedralOracle { ahat: a.normalized_columns(), calls: 0 })
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }
}

impl SeparationOracle for PolyhedralOracle {
    fn dim(&self) -> usize {
        self.ahat.rows()
    }

    fn query(&mut self, v: &[f64]) -> Result<OracleReply> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        self.calls += 1;
        let s = self.ahat.tr_mul_vec(v);
        if s.iter().all(|x| *x > 0.0) {
            return Ok(OracleReply::Yes);
        }
        let mut k = 0;
        for (i, x) in s.iter().enumerate() {
            if *x < s[k] {
                k = i;
            }
        }
        Ok(OracleReply::Violated(self.ahat.column(k)))
    }
}

/// Oracle served by a child process over a line protocol: each query is one
/// line `v₁ … v_m`, each reply is `YES` or `a₁ … a_m`.
pub struct SubprocessOracle {
    dim: usize,
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
}

impl SubprocessOracle {
    /// Starts `command` through `sh -c`.
    pub fn spawn(command: &str, dim: usize) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let stdin = child.stdin.take();
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(SubprocessOracle { dim, child, stdin, stdout })
    }
}

impl SeparationOracle for SubprocessOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn query(&mut self, v: &[f64]) -> Result<OracleReply> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let line = v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ");
        let stdin = self.stdin.as_mut().ok_or_else(|| Error::OracleFault("oracle stdin closed".into()))?;
        writeln!(stdin, "{line}")?;
        stdin.flush()?;
        let mut reply = String::new();
        if self.stdout.read_line(&mut reply)? == 0 {
            return Err(Error::OracleFault("oracle process closed its output".into()));
        }
        parse_reply(reply.trim(), self.dim)
    }
}

impl Drop for SubprocessOracle {
    fn drop(&mut self) {
        drop(self.stdin.take());
        if self.child.try_wait().ok().flatten().is_none() {
            let _ = self.child.kill();
        }
        let _ = self.child.wait();
    }
}

pub fn parse_reply(reply: &str, dim: usize) -> Result<OracleReply> {
    if reply.eq_ignore_ascii_case("yes") {
        return Ok(OracleReply::Yes);
    }
    let a = reply
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| Error::OracleFault(format!("unreadable oracle reply {reply:?}"))))
        .collect::<Result<Vec<f64>>>()?;
    if a.len() != dim || a.iter().any(|x| !x.is_finite()) {
        return Err(Error::OracleFault(format!("oracle reply {reply:?} is not a vector of length {dim}")));
    }
    Ok(OracleReply::Violated(a))
}

/// Distinct oracle vectors with convex coefficients.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ActiveSet {
    pub vectors: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
}

impl ActiveSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Index of `v`, comparing entries bit for bit.
    fn position(&self, v: &[f64]) -> Option<usize> {
        self.vectors
            .iter()
            .position(|w| w.len() == v.len() && w.iter().zip(v).all(|(a, b)| a.to_bits() == b.to_bits()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleVnStatus {
    /// The oracle accepted `Qy`.
    Interior,
    SmallNorm,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleVnOutcome {
    pub active: ActiveSet,
    pub y: Vec<f64>,
    pub status: OracleVnStatus,
    pub iterations: usize,
    pub calls: usize,
}

fn checked_reply(oracle: &mut dyn SeparationOracle, v: &[f64]) -> Result<OracleReply> {
    let reply = oracle.query(v)?;
    if let OracleReply::Violated(a) = &reply {
        if a.len() != v.len() {
            return Err(Error::OracleFault(format!("returned vector of length {}", a.len())));
        }
        if dot(a, v) > 0.0 {
            return Err(Error::OracleFault(format!("returned a with aᵀv = {} > 0", dot(a, v))));
        }
        if a.iter().all(|x| *x == 0.0) {
            return Err(Error::OracleFault("returned the zero vector".into()));
        }
    }
    Ok(reply)
}

/// Von Neumann algorithm driven by a separation oracle in the metric `Q = R⁻¹`.
pub fn oracle_von_neumann(
    oracle: &mut dyn SeparationOracle,
    r: &SymPosDef,
    eps: f64,
    budget: usize,
) -> Result<OracleVnOutcome> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")));
    }
    let m = oracle.dim();
    if r.dim() != m {
        return Err(Error::DimensionMismatch { expected: m, found: r.dim() });
    }
    let mut calls = 1;
    let first = match checked_reply(oracle, &vec![0.0; m])? {
        OracleReply::Violated(a) => a,
        OracleReply::Yes => return Err(Error::OracleFault("the origin was accepted as interior".into())),
    };
    let n1 = r.inverse_norm(&first);
    let mut y: Vec<f64> = first.iter().map(|x| x / n1).collect();
    let mut active = ActiveSet { vectors: vec![first], coefficients: vec![1.0] };
    let mut iterations = 0;
    let status = loop {
        let qy = r.solve(&y);
        let ysq = dot(&y, &qy).max(0.0);
        if ysq.sqrt() <= eps {
            break OracleVnStatus::SmallNorm;
        }
        if iterations >= budget {
            break OracleVnStatus::BudgetExhausted;
        }
        calls += 1;
        let a = match checked_reply(oracle, &qy)? {
            OracleReply::Yes => break OracleVnStatus::Interior,
            OracleReply::Violated(a) => a,
        };
        let na = r.inverse_norm(&a);
        let s = dot(&a, &qy) / na;
        let lambda = ((ysq - s) / (ysq - 2.0 * s + 1.0)).clamp(0.0, 1.0);
        active.coefficients.iter_mut().for_each(|c| *c *= 1.0 - lambda);
        match active.position(&a) {
            Some(p) => active.coefficients[p] += lambda,
            None => {
                active.vectors.push(a.clone());
                active.coefficients.push(lambda);
            }
        }
        for (yi, ai) in y.iter_mut().zip(&a) {
            *yi = (1.0 - lambda) * *yi + lambda * ai / na;
        }
        iterations += 1;
    };
    Ok(OracleVnOutcome { active, y, status, iterations, calls })
}

/// Diagnostics of a strict conic feasibility solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSolve {
    pub y: Option<Vec<f64>>,
    pub report: SolveReport,
    pub oracle_calls: u64,
    pub max_active_set: usize,
    pub det_ratios: Vec<f64>,
}

/// `⌈m·log_{3/2}(2·2⁶⁴)⌉`: enough rescalings for any cone with `ρ_Σ ≥ 2⁻⁶⁴`.
pub fn default_oracle_rescalings(m: usize) -> u64 {
    (m as f64 * (65.0 * std::f64::consts::LN_2) / 1.5f64.ln()).ceil() as u64
}

/// Finds `ȳ` in the interior of a full-dimensional cone given by a strict separation oracle.
pub fn strict_conic_feasibility(oracle: &mut dyn SeparationOracle, options: &SolveOptions) -> Result<OracleSolve> {
    let clock = Stopwatch::start();
    let m = oracle.dim();
    if m == 0 {
        return Err(Error::EmptyMatrix);
    }
    let eps = options.epsilon_for(m);
    let budget = von_neumann_bound(eps);
    let max_r = options.max_rescalings.unwrap_or_else(|| default_oracle_rescalings(m));
    let max_it = options.max_iterations.unwrap_or(u64::MAX);
    let shrink = 1.0 + eps;
    let mut r = SymPosDef::identity(m);
    let mut t = 0u64;
    let mut fo_iters = 0u64;
    let mut calls = 0u64;
    let mut max_active = 0;
    let mut det_ratios = Vec::new();
    let mut max_call_iters = 0usize;
    let (status, y) = loop {
        if t > max_r || fo_iters > max_it {
            break (SolveStatus::NoConverge, None);
        }
        let out = oracle_von_neumann(oracle, &r, eps, budget)?;
        fo_iters += out.iterations as u64;
        calls += out.calls as u64;
        max_active = max_active.max(out.active.len());
        max_call_iters = max_call_iters.max(out.iterations);
        match out.status {
            OracleVnStatus::Interior => break (SolveStatus::Solved, Some(r.solve(&out.y))),
            OracleVnStatus::BudgetExhausted => break (SolveStatus::NoConverge, None),
            OracleVnStatus::SmallNorm => {
                let terms = out.active.vectors.iter().zip(&out.active.coefficients);
                let next = r.add_rank_ones(terms.map(|(a, x)| (x / r.inverse_norm(a).powi(2), a.as_slice())), 1.0 / shrink)?;
                let ratio = (next.log_det() - r.log_det()).exp();
                log::trace!("oracle rescale {}: det ratio {ratio:.6}, {} calls so far", t + 1, calls);
                det_ratios.push(ratio);
                r = next;
                t += 1;
            }
        }
    };
    let mut report = SolveReport::new(status);
    report.fo_iters = fo_iters;
    report.rescalings = t;
    report.wall_ms = clock.elapsed_ms();
    report.bound_checks.push(BoundCheck::at_most("active set size <= ceil(1/eps^2)", budget as f64, max_active as f64));
    report.bound_checks.push(BoundCheck::at_most(
        "fo iterations per call <= ceil(1/eps^2)",
        budget as f64,
        max_call_iters as f64,
    ));
    if let Some(rho) = options.known_rho {
        if rho > 0.0 {
            report.bound_checks.push(BoundCheck::at_most(
                "rescalings <= ceil(m log_1.5(2/rho))",
                crate::image::image_rescaling_bound(m, rho),
                t as f64,
            ));
        }
    }
    Ok(OracleSolve { y, report, oracle_calls: calls, max_active_set: max_active, det_ratios })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct HalfLine;

    impl SeparationOracle for HalfLine {
        fn dim(&self) -> usize {
            1
        }

        fn query(&mut self, v: &[f64]) -> Result<OracleReply> {
            Ok(if v[0] > 0.0 { OracleReply::Yes } else { OracleReply::Violated(vec![1.0]) })
        }
    }

    struct Alternating(bool);

    impl SeparationOracle for Alternating {
        fn dim(&self) -> usize {
            1
        }

        fn query(&mut self, v: &[f64]) -> Result<OracleReply> {
            self.0 = !self.0;
            let a = if v[0] > 0.0 { -1.0 } else { 1.0 };
            Ok(OracleReply::Violated(vec![a]))
        }
    }

    struct Liar;

    impl SeparationOracle for Liar {
        fn dim(&self) -> usize {
            1
        }

        fn query(&mut self, v: &[f64]) -> Result<OracleReply> {
            Ok(OracleReply::Violated(vec![if v[0] >= 0.0 { 1.0 } else { -1.0 }]))
        }
    }

    #[test]
    fn half_line_is_interior_after_one_call() {
        let out = oracle_von_neumann(&mut HalfLine, &SymPosDef::identity(1), 0.1, 100).unwrap();
        assert_eq!(out.status, OracleVnStatus::Interior);
        assert_eq!(out.y, vec![1.0]);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn antipodal_replies_collapse() {
        let out = oracle_von_neumann(&mut Alternating(false), &SymPosDef::identity(1), 0.1, 100).unwrap();
        assert_eq!(out.status, OracleVnStatus::SmallNorm);
        assert_eq!(out.iterations, 1);
        assert_eq!(out.active.len(), 2);
    }

    #[test]
    fn faulty_oracle_detected() {
        let err = oracle_von_neumann(&mut Liar, &SymPosDef::identity(1), 0.1, 100);
        assert!(matches!(err, Err(Error::OracleFault(_))));
    }

    #[test]
    fn quadrant_matches_matrix_trace() {
        let mut o = PolyhedralOracle::new(&Matrix::identity(2)).unwrap();
        let out = oracle_von_neumann(&mut o, &SymPosDef::identity(2), 0.8, 100).unwrap();
        assert_eq!(out.status, OracleVnStatus::SmallNorm);
        assert_eq!(out.active.coefficients, vec![0.5, 0.5]);
        let mut o = PolyhedralOracle::new(&Matrix::identity(2)).unwrap();
        let res = strict_conic_feasibility(&mut o, &SolveOptions::default()).unwrap();
        let y = res.y.unwrap();
        assert!(y[0] > 0.0 && y[1] > 0.0);
    }

    #[test]
    fn reply_parsing() {
        assert_eq!(parse_reply("YES", 2).unwrap(), OracleReply::Yes);
        assert_eq!(parse_reply("1 -2.5", 2).unwrap(), OracleReply::Violated(vec![1.0, -2.5]));
        assert!(parse_reply("1", 2).is_err());
        assert!(parse_reply("x y", 2).is_err());
    }
}
