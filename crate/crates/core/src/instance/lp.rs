//! `Ax ≤ b` feasibility through the maximum support kernel problem.
//!
//! With `M = [A | −A | I | −b]`, a point `(u⁺, u⁻, s, t) ≥ 0` in `ker M` with
//! `t > 0` gives `x = (u⁺ − u⁻)/t` and `Ax + s/t = b`. So `Ax ≤ b` is feasible
//! iff the homogenising column lies in `S*` of `M`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{max_support_kernel, KernelCertificate};
use crate::linalg::Matrix;
use crate::report::{SolveOptions, SolveReport, SolveStatus};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpFeasibilityProblem {
    pub a: Matrix,
    pub b: Vec<f64>,
}

impl LpFeasibilityProblem {
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
        }
        if let Some(i) = b.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        Ok(LpFeasibilityProblem { a, b })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpVerdict {
    /// `None` when the kernel solver did not converge.
    pub feasible: Option<bool>,
    pub x: Option<Vec<f64>>,
    pub report: SolveReport,
}

/// Returns `M` and the index of its homogenising column.
pub fn reduce_lp_feasibility(p: &LpFeasibilityProblem) -> (Matrix, usize) {
    let (m, d) = (p.a.rows(), p.a.cols());
    let mut mat = Matrix::zeros(m, 2 * d + m + 1);
    for i in 0..m {
        for j in 0..d {
            mat[(i, j)] = p.a[(i, j)];
            mat[(i, d + j)] = -p.a[(i, j)];
        }
        mat[(i, 2 * d + i)] = 1.0;
        mat[(i, 2 * d + m)] = -p.b[i];
    }
    (mat, 2 * d + m)
}

/// `x = (u⁺ − u⁻)/t` from a kernel certificate of `M`, or `None` if `t = 0`.
pub fn recover_lp_solution(p: &LpFeasibilityProblem, m_matrix: &Matrix, cert: &KernelCertificate) -> Option<Vec<f64>> {
    let d = p.a.cols();
    let t_index = 2 * d + p.a.rows();
    if !cert.support.contains(&t_index) {
        return None;
    }
    let u = cert.unnormalized(m_matrix);
    let t = u[t_index];
    if t <= 0.0 {
        return None;
    }
    Some((0..d).map(|j| (u[j] - u[d + j]) / t).collect())
}

/// Decides `Ax ≤ b` for integral data and returns a solution when feasible.
pub fn solve_lp_feasibility(p: &LpFeasibilityProblem, options: &SolveOptions) -> Result<LpVerdict> {
    if let Some(i) = p.b.iter().position(|v| v.fract() != 0.0) {
        return Err(Error::NonInteger { row: i, col: p.a.cols() });
    }
    let (mat, t_index) = reduce_lp_feasibility(p);
    let outcome = max_support_kernel(&mat, options)?;
    let Some(cert) = outcome.certificate.filter(|_| outcome.report.status == SolveStatus::Solved) else {
        return Ok(LpVerdict { feasible: None, x: None, report: outcome.report });
    };
    let feasible = cert.support.contains(&t_index);
    let x = if feasible { recover_lp_solution(p, &mat, &cert) } else { None };
    Ok(LpVerdict { feasible: Some(feasible), x, report: outcome.report })
}
