//! Multi-rank rescaled von Neumann solvers for the image problem `Aᵀy > 0`
//! and for its maximum support version with dimension-reducing removals.

use serde::{Deserialize, Serialize};

use crate::conditioning::theta;
use crate::error::{Error, Result};
use crate::first_order::{von_neumann_bound, FirstOrderMethod, FoKind, FoStatus, Metric};
use crate::kernel::{default_max_rescalings, SolveOutcome};
use crate::linalg::{dot, norm, orthocomplement_basis, rank, scaled, Matrix, SymPosDef};
use crate::report::{BoundCheck, SolveOptions, SolveReport, SolveStatus, Stopwatch};

/// `‖Wᵀa‖ ≤ DROP_TOL·‖a‖` counts as a zero column after a removal.
pub const DROP_TOL: f64 = 1e-9;

/// Solution of the image problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageCertificate {
    pub y: Vec<f64>,
    /// 0-based indices `i` with `a_iᵀy > 0`.
    pub support: Vec<usize>,
    /// `min_{i∈T} â_iᵀŷ`
    pub min_margin: f64,
    /// `max_{i∉T} |a_iᵀy|`
    pub residual_zero: f64,
}

impl ImageCertificate {
    pub fn from_vector(a: &Matrix, y: Vec<f64>, support: Vec<usize>) -> Self {
        let ay = a.tr_mul_vec(&y);
        let norms = a.column_norms();
        let ny = norm(&y);
        let mut min_margin = f64::INFINITY;
        let mut residual_zero: f64 = 0.0;
        for j in 0..a.cols() {
            if support.binary_search(&j).is_ok() {
                let denom = norms[j] * ny;
                min_margin = min_margin.min(if denom > 0.0 { ay[j] / denom } else { 0.0 });
            } else {
                residual_zero = residual_zero.max(ay[j].abs());
            }
        }
        if support.is_empty() {
            min_margin = 0.0;
        }
        ImageCertificate { y, support, min_margin, residual_zero }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LedgerKind {
    Rescale,
    Remove,
}

/// Determinant change of one mutation of `R`, measured two ways.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub kind: LedgerKind,
    /// `det(R')/det(R)` from the Cholesky factors.
    pub ratio: f64,
    /// The same ratio from the matrix determinant lemma (rescale) or the projected
    /// determinant `‖â_k‖²_Q` (removal).
    pub predicted: f64,
    /// Lower bound the ratio must respect.
    pub bound: f64,
}

impl LedgerEntry {
    pub fn holds(&self, rel: f64) -> bool {
        self.ratio >= self.bound * (1.0 - rel)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ImageEvent {
    /// `Aᵀȳ > 0` on the active set.
    Separated,
    Rescale { fo_iterations: usize },
    Remove { column: usize, dropped: Vec<usize> },
    /// Every column was removed; `ȳ = 0`.
    Exhausted,
    /// The first-order method ran out of budget.
    Stalled,
}

/// Step-wise image solver. With `theta` set it runs the maximum support variant.
#[derive(Clone, Debug)]
pub struct ImageSolver {
    a: Matrix,
    cur: Matrix,
    active: Vec<usize>,
    r: SymPosDef,
    u: Matrix,
    log_alpha: f64,
    gamma: Vec<f64>,
    eps: f64,
    theta: Option<f64>,
    method: FoKind,
    budget: usize,
    t: u64,
    removals: u64,
    fo_iters: u64,
    max_fo_call: u64,
    log_det: f64,
    ledger: Vec<LedgerEntry>,
    n_total: usize,
    result: Option<Vec<f64>>,
    exhausted: bool,
}

impl ImageSolver {
    /// Solver over the columns listed in `active` (0-based). `a` must have full row rank.
    pub fn new(a: &Matrix, active: Vec<usize>, eps: f64, theta: Option<f64>) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")));
        }
        let m = a.rows();
        let rk = rank(a);
        if rk < m {
            return Err(Error::RankDeficient { rank: rk, rows: m });
        }
        let norms = a.column_norms();
        if let Some(&j) = active.iter().find(|&&j| norms[j] == 0.0) {
            return Err(Error::DegenerateColumn { index: j });
        }
        Ok(ImageSolver {
            cur: a.select_columns(&active),
            a: a.clone(),
            active,
            r: SymPosDef::identity(m),
            u: Matrix::identity(m),
            log_alpha: 0.0,
            gamma: vec![0.0; a.cols()],
            eps,
            theta,
            method: FoKind::VonNeumann,
            budget: von_neumann_bound(eps),
            t: 0,
            removals: 0,
            fo_iters: 0,
            max_fo_call: 0,
            log_det: 0.0,
            ledger: Vec::new(),
            n_total: a.cols(),
            result: None,
            exhausted: false,
        })
    }

    pub fn with_method(mut self, method: FoKind, budget: usize) -> Self {
        self.method = method;
        self.budget = budget;
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn metric(&self) -> &SymPosDef {
        &self.r
    }

    pub fn basis(&self) -> &Matrix {
        &self.u
    }

    pub fn dimension(&self) -> usize {
        self.r.dim()
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn current_columns(&self) -> &Matrix {
        &self.cur
    }

    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    /// Running sum of logarithms of the predicted determinant ratios.
    pub fn ledger_log_det(&self) -> f64 {
        self.log_det
    }

    pub fn rescalings(&self) -> u64 {
        self.t
    }

    pub fn removals(&self) -> u64 {
        self.removals
    }

    pub fn fo_iterations(&self) -> u64 {
        self.fo_iters
    }

    pub fn max_fo_iterations_per_call(&self) -> u64 {
        self.max_fo_call
    }

    pub fn result(&self) -> Option<&[f64]> {
        self.result.as_deref()
    }

    /// `‖â_k‖_Q` for the current column at local position `i`.
    fn local_q_norm(&self, i: usize) -> f64 {
        let col = self.cur.column(i);
        self.r.inverse_norm(&col) / norm(&col)
    }

    /// `‖â_j‖_Q` for an active original column `j`.
    pub fn column_q_norm(&self, j: usize) -> Option<f64> {
        self.active.iter().position(|&k| k == j).map(|i| self.local_q_norm(i))
    }

    /// Active columns with `‖â_k‖_Q < θ`, as original indices.
    pub fn short_columns(&self) -> Vec<usize> {
        let Some(theta) = self.theta else { return Vec::new() };
        (0..self.active.len())
            .filter(|&i| self.local_q_norm(i) < theta)
            .map(|i| self.active[i])
            .collect()
    }

    /// `αI + Σ γ_i â_iâ_iᵀ` over the active columns in the current basis.
    fn recomposed(&self) -> Matrix {
        let mut rec = Matrix::identity(self.cur.rows()).scale(self.alpha());
        for (i, &j) in self.active.iter().enumerate() {
            let col = self.cur.column(i);
            let c = self.gamma[j] / dot(&col, &col);
            rec.rank_one_update(c, &col, &col);
        }
        rec
    }

    /// `max |R − αI − Σ γ_i â_iâ_iᵀ|` over the entries, relative to `max(1, max|R|)`.
    pub fn decomposition_residual(&self) -> f64 {
        if self.r.dim() == 0 {
            return 0.0;
        }
        let scale = self.r.matrix().max_abs().max(1.0);
        self.recomposed().max_abs_diff(self.r.matrix()) / scale
    }

    pub fn step(&mut self) -> Result<ImageEvent> {
        if self.result.is_some() {
            return Ok(if self.exhausted { ImageEvent::Exhausted } else { ImageEvent::Separated });
        }
        if let Some(event) = self.remove_shortest()? {
            return Ok(event);
        }
        if self.active.is_empty() {
            self.result = Some(vec![0.0; self.a.rows()]);
            self.exhausted = true;
            return Ok(ImageEvent::Exhausted);
        }
        let gram = self.r.inverse_gram(&self.cur);
        let (state, outcome) =
            self.method.run(&self.cur, Metric::InverseOf(&self.r), self.eps, self.budget, Some(&gram))?;
        self.fo_iters += outcome.iterations as u64;
        self.max_fo_call = self.max_fo_call.max(outcome.iterations as u64);
        match outcome.status {
            FoStatus::Separated => {
                let qy = self.r.solve(&state.y);
                self.result = Some(self.u.mul_vec(&qy));
                Ok(ImageEvent::Separated)
            }
            FoStatus::SmallNorm => {
                self.rescale(&state.x, &gram)?;
                Ok(ImageEvent::Rescale { fo_iterations: outcome.iterations })
            }
            FoStatus::BudgetExhausted => Ok(ImageEvent::Stalled),
        }
    }

    /// `R := (R + Σ x_i a_ia_iᵀ/‖a_i‖²_Q)/(1+ε)`
    fn rescale(&mut self, x: &[f64], gram: &Matrix) -> Result<()> {
        let total: f64 = x.iter().sum();
        if x.iter().any(|v| *v < 0.0) || (total - 1.0).abs() > 1e-8 {
            return Err(Error::ContractViolation(format!("rescaling weights sum to {total}")));
        }
        let d = self.r.dim();
        let shrink = 1.0 + self.eps;
        let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] > 0.0).collect();
        let cols: Vec<Vec<f64>> = support.iter().map(|&i| self.cur.column(i)).collect();
        let terms = support.iter().zip(&cols).map(|(&i, c)| (x[i] / gram[(i, i)], c.as_slice()));
        let next = self.r.add_rank_ones(terms, 1.0 / shrink)?;

        // det(I + D^½ G_JJ D^½) with D = diag(x_i/‖a_i‖²_Q)
        let k = support.len();
        let mut small = Matrix::identity(k);
        for (p, &i) in support.iter().enumerate() {
            for (q, &j) in support.iter().enumerate() {
                let w = (x[i] / gram[(i, i)]).sqrt() * (x[j] / gram[(j, j)]).sqrt();
                small[(p, q)] += w * gram[(i, j)];
            }
        }
        let log_pred = SymPosDef::new(small)?.log_det() - d as f64 * shrink.ln();
        let ratio = (next.log_det() - self.r.log_det()).exp();
        self.ledger.push(LedgerEntry {
            kind: LedgerKind::Rescale,
            ratio,
            predicted: log_pred.exp(),
            bound: 2.0 / shrink.powi(d as i32),
        });
        self.log_det += log_pred;
        log::trace!("image rescale {}: det ratio {ratio:.6} (predicted {:.6})", self.t + 1, log_pred.exp());

        for (i, &j) in self.active.iter().enumerate() {
            let col = self.cur.column(i);
            let qnorm_hat_sq = gram[(i, i)] / dot(&col, &col);
            self.gamma[j] = (self.gamma[j] + x[i] / qnorm_hat_sq) / shrink;
        }
        self.log_alpha -= shrink.ln();
        self.r = next;
        self.t += 1;
        Ok(())
    }

    fn remove_shortest(&mut self) -> Result<Option<ImageEvent>> {
        let Some(theta) = self.theta else { return Ok(None) };
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.active.len() {
            let q = self.local_q_norm(i);
            if q < theta && best.is_none_or(|(_, b)| q < b) {
                best = Some((i, q));
            }
        }
        let Some((k, qnorm)) = best else { return Ok(None) };
        let column = self.active[k];
        let ak = self.cur.column(k);
        let ahat = scaled(1.0 / norm(&ak), &ak);
        let w = orthocomplement_basis(&ahat)?;
        let projected = w.transpose().matmul(&self.cur);
        let old_norms = self.cur.column_norms();
        let new_norms = projected.column_norms();
        let mut keep = Vec::new();
        let mut dropped = Vec::new();
        for i in 0..self.active.len() {
            if i != k && new_norms[i] > DROP_TOL * old_norms[i] {
                keep.push(i);
            } else if i != k {
                dropped.push(self.active[i]);
            }
        }
        let next = self.r.congruence(&w)?;
        let ratio = (next.log_det() - self.r.log_det()).exp();
        let n1 = (self.n_total + 1) as f64;
        self.ledger.push(LedgerEntry {
            kind: LedgerKind::Remove,
            ratio,
            predicted: qnorm * qnorm,
            bound: theta * theta / (2.0 * n1),
        });
        self.log_det += 2.0 * qnorm.ln();
        for &i in &keep {
            let j = self.active[i];
            let f = new_norms[i] / old_norms[i];
            self.gamma[j] *= f * f;
        }
        self.gamma[column] = 0.0;
        for &j in &dropped {
            self.gamma[j] = 0.0;
        }
        self.cur = projected.select_columns(&keep);
        self.active = keep.iter().map(|&i| self.active[i]).collect();
        self.u = self.u.matmul(&w);
        self.r = next;
        self.removals += 1;
        log::debug!("image removal of column {column}, {} dropped, r = {}", dropped.len(), self.r.dim());
        Ok(Some(ImageEvent::Remove { column, dropped }))
    }

    pub fn certificate(&self) -> Option<ImageCertificate> {
        let y = self.result.clone()?;
        let mut support = self.active.clone();
        support.sort_unstable();
        Some(ImageCertificate::from_vector(&self.a, y, support))
    }
}

/// `⌈m·log_{3/2}(2/ρ)⌉`
pub fn image_rescaling_bound(m: usize, rho: f64) -> f64 {
    (m as f64 * (2.0 / rho).ln() / 1.5f64.ln()).ceil().max(0.0)
}

fn drive(solver: &mut ImageSolver, max_rescalings: u64, max_iterations: u64) -> Result<SolveStatus> {
    loop {
        if solver.rescalings() > max_rescalings || solver.fo_iterations() > max_iterations {
            return Ok(SolveStatus::NoConverge);
        }
        match solver.step()? {
            ImageEvent::Separated | ImageEvent::Exhausted => return Ok(SolveStatus::Solved),
            ImageEvent::Stalled => return Ok(SolveStatus::NoConverge),
            _ => {}
        }
    }
}

fn report_for(solver: &ImageSolver, status: SolveStatus, clock: &Stopwatch) -> SolveOutcome<ImageCertificate> {
    let certificate = if status == SolveStatus::Solved { solver.certificate() } else { None };
    let mut report = SolveReport::new(status);
    report.fo_iters = solver.fo_iterations();
    report.rescalings = solver.rescalings();
    report.removals = solver.removals();
    if let Some(c) = &certificate {
        report.residual = c.residual_zero;
        report.margin = c.min_margin;
    }
    report.wall_ms = clock.elapsed_ms();
    let per_call = von_neumann_bound(solver.epsilon()) as f64;
    report.bound_checks.push(BoundCheck::at_most(
        "fo iterations per call <= ceil(1/eps^2)",
        per_call,
        solver.max_fo_iterations_per_call() as f64,
    ));
    if let Some(worst) = solver
        .ledger()
        .iter()
        .filter(|e| e.kind == LedgerKind::Rescale)
        .map(|e| e.ratio)
        .reduce(f64::min)
    {
        report.bound_checks.push(BoundCheck::at_least("det ratio per rescale >= 16/9", 16.0 / 9.0, worst));
    }
    SolveOutcome { certificate, report }
}

fn limits(a: &Matrix, options: &SolveOptions) -> (u64, u64) {
    let max_r = options.max_rescalings.unwrap_or_else(|| default_max_rescalings(a));
    let eps = options.epsilon_for(a.rows());
    let default_it = (max_r + 1).saturating_mul(von_neumann_bound(eps) as u64).saturating_mul(a.cols() as u64 + 1);
    (max_r, options.max_iterations.unwrap_or(default_it))
}

/// Multi-rank rescaled von Neumann algorithm for `Aᵀy > 0`; `A` needs full row rank.
pub fn full_support_image(a: &Matrix, options: &SolveOptions) -> Result<SolveOutcome<ImageCertificate>> {
    let clock = Stopwatch::start();
    let m = a.rows();
    let eps = options.epsilon_for(m);
    let budget = von_neumann_bound(eps);
    let mut solver =
        ImageSolver::new(a, (0..a.cols()).collect(), eps, None)?.with_method(options.first_order, budget);
    let (max_r, max_it) = limits(a, options);
    let status = drive(&mut solver, max_r, max_it)?;
    let mut outcome = report_for(&solver, status, &clock);
    if let Some(rho) = options.known_rho {
        if rho > 0.0 {
            outcome.report.bound_checks.push(BoundCheck::at_most(
                "rescalings <= ceil(m log_1.5(2/rho))",
                image_rescaling_bound(m, rho),
                solver.rescalings() as f64,
            ));
        }
    }
    Ok(outcome)
}

/// Maximum support image solver for integral `A` of full row rank: returns
/// `ȳ` with `a_iᵀȳ > 0` exactly for `i ∈ T*` and `a_iᵀȳ = 0` otherwise.
pub fn max_support_image(a: &Matrix, options: &SolveOptions) -> Result<SolveOutcome<ImageCertificate>> {
    if let Some((row, col)) = a.first_non_integer() {
        return Err(Error::NonInteger { row, col });
    }
    let clock = Stopwatch::start();
    let m = a.rows();
    let eps = options.epsilon_for(m);
    let budget = von_neumann_bound(eps);
    let norms = a.column_norms();
    let active: Vec<usize> = (0..a.cols()).filter(|&j| norms[j] > 0.0).collect();
    let mut solver = ImageSolver::new(a, active, eps, Some(theta(a)))?.with_method(options.first_order, budget);
    let (max_r, max_it) = limits(a, options);
    let status = drive(&mut solver, max_r, max_it)?;
    let mut outcome = report_for(&solver, status, &clock);
    if let Some(worst) = solver
        .ledger()
        .iter()
        .filter(|e| e.kind == LedgerKind::Remove)
        .map(|e| e.ratio / e.bound)
        .reduce(f64::min)
    {
        outcome.report.bound_checks.push(BoundCheck::at_least("removal det ratio / (theta^2/(2(n+1)))", 1.0, worst));
    }
    Ok(outcome)
}
