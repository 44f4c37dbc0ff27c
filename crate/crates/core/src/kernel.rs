//! Rescaled Dunagan-Vempala solvers for the kernel problem `Ax = 0, x > 0`
//! and for its maximum support version.
//!
//! The solver keeps the rescaled columns `a'_j = M â_j` explicitly, with `M`
//! the product of the maps `I + ŷŷᵀ` applied so far. The metric of the
//! `Q`-form is recovered as `Q = MᵀM / (1+3ε)^{2t}`.

use serde::{Deserialize, Serialize};

use crate::conditioning::{encoding_length, theta};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, kernel_projector, norm, norm_inf, rank, Matrix, Projector, SymPosDef};
use crate::report::{BoundCheck, SolveOptions, SolveReport, SolveStatus, Stopwatch};

const REFRESH_PERIOD: u64 = 1_000;
const GRAM_REFRESH_PERIOD: u64 = 32;
const RENORMALIZE_ABOVE: f64 = 1e64;

/// Relative positivity threshold for `Πx`, so that rounding noise on a
/// coordinate that is zero in exact arithmetic does not count as positive.
pub const SUPPORT_POS_TOL: f64 = 1e-9;

/// Solution of the kernel problem on the normalised columns `Â`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelCertificate {
    pub x: Vec<f64>,
    /// 0-based column indices.
    pub support: Vec<usize>,
    /// `‖Â x‖∞`
    pub residual: f64,
    pub min_support_value: f64,
}

impl KernelCertificate {
    /// The same solution for the unnormalised columns: `x_i / ‖a_i‖`.
    pub fn unnormalized(&self, a: &Matrix) -> Vec<f64> {
        a.column_norms()
            .iter()
            .zip(&self.x)
            .map(|(n, x)| if *n > 0.0 { x / n } else { *x })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// Result of a solve: the certificate when one was found and the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome<C> {
    pub certificate: Option<C>,
    pub report: SolveReport,
}

/// Observable effect of one solver step.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelEvent {
    Dv { column: usize, cosine: f64 },
    Rescale { cosine: f64, removed: Vec<usize> },
    /// `Πx > 0` on the active set, or the active set is empty.
    Done,
    /// Rescaling disabled and no column makes an obtuse angle with `y`.
    Stalled,
}

/// `(I + ŷŷᵀ) A`
pub fn rescale_matrix(a: &Matrix, y: &[f64]) -> Result<Matrix> {
    if y.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: y.len() });
    }
    let ny = norm(y);
    if ny == 0.0 {
        return Err(Error::ContractViolation("rescaling along y = 0".into()));
    }
    let v: Vec<f64> = y.iter().map(|c| c / ny).collect();
    let mut out = a.clone();
    let w = a.tr_mul_vec(&v);
    out.rank_one_update(1.0, &v, &w);
    Ok(out)
}

/// `Q' = (Q + 3 Qyyᵀ Q / ‖y‖²_Q) / (1+3ε)²`
pub fn rescale_q_form(q: &SymPosDef, y: &[f64], eps: f64) -> Result<SymPosDef> {
    if y.len() != q.dim() {
        return Err(Error::DimensionMismatch { expected: q.dim(), found: y.len() });
    }
    let qy = q.apply(y);
    let ny2 = dot(y, &qy);
    if !(ny2 > 0.0) {
        return Err(Error::ContractViolation("rescaling along y = 0".into()));
    }
    let mut next = q.matrix().clone();
    next.rank_one_update(3.0 / ny2, &qy, &qy);
    let s = 1.0 + 3.0 * eps;
    SymPosDef::new(next.scale(1.0 / (s * s)))
}

/// Step-wise kernel solver. With `theta` set it runs the maximum support
/// variant with the column sweep and removals.
#[derive(Clone, Debug)]
pub struct KernelSolver {
    ahat: Matrix,
    cur: Matrix,
    transform: Matrix,
    gram: Matrix,
    eps: f64,
    theta: Option<f64>,
    rescaling: bool,
    log_offset: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    xbar: Vec<f64>,
    active: Vec<bool>,
    suspect: Vec<bool>,
    support: Vec<usize>,
    projector: Projector,
    support_rank: usize,
    t: u64,
    dv_updates: u64,
    removals: u64,
    since_refresh: u64,
    done: bool,
}

impl KernelSolver {
    pub fn new(a: &Matrix, eps: f64, theta: Option<f64>) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")));
        }
        if let Some(j) = a.zero_columns().first() {
            return Err(Error::DegenerateColumn { index: *j });
        }
        let n = a.cols();
        let ahat = a.normalized_columns();
        let mut solver = KernelSolver {
            cur: ahat.clone(),
            transform: Matrix::identity(a.rows()),
            gram: ahat.gram(),
            ahat,
            eps,
            theta,
            rescaling: true,
            log_offset: 0.0,
            x: vec![0.0; n],
            y: vec![0.0; a.rows()],
            z: vec![0.0; n],
            xbar: vec![0.0; n],
            active: vec![true; n],
            suspect: vec![false; n],
            support: (0..n).collect(),
            projector: kernel_projector(&Matrix::zeros(1, n)),
            support_rank: 0,
            t: 0,
            dv_updates: 0,
            removals: 0,
            since_refresh: 0,
            done: false,
        };
        solver.reset_support();
        Ok(solver)
    }

    /// Disables rescaling: plain coordinate descent with finite convergence.
    pub fn without_rescaling(mut self) -> Self {
        self.rescaling = false;
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// `y = Σ_{j∈S} x_j a'_j` in the rescaled space.
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Projection `Πx` onto `ker(Â_S)`, zero outside `S`.
    pub fn xbar(&self) -> &[f64] {
        &self.xbar
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn suspects(&self) -> Vec<usize> {
        (0..self.suspect.len()).filter(|&j| self.suspect[j]).collect()
    }

    pub fn rescalings(&self) -> u64 {
        self.t
    }

    pub fn dv_updates(&self) -> u64 {
        self.dv_updates
    }

    pub fn removals(&self) -> u64 {
        self.removals
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn normalized_columns(&self) -> &Matrix {
        &self.ahat
    }

    /// Rescaled columns `M â_j`, up to a common positive factor.
    pub fn current_columns(&self) -> &Matrix {
        &self.cur
    }

    /// Accumulated linear map `M`, up to the same common factor.
    pub fn transform(&self) -> &Matrix {
        &self.transform
    }

    fn q_scale_log(&self) -> f64 {
        self.log_offset - self.t as f64 * (1.0 + 3.0 * self.eps).ln()
    }

    /// `‖â_j‖_Q`
    pub fn column_q_norm(&self, j: usize) -> f64 {
        self.gram[(j, j)].sqrt() * self.q_scale_log().exp()
    }

    /// `‖y‖_Q` of the original-space aggregate `Â_S x`.
    pub fn y_q_norm(&self) -> f64 {
        norm(&self.y) * self.q_scale_log().exp()
    }

    /// `Q = MᵀM/(1+3ε)^{2t}`
    pub fn q_metric(&self) -> Matrix {
        let s = (2.0 * self.q_scale_log()).exp();
        self.transform.gram().scale(s)
    }

    fn positive_tol(&self) -> f64 {
        let xmax = self.support.iter().map(|&j| self.x[j]).fold(0.0, f64::max);
        SUPPORT_POS_TOL * xmax
    }

    fn is_positive(&self) -> bool {
        let tol = self.positive_tol();
        self.support.iter().all(|&j| self.xbar[j] > tol)
    }

    fn reset_support(&mut self) {
        self.support = (0..self.active.len()).filter(|&j| self.active[j]).collect();
        self.suspect.iter_mut().for_each(|s| *s = false);
        self.x.iter_mut().for_each(|v| *v = 0.0);
        for &j in &self.support {
            self.x[j] = 1.0;
        }
        if self.support.is_empty() {
            self.support_rank = 0;
            self.y.iter_mut().for_each(|v| *v = 0.0);
            self.z.iter_mut().for_each(|v| *v = 0.0);
            self.xbar.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let a_s = self.ahat.select_columns(&self.support);
        self.projector = kernel_projector(&a_s);
        self.support_rank = self.projector.rank;
        self.refresh();
    }

    /// Recomputes `y`, `z = A'ᵀy` and `Πx` from `x`.
    fn refresh(&mut self) {
        let mut y = vec![0.0; self.cur.rows()];
        for &j in &self.support {
            axpy(self.x[j], &self.cur.column(j), &mut y);
        }
        self.z = self.cur.tr_mul_vec(&y);
        self.y = y;
        let xs: Vec<f64> = self.support.iter().map(|&j| self.x[j]).collect();
        let px = self.projector.apply(&xs);
        self.xbar.iter_mut().for_each(|v| *v = 0.0);
        for (local, &j) in self.support.iter().enumerate() {
            self.xbar[j] = px[local];
        }
        self.since_refresh = 0;
    }

    pub fn step(&mut self) -> Result<KernelEvent> {
        if self.done {
            return Ok(KernelEvent::Done);
        }
        if self.support.is_empty() || self.is_positive() {
            self.refresh_if_stale();
            if self.support.is_empty() || self.is_positive() {
                self.done = true;
                return Ok(KernelEvent::Done);
            }
        }
        let yn = norm(&self.y);
        if yn == 0.0 {
            return Err(Error::ContractViolation("y vanished while Πx is not positive".into()));
        }
        let (k, cosine) = self
            .support
            .iter()
            .map(|&j| (j, self.z[j] / (self.gram[(j, j)].sqrt() * yn)))
            .fold((usize::MAX, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
        if cosine < -self.eps || (!self.rescaling && cosine < 0.0) {
            self.dv_update(k);
            return Ok(KernelEvent::Dv { column: k, cosine });
        }
        if !self.rescaling {
            return Ok(KernelEvent::Stalled);
        }
        self.rescale(yn);
        log::trace!("kernel rescale {}: cosine {cosine:.3e}, |y| {yn:.3e}, {} dv updates", self.t, self.dv_updates);
        let removed = self.sweep()?;
        Ok(KernelEvent::Rescale { cosine, removed })
    }

    fn refresh_if_stale(&mut self) {
        if self.since_refresh > 0 && !self.support.is_empty() {
            self.refresh();
        }
    }

    fn dv_update(&mut self, k: usize) {
        let delta = -self.z[k] / self.gram[(k, k)];
        self.x[k] += delta;
        axpy(delta, &self.cur.column(k), &mut self.y);
        for (j, zj) in self.z.iter_mut().enumerate() {
            *zj += delta * self.gram[(k, j)];
        }
        let local = self.support.binary_search(&k).expect("update column is active");
        let pk = self.projector.column(local);
        for (l, &j) in self.support.iter().enumerate() {
            self.xbar[j] += delta * pk[l];
        }
        self.dv_updates += 1;
        self.since_refresh += 1;
        if self.since_refresh >= REFRESH_PERIOD {
            self.refresh();
        }
    }

    fn rescale(&mut self, yn: f64) {
        let v: Vec<f64> = self.y.iter().map(|c| c / yn).collect();
        let w: Vec<f64> = self.z.iter().map(|c| c / yn).collect();
        self.cur.rank_one_update(1.0, &v, &w);
        let vm = self.transform.tr_mul_vec(&v);
        self.transform.rank_one_update(1.0, &v, &vm);
        self.t += 1;
        if self.t.is_multiple_of(GRAM_REFRESH_PERIOD) {
            self.gram = self.cur.gram();
        } else {
            self.gram.rank_one_update(3.0 / (yn * yn), &self.z, &self.z);
        }
        self.y.iter_mut().for_each(|c| *c *= 2.0);
        self.z.iter_mut().for_each(|c| *c *= 4.0);
        let big = self.support.iter().map(|&j| self.gram[(j, j)]).fold(0.0, f64::max);
        if big > RENORMALIZE_ABOVE {
            let s = 1.0 / big.sqrt();
            self.cur = self.cur.scale(s);
            self.transform = self.transform.scale(s);
            self.gram = self.gram.scale(s * s);
            self.y.iter_mut().for_each(|c| *c *= s);
            self.z.iter_mut().for_each(|c| *c *= s * s);
            self.log_offset -= s.ln();
        }
    }

    /// Marks long columns as suspects and removes them once they carry rank.
    fn sweep(&mut self) -> Result<Vec<usize>> {
        let Some(theta) = self.theta else { return Ok(Vec::new()) };
        let limit = 1.0 / theta;
        let mut grew = false;
        for idx in 0..self.support.len() {
            let j = self.support[idx];
            if !self.suspect[j] && self.column_q_norm(j) > limit {
                self.suspect[j] = true;
                grew = true;
            }
        }
        if !grew {
            return Ok(Vec::new());
        }
        let keep: Vec<usize> = self.support.iter().copied().filter(|&j| !self.suspect[j]).collect();
        let keep_rank = if keep.is_empty() { 0 } else { rank(&self.ahat.select_columns(&keep)) };
        if keep_rank >= self.support_rank {
            return Ok(Vec::new());
        }
        let removed = self.suspects();
        for &j in &removed {
            self.active[j] = false;
        }
        self.removals += 1;
        log::debug!("kernel removal of {} columns after {} rescalings", removed.len(), self.t);
        self.reset_support();
        Ok(removed)
    }

    /// `Tᵀy` for the accumulated transform `T`, so `a'_jᵀy = â_jᵀ(Tᵀy)`.
    pub fn image_witness(&self) -> Vec<f64> {
        self.transform.tr_mul_vec(&self.y)
    }

    /// Current `x̄ = Πx` as a certificate on `Â`.
    pub fn certificate(&self) -> KernelCertificate {
        let mut x = vec![0.0; self.xbar.len()];
        for &j in &self.support {
            x[j] = self.xbar[j];
        }
        let residual = norm_inf(&self.ahat.mul_vec(&x));
        let min_support_value = self.support.iter().map(|&j| x[j]).fold(f64::INFINITY, f64::min);
        KernelCertificate {
            x,
            support: self.support.clone(),
            residual,
            min_support_value: if self.support.is_empty() { 0.0 } else { min_support_value },
        }
    }
}

/// Default rescaling cap `10·m·(log₂ n + 4L)`; `L` is the encoding length of
/// integral input and 64 otherwise.
pub fn default_max_rescalings(a: &Matrix) -> u64 {
    let l = encoding_length(a).unwrap_or(64).min(4096) as f64;
    let m = a.rows() as f64;
    let n = (a.cols().max(2)) as f64;
    (10.0 * m * (n.log2() + 4.0 * l)).ceil() as u64
}

/// Default cap on first-order updates: `(K+1)` phases, each allowed the
/// number of `(1-ε²)` norm contractions that can separate `‖y‖ ≤ √n·2^K`
/// from the termination radius `θ`.
pub fn default_max_iterations(a: &Matrix, eps: f64, max_rescalings: u64) -> u64 {
    let l = encoding_length(a).unwrap_or(64).min(4096) as f64;
    let n = a.cols().max(2) as f64;
    let ln2 = std::f64::consts::LN_2;
    let phase = ((2.0 * n.ln() + 2.0 * ln2 + 8.0 * l * ln2) / (eps * eps)).ceil();
    let total = phase * (max_rescalings as f64 + 1.0);
    if total > 1e15 {
        1_000_000_000_000_000
    } else {
        total as u64
    }
}

/// `⌈m·log_{3/2}(1/|ρ|)⌉`
pub fn kernel_rescaling_bound(m: usize, rho: f64) -> f64 {
    (m as f64 * (1.0 / rho.abs()).ln() / 1.5f64.ln()).ceil().max(0.0)
}

fn drive(solver: &mut KernelSolver, max_rescalings: u64, max_iterations: u64, detect: bool) -> Result<SolveStatus> {
    loop {
        if solver.rescalings() > max_rescalings || solver.dv_updates() >= max_iterations {
            return Ok(SolveStatus::NoConverge);
        }
        match solver.step()? {
            KernelEvent::Done => return Ok(SolveStatus::Solved),
            KernelEvent::Stalled => return Ok(SolveStatus::NoConverge),
            KernelEvent::Rescale { cosine, .. } if detect && cosine > 0.0 => {
                let w = solver.image_witness();
                if solver.ahat.tr_mul_vec(&w).iter().all(|v| *v > 0.0) {
                    return Ok(SolveStatus::InfeasibleDetected);
                }
            }
            _ => {}
        }
    }
}

fn finish(
    solver: &KernelSolver,
    status: SolveStatus,
    clock: &Stopwatch,
    n: usize,
    map: &[usize],
    zero_cols: &[usize],
) -> SolveOutcome<KernelCertificate> {
    let inner = solver.certificate();
    let mut report = SolveReport::new(status);
    report.fo_iters = solver.dv_updates();
    report.rescalings = solver.rescalings();
    report.removals = solver.removals();
    report.residual = inner.residual;
    report.margin = inner.min_support_value;
    report.wall_ms = clock.elapsed_ms();
    let certificate = (status == SolveStatus::Solved).then(|| {
        let mut x = vec![0.0; n];
        let mut support = Vec::new();
        for (local, &j) in map.iter().enumerate() {
            x[j] = inner.x[local];
        }
        for &j in &inner.support {
            support.push(map[j]);
        }
        for &j in zero_cols {
            x[j] = 1.0;
            support.push(j);
        }
        support.sort_unstable();
        let min_support_value = support.iter().map(|&j| x[j]).fold(f64::INFINITY, f64::min);
        KernelCertificate {
            x,
            support: support.clone(),
            residual: inner.residual,
            min_support_value: if support.is_empty() { 0.0 } else { min_support_value },
        }
    });
    SolveOutcome { certificate, report }
}

/// Rescaled Dunagan-Vempala algorithm for `Âx = 0, x > 0`.
///
/// Ends with `InfeasibleDetected` once every rescaled column makes a positive
/// angle with `y`, so that `Âᵀ(Tᵀy) > 0`; otherwise an infeasible instance
/// runs into the limits and ends with `NoConverge`.
pub fn full_support_kernel(a: &Matrix, options: &SolveOptions) -> Result<SolveOutcome<KernelCertificate>> {
    let clock = Stopwatch::start();
    let m = a.rows();
    let eps = options.epsilon_for(m);
    let mut solver = KernelSolver::new(a, eps, None)?;
    let max_r = options.max_rescalings.unwrap_or_else(|| default_max_rescalings(a));
    let max_it = options.max_iterations.unwrap_or_else(|| default_max_iterations(a, eps, max_r));
    let status = drive(&mut solver, max_r, max_it, true)?;
    let map: Vec<usize> = (0..a.cols()).collect();
    let mut outcome = finish(&solver, status, &clock, a.cols(), &map, &[]);
    if let Some(rho) = options.known_rho {
        if rho < 0.0 {
            outcome.report.bound_checks.push(BoundCheck::at_most(
                "rescalings <= ceil(m log_1.5(1/|rho|))",
                kernel_rescaling_bound(m, rho),
                solver.rescalings() as f64,
            ));
        }
    }
    Ok(outcome)
}

/// Maximum support kernel solver for integral `A`: returns `x̄ ≥ 0` with
/// `Âx̄ = 0` and `supp(x̄) = S*`. Zero columns belong to `S*` trivially and
/// are set to one.
pub fn max_support_kernel(a: &Matrix, options: &SolveOptions) -> Result<SolveOutcome<KernelCertificate>> {
    if let Some((row, col)) = a.first_non_integer() {
        return Err(Error::NonInteger { row, col });
    }
    let clock = Stopwatch::start();
    let m = a.rows();
    let eps = options.epsilon_for(m);
    let th = theta(a);
    let zero_cols = a.zero_columns();
    let map: Vec<usize> = (0..a.cols()).filter(|j| !zero_cols.contains(j)).collect();
    if map.is_empty() {
        return Err(Error::InvalidArgument("matrix is zero".into()));
    }
    let reduced = a.select_columns(&map);
    let mut solver = KernelSolver::new(&reduced, eps, Some(th))?;
    let max_r = options.max_rescalings.unwrap_or_else(|| default_max_rescalings(a));
    let max_it = options.max_iterations.unwrap_or_else(|| default_max_iterations(a, eps, max_r));
    let status = drive(&mut solver, max_r, max_it, false)?;
    let mut outcome = finish(&solver, status, &clock, a.cols(), &map, &zero_cols);
    outcome.report.bound_checks.push(BoundCheck::at_most(
        "rescalings <= 10 m (log2 n + 4L)",
        default_max_rescalings(a) as f64,
        solver.rescalings() as f64,
    ));
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn antipodal_pair_is_immediate() {
        let out = full_support_kernel(&mat(&[&[1.0, -1.0]]), &SolveOptions::default()).unwrap();
        let cert = out.certificate.unwrap();
        assert_eq!(cert.x, vec![1.0, 1.0]);
        assert_eq!(out.report.rescalings, 0);
        assert_eq!(out.report.fo_iters, 0);
    }

    #[test]
    fn symmetric_cross() {
        let a = mat(&[&[1.0, -1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, -1.0]]);
        let out = full_support_kernel(&a, &SolveOptions::default()).unwrap();
        assert_eq!(out.certificate.unwrap().x, vec![1.0; 4]);
    }

    #[test]
    fn rescale_forms() {
        let a = rescale_matrix(&Matrix::identity(2), &[1.0, 0.0]).unwrap();
        assert_eq!(a, mat(&[&[2.0, 0.0], &[0.0, 1.0]]));
        let eps = 1.0 / 22.0;
        let q = rescale_q_form(&SymPosDef::identity(2), &[1.0, 0.0], eps).unwrap();
        let s = (1.0 + 3.0 * eps) * (1.0 + 3.0 * eps);
        assert!((q.matrix()[(0, 0)] - 4.0 / s).abs() < 1e-14);
        assert!((q.matrix()[(1, 1)] - 1.0 / s).abs() < 1e-14);
    }

    #[test]
    fn zero_column_rejected() {
        let a = mat(&[&[1.0, 0.0, -1.0]]);
        assert!(matches!(
            full_support_kernel(&a, &SolveOptions::default()),
            Err(Error::DegenerateColumn { index: 1 })
        ));
    }

    #[test]
    fn infeasible_is_detected() {
        let out = full_support_kernel(&Matrix::identity(2), &SolveOptions::default()).unwrap();
        assert_eq!(out.report.status, SolveStatus::InfeasibleDetected);
        assert!(out.certificate.is_none());
    }

    #[test]
    fn degenerate_hits_limits() {
        let opts = SolveOptions { max_rescalings: Some(20), ..Default::default() };
        let out = full_support_kernel(&mat(&[&[1.0, -1.0, 1.0], &[0.0, 0.0, 1.0]]), &opts).unwrap();
        assert_eq!(out.report.status, SolveStatus::NoConverge);
        assert!(out.certificate.is_none());
    }

    #[test]
    fn max_support_examples() {
        let opts = SolveOptions::default();
        let a = mat(&[&[1.0, -1.0, 1.0], &[0.0, 0.0, 1.0]]);
        let cert = max_support_kernel(&a, &opts).unwrap().certificate.unwrap();
        assert_eq!(cert.support, vec![0, 1]);
        assert!((cert.x[0] - cert.x[1]).abs() < 1e-9 && cert.x[2] == 0.0);

        let cert = max_support_kernel(&Matrix::identity(2), &opts).unwrap().certificate.unwrap();
        assert!(cert.support.is_empty());
        assert_eq!(cert.x, vec![0.0, 0.0]);

        let cert = max_support_kernel(&mat(&[&[1.0, -1.0]]), &opts).unwrap().certificate.unwrap();
        assert_eq!(cert.support, vec![0, 1]);
    }

    #[test]
    fn max_support_keeps_zero_columns() {
        let a = mat(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let cert = max_support_kernel(&a, &SolveOptions::default()).unwrap().certificate.unwrap();
        assert_eq!(cert.support, vec![1]);
        assert_eq!(cert.x, vec![0.0, 1.0]);
    }
}
