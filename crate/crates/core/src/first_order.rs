//! First-order update rules used inside the rescaling loops: the Dunagan-Vempala
//! step, the perceptron step and the von Neumann algorithm in a `Q`-metric.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, Matrix, SymPosDef};

/// Steps between full recomputations of the cached inner products.
pub const DRIFT_PERIOD: usize = 10_000;

/// The inner product used by the first-order methods.
#[derive(Clone, Copy, Debug)]
pub enum Metric<'a> {
    Euclidean,
    /// `⟨v, w⟩ = vᵀ Q w`
    Direct(&'a SymPosDef),
    /// `⟨v, w⟩ = vᵀ R⁻¹ w`, evaluated with the Cholesky factor of `R`.
    InverseOf(&'a SymPosDef),
}

impl Metric<'_> {
    /// `Q v`
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Metric::Euclidean => v.to_vec(),
            Metric::Direct(q) => q.apply(v),
            Metric::InverseOf(r) => r.solve(v),
        }
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => norm(v),
            Metric::Direct(q) => q.norm(v),
            Metric::InverseOf(r) => r.inverse_norm(v),
        }
    }

    /// `AᵀQA`
    pub fn gram(&self, a: &Matrix) -> Matrix {
        match self {
            Metric::Euclidean => a.gram(),
            Metric::Direct(q) => a.transpose().matmul(&q.matrix().matmul(a)),
            Metric::InverseOf(r) => r.inverse_gram(a),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Metric::Euclidean => None,
            Metric::Direct(q) | Metric::InverseOf(q) => Some(q.dim()),
        }
    }
}

/// Iterate of a first-order method: coefficients `x` and aggregate `y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoStatus {
    /// `AᵀQy > 0` componentwise.
    Separated,
    /// `‖y‖_Q ≤ ε`.
    SmallNorm,
    BudgetExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoOutcome {
    pub status: FoStatus,
    pub iterations: usize,
}

fn column_checked(a: &Matrix, k: usize) -> Result<(Vec<f64>, f64)> {
    if k >= a.cols() {
        return Err(Error::InvalidArgument(format!("column index {k} out of range")));
    }
    let ak = a.column(k);
    let nk = norm(&ak);
    if nk == 0.0 {
        return Err(Error::DegenerateColumn { index: k });
    }
    Ok((ak, nk))
}

/// Dunagan-Vempala step on column `k`:
/// `x_k -= a_kᵀy/‖a_k‖²` and `y -= (â_kᵀy) â_k`.
pub fn dv_step(a: &Matrix, state: &FoState, k: usize) -> Result<FoState> {
    let (ak, nk) = column_checked(a, k)?;
    let c = dot(&ak, &state.y) / (nk * nk);
    let mut next = state.clone();
    next.x[k] -= c;
    axpy(-c, &ak, &mut next.y);
    Ok(next)
}

/// Perceptron step on column `k`: `y += â_k` and `x_k += 1/‖a_k‖`.
pub fn perceptron_step(a: &Matrix, state: &FoState, k: usize) -> Result<FoState> {
    let (ak, nk) = column_checked(a, k)?;
    let mut next = state.clone();
    next.x[k] += 1.0 / nk;
    axpy(1.0 / nk, &ak, &mut next.y);
    Ok(next)
}

/// Shared bookkeeping for methods that keep `y` as a combination of the
/// Q-normalised columns and track `s_i = ⟨â_i, y⟩_Q`.
struct NormalizedColumns<'a> {
    a: &'a Matrix,
    norms: Vec<f64>,
    ghat: Matrix,
}

impl<'a> NormalizedColumns<'a> {
    fn new(a: &'a Matrix, metric: Metric<'_>, gram: Option<&Matrix>) -> Result<Self> {
        if let Some(d) = metric.dim() {
            if d != a.rows() {
                return Err(Error::DimensionMismatch { expected: d, found: a.rows() });
            }
        }
        let g = match gram {
            Some(g) => {
                if g.rows() != a.cols() || g.cols() != a.cols() {
                    return Err(Error::DimensionMismatch { expected: a.cols(), found: g.rows() });
                }
                g.clone()
            }
            None => metric.gram(a),
        };
        let n = a.cols();
        let norms: Vec<f64> = (0..n).map(|i| g[(i, i)].max(0.0).sqrt()).collect();
        if let Some(i) = norms.iter().position(|v| *v == 0.0) {
            return Err(Error::DegenerateColumn { index: i });
        }
        let mut ghat = g;
        for i in 0..n {
            for j in 0..n {
                ghat[(i, j)] /= norms[i] * norms[j];
            }
        }
        Ok(NormalizedColumns { a, norms, ghat })
    }

    fn n(&self) -> usize {
        self.a.cols()
    }

    /// `y = Σ x_i a_i/‖a_i‖_Q`
    fn aggregate(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.a.rows()];
        for (i, xi) in x.iter().enumerate() {
            if *xi != 0.0 {
                axpy(xi / self.norms[i], &self.a.column(i), &mut y);
            }
        }
        y
    }

    fn inner_products(&self, x: &[f64]) -> Vec<f64> {
        self.ghat.mul_vec(x)
    }

    /// Whether `AᵀQy > 0` for `y = aggregate(x)`, evaluated directly rather
    /// than from the cached inner products.
    fn separates(&self, metric: Metric<'_>, x: &[f64]) -> bool {
        let qy = metric.apply(&self.aggregate(x));
        self.a.tr_mul_vec(&qy).iter().all(|v| *v > 0.0)
    }

    fn argmin(s: &[f64]) -> usize {
        let mut k = 0;
        for (i, v) in s.iter().enumerate() {
            if *v < s[k] {
                k = i;
            }
        }
        k
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")));
    }
    Ok(())
}

/// Iteration bound `⌈1/ε²⌉` of the von Neumann algorithm.
pub fn von_neumann_bound(eps: f64) -> usize {
    (1.0 / (eps * eps)).ceil() as usize
}

/// Von Neumann algorithm in the metric `Q`, started at `y = a₁/‖a₁‖_Q`.
///
/// Stops when `AᵀQy > 0` (separated) or `‖y‖_Q ≤ ε` (small norm). `gram` may
/// carry a precomputed `AᵀQA`.
pub fn von_neumann(
    a: &Matrix,
    metric: Metric<'_>,
    eps: f64,
    budget: usize,
    gram: Option<&Matrix>,
) -> Result<(FoState, FoOutcome)> {
    check_eps(eps)?;
    let cols = NormalizedColumns::new(a, metric, gram)?;
    let n = cols.n();
    let mut x = vec![0.0; n];
    x[0] = 1.0;
    let mut s = cols.ghat.column(0);
    let mut iterations = 0;
    let status = loop {
        let ysq = dot(&x, &s).max(0.0);
        if ysq.sqrt() <= eps {
            break FoStatus::SmallNorm;
        }
        if s.iter().all(|v| *v > 0.0) {
            if cols.separates(metric, &x) {
                break FoStatus::Separated;
            }
            s = cols.inner_products(&x);
        }
        if iterations >= budget {
            break FoStatus::BudgetExhausted;
        }
        let k = NormalizedColumns::argmin(&s);
        let sk = s[k];
        let lambda = ((ysq - sk) / (ysq - 2.0 * sk + 1.0)).clamp(0.0, 1.0);
        for (xi, si) in x.iter_mut().zip(s.iter_mut()) {
            *xi *= 1.0 - lambda;
            *si *= 1.0 - lambda;
        }
        x[k] += lambda;
        for (i, si) in s.iter_mut().enumerate() {
            *si += lambda * cols.ghat[(k, i)];
        }
        iterations += 1;
        if iterations % DRIFT_PERIOD == 0 {
            let total: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v /= total);
            s = cols.inner_products(&x);
        }
    };
    let y = cols.aggregate(&x);
    Ok((FoState { x, y }, FoOutcome { status, iterations }))
}

/// Normalised perceptron: `y` is the running average of the chosen normalised
/// columns, which keeps the von Neumann output contract with step `1/(t+1)`.
pub fn averaged_perceptron(
    a: &Matrix,
    metric: Metric<'_>,
    eps: f64,
    budget: usize,
    gram: Option<&Matrix>,
) -> Result<(FoState, FoOutcome)> {
    check_eps(eps)?;
    let cols = NormalizedColumns::new(a, metric, gram)?;
    let n = cols.n();
    let mut x = vec![0.0; n];
    x[0] = 1.0;
    let mut s = cols.ghat.column(0);
    let mut iterations = 0;
    let status = loop {
        let ysq = dot(&x, &s).max(0.0);
        if ysq.sqrt() <= eps {
            break FoStatus::SmallNorm;
        }
        if s.iter().all(|v| *v > 0.0) {
            if cols.separates(metric, &x) {
                break FoStatus::Separated;
            }
            s = cols.inner_products(&x);
        }
        if iterations >= budget {
            break FoStatus::BudgetExhausted;
        }
        let k = NormalizedColumns::argmin(&s);
        let lambda = 1.0 / (iterations as f64 + 2.0);
        for (xi, si) in x.iter_mut().zip(s.iter_mut()) {
            *xi *= 1.0 - lambda;
            *si *= 1.0 - lambda;
        }
        x[k] += lambda;
        for (i, si) in s.iter_mut().enumerate() {
            *si += lambda * cols.ghat[(k, i)];
        }
        iterations += 1;
        if iterations % DRIFT_PERIOD == 0 {
            s = cols.inner_products(&x);
        }
    };
    let y = cols.aggregate(&x);
    Ok((FoState { x, y }, FoOutcome { status, iterations }))
}

/// Dunagan-Vempala coordinate steps on the normalised columns, reported in
/// convex form: `x = c/Σc`, `y = Σ x_i â_i`.
pub fn normalized_dv(
    a: &Matrix,
    metric: Metric<'_>,
    eps: f64,
    budget: usize,
    gram: Option<&Matrix>,
) -> Result<(FoState, FoOutcome)> {
    check_eps(eps)?;
    let cols = NormalizedColumns::new(a, metric, gram)?;
    let n = cols.n();
    let mut c = vec![0.0; n];
    c[0] = 1.0;
    let mut s = cols.ghat.column(0);
    let mut iterations = 0;
    let status = loop {
        let total: f64 = c.iter().sum();
        let ysq = (dot(&c, &s) / (total * total)).max(0.0);
        if ysq.sqrt() <= eps {
            break FoStatus::SmallNorm;
        }
        if s.iter().all(|v| *v > 0.0) {
            let x: Vec<f64> = c.iter().map(|v| v / total).collect();
            if cols.separates(metric, &x) {
                break FoStatus::Separated;
            }
            s = cols.inner_products(&c);
        }
        if iterations >= budget {
            break FoStatus::BudgetExhausted;
        }
        let k = NormalizedColumns::argmin(&s);
        let delta = -s[k];
        if delta <= 0.0 {
            // no coordinate step can make progress
            break FoStatus::BudgetExhausted;
        }
        c[k] += delta;
        for (i, si) in s.iter_mut().enumerate() {
            *si += delta * cols.ghat[(k, i)];
        }
        iterations += 1;
        if iterations % DRIFT_PERIOD == 0 {
            s = cols.inner_products(&c);
        }
    };
    let total: f64 = c.iter().sum();
    let x: Vec<f64> = c.iter().map(|v| v / total).collect();
    let y = cols.aggregate(&x);
    Ok((FoState { x, y }, FoOutcome { status, iterations }))
}

/// A first-order method that returns `x ≥ 0`, `Σx = 1`, `y = Σ x_i a_i/‖a_i‖_Q`
/// with either `AᵀQy > 0` or `‖y‖_Q ≤ ε`.
pub trait FirstOrderMethod: Send + Sync {
    fn name(&self) -> &'static str;

    fn run(
        &self,
        a: &Matrix,
        metric: Metric<'_>,
        eps: f64,
        budget: usize,
        gram: Option<&Matrix>,
    ) -> Result<(FoState, FoOutcome)>;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoKind {
    #[default]
    VonNeumann,
    Perceptron,
    Dv,
}

impl FromStr for FoKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vonneumann" | "von-neumann" | "vn" => Ok(FoKind::VonNeumann),
            "perceptron" => Ok(FoKind::Perceptron),
            "dv" => Ok(FoKind::Dv),
            other => Err(Error::InvalidArgument(format!("unknown first-order method {other:?}"))),
        }
    }
}

impl FirstOrderMethod for FoKind {
    fn name(&self) -> &'static str {
        match self {
            FoKind::VonNeumann => "vonneumann",
            FoKind::Perceptron => "perceptron",
            FoKind::Dv => "dv",
        }
    }

    fn run(
        &self,
        a: &Matrix,
        metric: Metric<'_>,
        eps: f64,
        budget: usize,
        gram: Option<&Matrix>,
    ) -> Result<(FoState, FoOutcome)> {
        match self {
            FoKind::VonNeumann => von_neumann(a, metric, eps, budget, gram),
            FoKind::Perceptron => averaged_perceptron(a, metric, eps, budget, gram),
            FoKind::Dv => normalized_dv(a, metric, eps, budget, gram),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn state(x: &[f64], y: &[f64]) -> FoState {
        FoState { x: x.to_vec(), y: y.to_vec() }
    }

    #[test]
    fn dv_step_examples() {
        let a = mat(&[&[-1.0], &[0.0]]);
        let s = dv_step(&a, &state(&[0.0], &[1.0, 0.0]), 0).unwrap();
        assert_eq!(s.y, vec![0.0, 0.0]);
        assert_eq!(s.x, vec![1.0]);

        let b = mat(&[&[0.0], &[1.0]]);
        let s = dv_step(&b, &state(&[0.0], &[1.0, 0.0]), 0).unwrap();
        assert_eq!(s.y, vec![1.0, 0.0]);

        let c = mat(&[&[0.0], &[-1.0]]);
        let s = dv_step(&c, &state(&[0.0], &[3.0, 4.0]), 0).unwrap();
        assert_eq!(s.y, vec![3.0, 0.0]);
        assert!((norm(&s.y) - 5.0 * (1.0f64 - 0.64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn steps_reject_zero_column() {
        let a = mat(&[&[0.0], &[0.0]]);
        let s = state(&[0.0], &[1.0, 0.0]);
        assert!(matches!(dv_step(&a, &s, 0), Err(Error::DegenerateColumn { index: 0 })));
        assert!(matches!(perceptron_step(&a, &s, 0), Err(Error::DegenerateColumn { index: 0 })));
    }

    #[test]
    fn perceptron_step_examples() {
        let a = mat(&[&[-1.0], &[0.0]]);
        assert_eq!(perceptron_step(&a, &state(&[0.0], &[1.0, 0.0]), 0).unwrap().y, vec![0.0, 0.0]);
        let b = mat(&[&[0.0], &[-1.0]]);
        assert_eq!(perceptron_step(&b, &state(&[0.0], &[1.0, 0.0]), 0).unwrap().y, vec![1.0, -1.0]);
        let c = mat(&[&[0.0], &[2.0]]);
        let s = perceptron_step(&c, &state(&[0.0], &[0.0, 0.0]), 0).unwrap();
        assert_eq!(s.y, vec![0.0, 1.0]);
        assert_eq!(s.x, vec![0.5]);
    }

    #[test]
    fn von_neumann_antipodal() {
        let a = mat(&[&[1.0, -1.0]]);
        let (st, out) = von_neumann(&a, Metric::Euclidean, 0.1, 100, None).unwrap();
        assert_eq!(out, FoOutcome { status: FoStatus::SmallNorm, iterations: 1 });
        assert!(st.y[0].abs() < 1e-15);
        assert_eq!(st.x, vec![0.5, 0.5]);
    }

    #[test]
    fn von_neumann_identity_traces() {
        let a = Matrix::identity(2);
        let (st, out) = von_neumann(&a, Metric::Euclidean, 0.8, 100, None).unwrap();
        assert_eq!(out.status, FoStatus::SmallNorm);
        assert_eq!(st.x, vec![0.5, 0.5]);
        let (st, out) = von_neumann(&a, Metric::Euclidean, 0.1, 100, None).unwrap();
        assert_eq!(out, FoOutcome { status: FoStatus::Separated, iterations: 1 });
        assert_eq!(st.y, vec![0.5, 0.5]);
    }

    #[test]
    fn von_neumann_budget() {
        let a = mat(&[&[1.0, -1.0, -1.0], &[0.0, 2.0, -1.0]]);
        let (_, out) = von_neumann(&a, Metric::Euclidean, 1e-3, 3, None).unwrap();
        assert_eq!(out.status, FoStatus::BudgetExhausted);
        assert_eq!(out.iterations, 3);
    }

    #[test]
    fn methods_parse() {
        assert_eq!("vonneumann".parse::<FoKind>().unwrap(), FoKind::VonNeumann);
        assert_eq!("DV".parse::<FoKind>().unwrap(), FoKind::Dv);
        assert!("simplex".parse::<FoKind>().is_err());
    }
}
