//! Dense linear algebra for small problems: row-major matrices, Cholesky-backed
//! positive definite matrices, orthogonal projectors and Householder bases.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative pivot threshold used for rank decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Tolerance on `‖a‖ = 1` for routines that require unit vectors.
pub const UNIT_TOL: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row vectors. Rejects empty, ragged and non-finite input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Matrix::from_row_major(rows.len(), cols, data)
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        if let Some(p) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: p / cols, col: p % cols });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        if columns.is_empty() || columns[0].is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let rows = columns[0].len();
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: c.len() });
            }
            m.set_column(j, c);
        }
        Matrix::from_row_major(m.rows, m.cols, m.data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[f64]) {
        debug_assert_eq!(v.len(), self.rows);
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = *x;
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let start = i * other.cols;
                for (o, b) in out.data[start..start + other.cols].iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `A v`
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "mul_vec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `Aᵀ v`
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "tr_mul_vec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, vi) in v.iter().enumerate() {
            if *vi != 0.0 {
                axpy(*vi, self.row(i), &mut out);
            }
        }
        out
    }

    /// `AᵀA`
    pub fn gram(&self) -> Matrix {
        self.transpose().matmul(self)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, idx.len());
        for (k, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out[(i, k)] = self[(i, j)];
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(idx.len(), self.cols);
        for (k, &i) in idx.iter().enumerate() {
            out.data[k * self.cols..(k + 1) * self.cols].copy_from_slice(self.row(i));
        }
        out
    }

    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, v) in sq.iter_mut().zip(self.row(i)) {
                *s += v * v;
            }
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// Columns scaled to unit length. Zero columns stay zero.
    pub fn normalized_columns(&self) -> Matrix {
        let norms = self.column_norms();
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if norms[j] > 0.0 {
                    out[(i, j)] /= norms[j];
                }
            }
        }
        out
    }

    pub fn zero_columns(&self) -> Vec<usize> {
        self.column_norms()
            .iter()
            .enumerate()
            .filter(|(_, n)| **n == 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        norm_inf(&self.data)
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Position of the first entry that is not an integer, if any.
    pub fn first_non_integer(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| v.fract() != 0.0)
            .map(|p| (p / self.cols, p % self.cols))
    }

    pub fn is_integral(&self) -> bool {
        self.first_non_integer().is_none()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, alpha: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: scaled(alpha, &self.data) }
    }

    /// `self += alpha * u vᵀ`
    pub fn rank_one_update(&mut self, alpha: f64, u: &[f64], v: &[f64]) {
        assert_eq!(u.len(), self.rows);
        assert_eq!(v.len(), self.cols);
        for (i, ui) in u.iter().enumerate() {
            let c = alpha * ui;
            if c == 0.0 {
                continue;
            }
            let start = i * self.cols;
            axpy(c, v, &mut self.data[start..start + self.cols]);
        }
    }

    pub fn symmetrize(&mut self) {
        assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..i {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower Cholesky factor, or `None` when a pivot is not positive.
pub fn cholesky(a: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Solves `L x = b` for lower triangular `L`.
pub fn forward_substitute(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[(i, k)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves `Lᵀ x = b` for lower triangular `L`.
pub fn back_substitute_transposed(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Symmetric positive definite matrix with its Cholesky factor.
#[derive(Clone, Debug)]
pub struct SymPosDef {
    matrix: Matrix,
    chol: Matrix,
}

impl SymPosDef {
    /// Validates symmetry (relative tolerance 1e-12) and positive definiteness.
    pub fn new(mut matrix: Matrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        let scale = matrix.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..matrix.rows() {
            for j in 0..i {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::NotPositiveDefinite);
                }
            }
        }
        matrix.symmetrize();
        let chol = cholesky(&matrix).ok_or(Error::NotPositiveDefinite)?;
        Ok(SymPosDef { matrix, chol })
    }

    pub fn identity(n: usize) -> Self {
        SymPosDef { matrix: Matrix::identity(n), chol: Matrix::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn cholesky_factor(&self) -> &Matrix {
        &self.chol
    }

    pub fn log_det(&self) -> f64 {
        (0..self.dim()).map(|i| 2.0 * self.chol[(i, i)].ln()).sum()
    }

    pub fn det(&self) -> f64 {
        self.log_det().exp()
    }

    /// `M v`
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(v)
    }

    /// `M⁻¹ v`
    pub fn solve(&self, v: &[f64]) -> Vec<f64> {
        back_substitute_transposed(&self.chol, &forward_substitute(&self.chol, v))
    }

    /// `L⁻¹ v`, so that `‖L⁻¹ v‖² = vᵀ M⁻¹ v`.
    pub fn whiten(&self, v: &[f64]) -> Vec<f64> {
        forward_substitute(&self.chol, v)
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.dim();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            inv.set_column(j, &self.solve(&e));
        }
        inv.symmetrize();
        inv
    }

    /// `sqrt(vᵀ M v)`
    pub fn norm(&self, v: &[f64]) -> f64 {
        dot(v, &self.apply(v)).max(0.0).sqrt()
    }

    /// `sqrt(vᵀ M⁻¹ v)`
    pub fn inverse_norm(&self, v: &[f64]) -> f64 {
        norm(&self.whiten(v))
    }

    /// `Aᵀ M⁻¹ A`, formed as `(L⁻¹A)ᵀ(L⁻¹A)`.
    pub fn inverse_gram(&self, a: &Matrix) -> Matrix {
        self.whiten_columns(a).gram()
    }

    /// `L⁻¹ A` column by column.
    pub fn whiten_columns(&self, a: &Matrix) -> Matrix {
        assert_eq!(a.rows(), self.dim());
        let mut b = Matrix::zeros(a.rows(), a.cols());
        for j in 0..a.cols() {
            b.set_column(j, &self.whiten(&a.column(j)));
        }
        b
    }

    /// `Wᵀ M W`, factored from `WᵀL` without forming `M`.
    pub fn congruence(&self, w: &Matrix) -> Result<SymPosDef> {
        SymPosDef::from_factor(&w.transpose().matmul(&self.chol))
    }

    /// `scale · (M + Σ w v vᵀ)` for weights `w ≥ 0`, through the factor `[L | √w v]`.
    pub fn add_rank_ones<'a>(&self, terms: impl IntoIterator<Item = (f64, &'a [f64])>, scale: f64) -> Result<SymPosDef> {
        let d = self.dim();
        let s = scale.sqrt();
        let mut cols: Vec<Vec<f64>> = (0..d).map(|j| (0..d).map(|i| self.chol[(i, j)] * s).collect()).collect();
        for (w, v) in terms {
            if w < 0.0 {
                return Err(Error::ContractViolation(format!("negative rank-one weight {w}")));
            }
            if w > 0.0 {
                cols.push(scaled((w * scale).sqrt(), v));
            }
        }
        SymPosDef::from_factor(&Matrix::from_columns(&cols)?)
    }

    /// `F Fᵀ` for an `m × k` factor with `k ≥ m`. The Cholesky factor comes
    /// from a Householder QR of `Fᵀ`, which keeps the small eigenvalues that
    /// forming `FFᵀ` first would round away.
    pub fn from_factor(f: &Matrix) -> Result<SymPosDef> {
        let (m, k) = (f.rows(), f.cols());
        if k < m {
            return Err(Error::NotPositiveDefinite);
        }
        let mut t = f.transpose();
        for j in 0..m {
            let alpha = (j..k).map(|i| t[(i, j)] * t[(i, j)]).sum::<f64>().sqrt();
            if alpha == 0.0 {
                return Err(Error::NotPositiveDefinite);
            }
            let mut v: Vec<f64> = (j..k).map(|i| t[(i, j)]).collect();
            v[0] += alpha.copysign(v[0]);
            let vv = dot(&v, &v);
            for c in j..m {
                let s = (j..k).map(|i| v[i - j] * t[(i, c)]).sum::<f64>() * 2.0 / vv;
                for i in j..k {
                    t[(i, c)] -= s * v[i - j];
                }
            }
        }
        let mut chol = Matrix::zeros(m, m);
        for j in 0..m {
            let sign = t[(j, j)].signum();
            for i in j..m {
                chol[(i, j)] = t[(j, i)] * sign;
            }
            if !(chol[(j, j)] > 0.0) || !chol[(j, j)].is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
        }
        let mut matrix = chol.matmul(&chol.transpose());
        matrix.symmetrize();
        Ok(SymPosDef { matrix, chol })
    }
}

/// Whether a projector maps onto `ker(A)` or onto `im(Aᵀ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProjectorKind {
    Kernel,
    RowSpace,
}

/// Orthogonal projector in ℝⁿ.
#[derive(Clone, Debug)]
pub struct Projector {
    pub matrix: Matrix,
    pub kind: ProjectorKind,
    pub rank: usize,
}

impl Projector {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(x)
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.matrix.column(k)
    }
}

/// Indices of a maximal set of linearly independent rows, found by Gaussian
/// elimination with complete pivoting. Pivots below `RANK_TOL` times the
/// first pivot count as zero.
pub fn independent_rows(a: &Matrix) -> Vec<usize> {
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..m).collect();
    let mut col_used = vec![false; n];
    let mut first_pivot = 0.0;
    let mut rank = 0;
    while rank < m {
        let mut best = (0.0, 0, 0);
        for i in rank..m {
            for j in 0..n {
                if !col_used[j] && w[(i, j)].abs() > best.0 {
                    best = (w[(i, j)].abs(), i, j);
                }
            }
        }
        let (piv, pi, pj) = best;
        if rank == 0 {
            first_pivot = piv;
        }
        if piv == 0.0 || piv <= RANK_TOL * first_pivot {
            break;
        }
        if pi != rank {
            for j in 0..n {
                let t = w[(rank, j)];
                w[(rank, j)] = w[(pi, j)];
                w[(pi, j)] = t;
            }
            perm.swap(rank, pi);
        }
        col_used[pj] = true;
        for i in rank + 1..m {
            let f = w[(i, pj)] / w[(rank, pj)];
            if f != 0.0 {
                for j in 0..n {
                    w[(i, j)] -= f * w[(rank, j)];
                }
            }
        }
        rank += 1;
    }
    let mut rows = perm[..rank].to_vec();
    rows.sort_unstable();
    rows
}

pub fn rank(a: &Matrix) -> usize {
    if a.rows() == 0 || a.cols() == 0 {
        return 0;
    }
    independent_rows(a).len()
}

/// Orthogonal projector onto `ker(A)`, or onto `im(Aᵀ)` when `kind` is `RowSpace`.
/// Dependent rows are discarded before forming `Bᵀ(BBᵀ)⁻¹B`.
pub fn projector(a: &Matrix, kind: ProjectorKind) -> Projector {
    let n = a.cols();
    let rows = if a.rows() == 0 { Vec::new() } else { independent_rows(a) };
    let mut row_space = Matrix::zeros(n, n);
    if !rows.is_empty() {
        let b = a.select_rows(&rows);
        let bbt = b.matmul(&b.transpose());
        let spd = SymPosDef::new(bbt).expect("independent rows give a positive definite Gram matrix");
        let c = spd.whiten_columns(&b);
        row_space = c.gram();
        row_space.symmetrize();
    }
    let matrix = match kind {
        ProjectorKind::RowSpace => row_space,
        ProjectorKind::Kernel => Matrix::identity(n).add(&row_space.scale(-1.0)),
    };
    Projector { matrix, kind, rank: rows.len() }
}

pub fn kernel_projector(a: &Matrix) -> Projector {
    projector(a, ProjectorKind::Kernel)
}

/// Support function of `E(R) = {z : zᵀ R z ≤ 1}` at `a`: `max aᵀz = sqrt(aᵀ R⁻¹ a)`.
pub fn ellipsoid_width(r: &SymPosDef, a: &[f64]) -> Result<f64> {
    if a.len() != r.dim() {
        return Err(Error::DimensionMismatch { expected: r.dim(), found: a.len() });
    }
    Ok(r.inverse_norm(a))
}

/// `det(R) · aᵀ R⁻¹ a` for a unit vector `a`, which equals `det(WᵀRW)` for any
/// orthonormal basis `W` of `a^⊥`.
pub fn projected_determinant(r: &SymPosDef, a: &[f64]) -> Result<f64> {
    if a.len() != r.dim() {
        return Err(Error::DimensionMismatch { expected: r.dim(), found: a.len() });
    }
    let n = norm(a);
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitVector { norm: n });
    }
    let w = r.inverse_norm(a);
    Ok(r.det() * w * w)
}

/// Orthonormal basis of `a^⊥` in ℝʳ as the columns of an `r × (r-1)` matrix,
/// taken from the Householder reflector that maps `e₁` to `∓a`.
pub fn orthocomplement_basis(a: &[f64]) -> Result<Matrix> {
    let r = a.len();
    if r == 0 {
        return Err(Error::EmptyMatrix);
    }
    let n = norm(a);
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitVector { norm: n });
    }
    let sign = if a[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = a.to_vec();
    v[0] += sign;
    let vv = dot(&v, &v);
    let mut w = Matrix::zeros(r, r - 1);
    for j in 1..r {
        let f = 2.0 * v[j] / vv;
        for i in 0..r {
            let e = if i == j { 1.0 } else { 0.0 };
            w[(i, j - 1)] = e - f * v[i];
        }
    }
    Ok(w)
}

/// Orthonormal basis of the column space of `a` (modified Gram-Schmidt with
/// reorthogonalisation, columns visited by decreasing norm).
pub fn column_space_basis(a: &Matrix) -> Matrix {
    let norms = a.column_norms();
    let mut order: Vec<usize> = (0..a.cols()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let scale = norms.iter().cloned().fold(0.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for j in order {
        if basis.len() == a.rows() || norms[j] == 0.0 {
            break;
        }
        let mut v = a.column(j);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &v);
                axpy(-c, q, &mut v);
            }
        }
        let nv = norm(&v);
        if nv > RANK_TOL * scale.max(norms[j]) {
            basis.push(scaled(1.0 / nv, &v));
        }
    }
    let mut out = Matrix::zeros(a.rows(), basis.len());
    for (j, q) in basis.iter().enumerate() {
        out.set_column(j, q);
    }
    out
}

/// Determinant by LU with partial pivoting.
pub fn determinant(a: &Matrix) -> f64 {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut w = a.clone();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| w[(i, k)].abs().total_cmp(&w[(j, k)].abs())).unwrap();
        if w[(p, k)] == 0.0 {
            return 0.0;
        }
        if p != k {
            for j in 0..n {
                let t = w[(k, j)];
                w[(k, j)] = w[(p, j)];
                w[(p, j)] = t;
            }
            det = -det;
        }
        det *= w[(k, k)];
        for i in k + 1..n {
            let f = w[(i, k)] / w[(k, k)];
            for j in k..n {
                w[(i, j)] -= f * w[(k, j)];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kernel_projector_of_single_row() {
        let a = Matrix::from_rows(&[vec![1.0, -1.0]]).unwrap();
        let p = kernel_projector(&a);
        let expect = [[0.5, 0.5], [0.5, 0.5]];
        for (i, row) in expect.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert!(approx(p.matrix[(i, j)], *e, 1e-14));
            }
        }
        assert_eq!(p.rank, 1);
    }

    #[test]
    fn kernel_projector_trivial_kernel() {
        let p = kernel_projector(&Matrix::identity(2));
        assert!(p.matrix.max_abs() < 1e-15);
    }

    #[test]
    fn projector_drops_dependent_rows() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]).unwrap();
        let p = kernel_projector(&a);
        assert_eq!(p.rank, 1);
        let x = p.apply(&[1.0, 2.0, 3.0]);
        assert!(norm(&x) < 1e-14);
    }

    #[test]
    fn width_and_projected_determinant() {
        let r = SymPosDef::new(Matrix::from_rows(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap()).unwrap();
        assert!(approx(ellipsoid_width(&r, &[1.0, 0.0]).unwrap(), 0.5, 1e-15));
        assert!(approx(projected_determinant(&r, &[1.0, 0.0]).unwrap(), 1.0, 1e-14));
        assert!(matches!(projected_determinant(&r, &[1.0, 1.0]), Err(Error::NotUnitVector { .. })));
    }

    #[test]
    fn householder_complement() {
        let w = orthocomplement_basis(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!((w.rows(), w.cols()), (3, 2));
        let g = w.gram();
        assert!(g.max_abs_diff(&Matrix::identity(2)) < 1e-15);
        assert!(norm(&w.tr_mul_vec(&[0.0, 0.0, 1.0])) < 1e-15);
        let w1 = orthocomplement_basis(&[-1.0]).unwrap();
        assert_eq!(w1.cols(), 0);
    }

    #[test]
    fn spd_rejects_indefinite() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(SymPosDef::new(m), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn spd_inverse_and_logdet() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let s = SymPosDef::new(m.clone()).unwrap();
        assert!(approx(s.det(), 5.0, 1e-13));
        assert!(m.matmul(&s.inverse()).max_abs_diff(&Matrix::identity(2)) < 1e-14);
        assert!(approx(determinant(&m), 5.0, 1e-13));
    }

    #[test]
    fn factor_matches_explicit_cholesky() {
        let f = Matrix::from_rows(&[vec![1.0, 2.0, -1.0], vec![0.5, -1.0, 3.0]]).unwrap();
        let s = SymPosDef::from_factor(&f).unwrap();
        let direct = SymPosDef::new(f.matmul(&f.transpose())).unwrap();
        assert!(s.cholesky_factor().max_abs_diff(direct.cholesky_factor()) < 1e-14);
        assert!(s.matrix().max_abs_diff(direct.matrix()) < 1e-14);
    }

    #[test]
    fn factor_keeps_small_eigenvalues() {
        // eigenvalues 1e16 and 1e-2 along (1,1)/√2 and (1,-1)/√2
        let c = 1e8 / 2f64.sqrt();
        let d = 0.1 / 2f64.sqrt();
        let f = Matrix::from_rows(&[vec![c, d], vec![c, -d]]).unwrap();
        assert!(SymPosDef::new(f.matmul(&f.transpose())).is_err());
        let s = SymPosDef::from_factor(&f).unwrap();
        assert!(approx(s.log_det(), (1e16f64 * 1e-2).ln(), 1e-8));
        assert!(approx(s.inverse_norm(&[1.0, -1.0]), 2f64.sqrt() / 0.1, 1e-8));
        assert!(matches!(SymPosDef::from_factor(&Matrix::zeros(2, 1)), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn rank_and_column_basis() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 1.0]]).unwrap();
        assert_eq!(rank(&a), 2);
        let q = column_space_basis(&a);
        assert_eq!(q.cols(), 2);
        assert!(q.gram().max_abs_diff(&Matrix::identity(2)) < 1e-14);
    }

    #[test]
    fn constructors_validate() {
        assert!(matches!(Matrix::from_rows(&[]), Err(Error::EmptyMatrix)));
        assert!(matches!(
            Matrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(Matrix::from_rows(&[vec![f64::NAN]]), Err(Error::NonFinite { .. })));
    }
}
