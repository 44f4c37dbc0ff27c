//! Exact rational oracles for small integer instances: maximum supports of
//! `ker(A) ∩ ℝⁿ₊` and `{Aᵀy : y} ∩ ℝⁿ₊`, and Fourier-Motzkin feasibility.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub type Rational = BigRational;

/// Desk-scale limits of `exact_support_oracle`.
pub const MAX_EXACT_ROWS: usize = 6;
pub const MAX_EXACT_COLS: usize = 12;

/// Cap on the number of inequalities Fourier-Motzkin may hold at once.
pub const FM_CAP: usize = 200_000;

pub fn rational(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Rows of an integral matrix as exact rationals.
pub fn to_rational(a: &Matrix) -> Result<Vec<Vec<Rational>>> {
    if let Some((row, col)) = a.first_non_integer() {
        return Err(Error::NonInteger { row, col });
    }
    Ok((0..a.rows())
        .map(|i| {
            a.row(i)
                .iter()
                .map(|v| Rational::from_integer(BigInt::from(*v as i64)))
                .collect()
        })
        .collect())
}

pub fn to_f64(q: &Rational) -> f64 {
    let n: f64 = q.numer().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = q.denom().to_string().parse().unwrap_or(f64::NAN);
    n / d
}

/// Basis of `{x : Mx = 0}` for an `r × c` rational matrix.
pub fn nullspace(mat: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut w: Vec<Vec<Rational>> = mat.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..w.len()).find(|&i| !w[i][c].is_zero()) else { continue };
        w.swap(row, p);
        let inv = w[row][c].recip();
        for v in w[row].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..w.len() {
            if i != row && !w[i][c].is_zero() {
                let f = w[i][c].clone();
                let pivot = w[row].clone();
                for (v, p) in w[i].iter_mut().zip(&pivot) {
                    *v = &*v - &f * p;
                }
            }
        }
        pivots.push(c);
        row += 1;
        if row == w.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -w[r][f].clone();
            }
            v
        })
        .collect()
}

fn select_columns(rows: &[Vec<Rational>], idx: &[usize]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| idx.iter().map(|&j| r[j].clone()).collect()).collect()
}

fn transpose(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    (0..cols).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect()
}

fn mat_vec(rows: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    rows.iter()
        .map(|r| r.iter().zip(x).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

/// Inequality `coeffs · w ≥ rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl Inequality {
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in self.coeffs.iter_mut() {
                *c = &*c / &lead;
            }
            self.rhs = &self.rhs / &lead;
        }
        self
    }
}

fn dedupe(ineqs: Vec<Inequality>) -> Result<Option<Vec<Inequality>>> {
    let mut best: HashMap<Vec<Rational>, Rational> = HashMap::new();
    for q in ineqs {
        let q = q.normalized();
        if q.coeffs.iter().all(|c| c.is_zero()) {
            if q.rhs.is_positive() {
                return Ok(None);
            }
            continue;
        }
        match best.get_mut(&q.coeffs) {
            Some(r) => {
                if q.rhs > *r {
                    *r = q.rhs;
                }
            }
            None => {
                best.insert(q.coeffs, q.rhs);
            }
        }
    }
    if best.len() > FM_CAP {
        return Err(Error::Unsupported(format!("Fourier-Motzkin system grew to {} rows", best.len())));
    }
    let mut out: Vec<Inequality> = best.into_iter().map(|(coeffs, rhs)| Inequality { coeffs, rhs }).collect();
    out.sort_by(|a, b| a.coeffs.cmp(&b.coeffs).then(a.rhs.cmp(&b.rhs)));
    Ok(Some(out))
}

/// Finds a rational point of `{w : coeffs·w ≥ rhs}` by Fourier-Motzkin
/// elimination and back substitution, or `None` when the system is empty.
pub fn fourier_motzkin(ineqs: Vec<Inequality>, vars: usize) -> Result<Option<Vec<Rational>>> {
    let mut systems: Vec<Vec<Inequality>> = vec![Vec::new(); vars + 1];
    let Some(top) = dedupe(ineqs)? else { return Ok(None) };
    systems[vars] = top;
    for v in (0..vars).rev() {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for q in &systems[v + 1] {
            if q.coeffs[v].is_positive() {
                pos.push(q);
            } else if q.coeffs[v].is_negative() {
                neg.push(q);
            } else {
                rest.push(q.clone());
            }
        }
        if pos.len().saturating_mul(neg.len()) > FM_CAP {
            return Err(Error::Unsupported("Fourier-Motzkin elimination too large".into()));
        }
        for p in &pos {
            for q in &neg {
                let sp = p.coeffs[v].recip();
                let sq = (-q.coeffs[v].clone()).recip();
                let coeffs: Vec<Rational> = p
                    .coeffs
                    .iter()
                    .zip(&q.coeffs)
                    .map(|(a, b)| a * &sp + b * &sq)
                    .collect();
                rest.push(Inequality { coeffs, rhs: &p.rhs * &sp + &q.rhs * &sq });
            }
        }
        let Some(next) = dedupe(rest)? else { return Ok(None) };
        systems[v] = next;
    }
    let mut w = vec![Rational::zero(); vars];
    for v in 0..vars {
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for q in &systems[v + 1] {
            let c = &q.coeffs[v];
            if c.is_zero() {
                continue;
            }
            let rest = (0..v).fold(Rational::zero(), |acc, j| acc + &q.coeffs[j] * &w[j]);
            let bound = (&q.rhs - rest) / c;
            if c.is_positive() {
                if lo.as_ref().is_none_or(|l| bound > *l) {
                    lo = Some(bound);
                }
            } else if hi.as_ref().is_none_or(|h| bound < *h) {
                hi = Some(bound);
            }
        }
        w[v] = match (lo, hi) {
            (Some(l), Some(h)) => {
                if l > h {
                    return Err(Error::ContractViolation("Fourier-Motzkin back substitution failed".into()));
                }
                if !l.is_positive() && !h.is_negative() {
                    Rational::zero()
                } else if l.is_positive() {
                    l
                } else {
                    h
                }
            }
            (Some(l), None) => {
                if l.is_positive() {
                    l
                } else {
                    Rational::zero()
                }
            }
            (None, Some(h)) => {
                if h.is_negative() {
                    h
                } else {
                    Rational::zero()
                }
            }
            (None, None) => Rational::zero(),
        };
    }
    Ok(Some(w))
}

/// Exact maximum supports with rational witnesses.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportSplit {
    /// `S*`, 0-based.
    pub kernel: Vec<usize>,
    /// `T* = [n] ∖ S*`, 0-based.
    pub image: Vec<usize>,
    /// `x ≥ 0`, `Ax = 0`, `supp(x) = S*`.
    pub kernel_witness: Vec<Rational>,
    /// `Aᵀy ≥ 0`, `supp(Aᵀy) = T*`.
    pub image_witness: Vec<Rational>,
}

/// `S*` as the union of supports of sign-consistent circuits, `T*` as its
/// complement, both verified by exact witnesses.
pub fn exact_support_oracle(a: &Matrix) -> Result<SupportSplit> {
    let (m, n) = (a.rows(), a.cols());
    if m > MAX_EXACT_ROWS || n > MAX_EXACT_COLS {
        return Err(Error::Unsupported(format!(
            "exact oracle supports m ≤ {MAX_EXACT_ROWS}, n ≤ {MAX_EXACT_COLS}; got {m}×{n}"
        )));
    }
    let rows = to_rational(a)?;
    let rk = crate::linalg::rank(a);
    let mut in_s = vec![false; n];
    let mut x = vec![Rational::zero(); n];
    for k in 1..=(rk + 1).min(n) {
        for subset in (0..n).combinations(k) {
            let sub = select_columns(&rows, &subset);
            let ns = nullspace(&sub, k);
            if ns.len() != 1 {
                continue;
            }
            let v = &ns[0];
            let all_pos = v.iter().all(|c| c.is_positive());
            let all_neg = v.iter().all(|c| c.is_negative());
            if !(all_pos || all_neg) {
                continue;
            }
            for (c, &j) in v.iter().zip(&subset) {
                in_s[j] = true;
                x[j] = &x[j] + c.abs();
            }
        }
    }
    let kernel: Vec<usize> = (0..n).filter(|&j| in_s[j]).collect();
    let image: Vec<usize> = (0..n).filter(|&j| !in_s[j]).collect();

    if mat_vec(&rows, &x).iter().any(|v| !v.is_zero()) {
        return Err(Error::ContractViolation("kernel witness is not in the kernel".into()));
    }

    let y = if image.is_empty() {
        vec![Rational::zero(); m]
    } else {
        // y = N w with N a basis of {y : a_iᵀy = 0, i ∈ S*}, and a_tᵀy ≥ 1 on T*
        let s_rows = transpose(&select_columns(&rows, &kernel), kernel.len());
        let basis = if kernel.is_empty() {
            (0..m)
                .map(|i| (0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
                .collect()
        } else {
            nullspace(&s_rows, m)
        };
        let h = basis.len();
        let ineqs: Vec<Inequality> = image
            .iter()
            .map(|&t| {
                let col: Vec<Rational> = rows.iter().map(|r| r[t].clone()).collect();
                let coeffs = basis
                    .iter()
                    .map(|b| b.iter().zip(&col).fold(Rational::zero(), |acc, (p, q)| acc + p * q))
                    .collect();
                Inequality { coeffs, rhs: Rational::one() }
            })
            .collect();
        let Some(w) = fourier_motzkin(ineqs, h)? else {
            return Err(Error::ContractViolation("no image witness for the complement of S*".into()));
        };
        (0..m)
            .map(|i| basis.iter().zip(&w).fold(Rational::zero(), |acc, (b, wk)| acc + &b[i] * wk))
            .collect()
    };
    let aty = mat_vec(&transpose(&rows, n), &y);
    for j in 0..n {
        let ok = if in_s[j] { aty[j].is_zero() } else { aty[j].is_positive() };
        if !ok {
            return Err(Error::ContractViolation(format!("image witness fails on column {j}")));
        }
    }
    Ok(SupportSplit { kernel, image, kernel_witness: x, image_witness: y })
}

/// Exact feasibility of `Ax ≤ b` for integral data, with a rational solution.
pub fn lp_feasible_exact(a: &Matrix, b: &[f64]) -> Result<Option<Vec<Rational>>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    let rows = to_rational(a)?;
    let bm = Matrix::from_row_major(b.len(), 1, b.to_vec())?;
    let bq = to_rational(&bm)?;
    let ineqs = rows
        .iter()
        .zip(&bq)
        .map(|(r, bi)| Inequality { coeffs: r.iter().map(|c| -c.clone()).collect(), rhs: -bi[0].clone() })
        .collect();
    fourier_motzkin(ineqs, a.cols())
}
