//! Condition measures: the Goffin measure ρ_A, the Hadamard-type bound Δ_A,
//! the threshold θ_A, the encoding length L and the width measure ω_A.
//!
//! `goffin_oracle` and `omega_oracle` enumerate the finitely many candidate
//! optimisers and are meant for small instances only.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, column_space_basis, dot, norm, Matrix, SymPosDef, RANK_TOL};

/// Default additive accuracy for `goffin_oracle` and `omega_oracle`.
pub const RHO_TOL: f64 = 1e-6;

/// Upper bound on the number of column subsets the enumeration oracles visit.
pub const ORACLE_SUBSET_CAP: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub rho: f64,
    pub delta: f64,
    pub theta: f64,
    pub encoding_length: Option<u64>,
    pub rho_accuracy: f64,
}

/// Largest product of column norms over linearly independent column sets,
/// found greedily since independent sets form a matroid.
pub fn hadamard_delta(a: &Matrix) -> f64 {
    let norms = a.column_norms();
    let mut order: Vec<usize> = (0..a.cols()).filter(|&j| norms[j] > 0.0).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut delta = 1.0;
    for j in order {
        if basis.len() == a.rows() {
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
        if nv > RANK_TOL * norms[j] {
            basis.push(v.iter().map(|x| x / nv).collect());
            delta *= norms[j];
        }
    }
    delta
}

pub fn theta(a: &Matrix) -> f64 {
    let m = a.rows() as f64;
    let d = hadamard_delta(a);
    1.0 / (m * m * d * d)
}

/// `Σ (1 + ⌈log₂(|a_ij| + 1)⌉)` over all entries.
pub fn encoding_length(a: &Matrix) -> Result<u64> {
    if let Some((row, col)) = a.first_non_integer() {
        return Err(Error::NonInteger { row, col });
    }
    Ok(a.data().iter().map(|v| 1 + bit_length(v.abs())).sum())
}

fn bit_length(v: f64) -> u64 {
    // ⌈log₂(k+1)⌉ is the bit length of the non-negative integer k
    if v < 9.0e15 {
        64 - (v as u64).leading_zeros() as u64
    } else {
        v.log2().floor() as u64 + 1
    }
}

/// Unit vectors `Uᵀâ_j` expressed in an orthonormal basis `U` of `im(A)`.
fn image_coordinates(a: &Matrix) -> Vec<Vec<f64>> {
    let u = column_space_basis(a);
    let ahat = a.normalized_columns();
    (0..a.cols()).map(|j| u.tr_mul_vec(&ahat.column(j))).collect()
}

fn subset_count(n: usize, kmax: usize) -> u64 {
    let mut total: u64 = 0;
    let mut c: u64 = 1;
    for k in 1..=kmax.min(n) {
        c = c.saturating_mul((n - k + 1) as u64) / k as u64;
        total = total.saturating_add(c);
    }
    total
}

fn min_inner(points: &[Vec<f64>], u: &[f64]) -> f64 {
    points.iter().map(|b| dot(b, u)).fold(f64::INFINITY, f64::min)
}

/// Point of smallest norm on the affine hull of `pts`, or `None` when the
/// points are affinely dependent. Also returns an orthonormal basis of the
/// difference directions.
fn min_norm_affine(pts: &[&Vec<f64>]) -> Option<(Vec<f64>, Matrix)> {
    let r = pts[0].len();
    let k = pts.len();
    let p0 = pts[0];
    let mut d = Matrix::zeros(r, k - 1);
    for (c, p) in pts[1..].iter().enumerate() {
        for i in 0..r {
            d[(i, c)] = p[i] - p0[i];
        }
    }
    if k == 1 {
        return Some((p0.clone(), d));
    }
    let q = column_space_basis(&d);
    if q.cols() < k - 1 {
        return None;
    }
    // p0 minus its projection on span(D)
    let mut p = p0.clone();
    let coeffs = q.tr_mul_vec(p0);
    for (c, w) in coeffs.iter().enumerate() {
        axpy(-w, &q.column(c), &mut p);
    }
    Some((p, q))
}

/// Unit vector orthogonal to the orthonormal columns of `q` (which has `r-1` columns).
fn normal_to(q: &Matrix) -> Vec<f64> {
    let r = q.rows();
    let mut best = vec![0.0; r];
    let mut best_norm = -1.0;
    for i in 0..r {
        let mut v = vec![0.0; r];
        v[i] = 1.0;
        for _ in 0..2 {
            for c in 0..q.cols() {
                let col = q.column(c);
                let w = dot(&col, &v);
                axpy(-w, &col, &mut v);
            }
        }
        let nv = norm(&v);
        if nv > best_norm {
            best_norm = nv;
            best = v;
        }
    }
    best.iter().map(|x| x / best_norm).collect()
}

/// Signed Goffin measure `max_{y ∈ im(A), ‖y‖=1} min_j â_jᵀy`.
///
/// The maximiser is either the normalised minimum-norm point of a face of
/// `conv(Â)` (positive case) or a facet normal (non-positive case), so every
/// affinely independent subset of at most `rk(A)` columns is tried. Values
/// within `tol` of zero are reported as zero.
pub fn goffin_oracle(a: &Matrix, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let pts = image_coordinates(a);
    let r = pts.first().map_or(0, |p| p.len());
    if r == 0 {
        return Ok(0.0);
    }
    let count = subset_count(pts.len(), r);
    if count > ORACLE_SUBSET_CAP {
        return Err(Error::Unsupported(format!(
            "goffin oracle would visit {count} column subsets (m={}, n={})",
            a.rows(),
            a.cols()
        )));
    }
    let mut best = f64::NEG_INFINITY;
    let mut consider = |u: &[f64]| {
        let nu = norm(u);
        if nu > 1e-12 {
            let u: Vec<f64> = u.iter().map(|x| x / nu).collect();
            let neg: Vec<f64> = u.iter().map(|x| -x).collect();
            best = best.max(min_inner(&pts, &u)).max(min_inner(&pts, &neg));
        }
    };
    for k in 1..=r.min(pts.len()) {
        for subset in pts.iter().combinations(k) {
            let Some((p, q)) = min_norm_affine(&subset) else { continue };
            if k == r {
                consider(&normal_to(&q));
            } else {
                consider(&p);
            }
        }
    }
    if best.abs() <= tol {
        best = 0.0;
    }
    Ok(best)
}

/// Euclidean projection of `v` onto `cone(columns)`, by enumerating linearly
/// independent column subsets and keeping the closest feasible least-squares point.
pub fn project_onto_cone(columns: &[Vec<f64>], v: &[f64]) -> Result<Vec<f64>> {
    let m = v.len();
    let nonzero: Vec<&Vec<f64>> = columns.iter().filter(|c| norm(c) > 0.0).collect();
    let count = subset_count(nonzero.len(), m);
    if count > ORACLE_SUBSET_CAP {
        return Err(Error::Unsupported(format!("cone projection would visit {count} subsets")));
    }
    let mut best = vec![0.0; m];
    let mut best_dist = norm(v);
    for k in 1..=m.min(nonzero.len()) {
        for subset in nonzero.iter().combinations(k) {
            let cols: Vec<Vec<f64>> = subset.iter().map(|c| (**c).clone()).collect();
            let b = Matrix::from_columns(&cols)?;
            let Ok(g) = SymPosDef::new(b.gram()) else { continue };
            if column_space_basis(&b).cols() < k {
                continue;
            }
            let w = g.solve(&b.tr_mul_vec(v));
            if w.iter().any(|x| *x < -1e-12) {
                continue;
            }
            let p = b.mul_vec(&w);
            let dist = norm(&v.iter().zip(&p).map(|(x, y)| x - y).collect::<Vec<_>>());
            if dist < best_dist {
                best_dist = dist;
                best = p;
            }
        }
    }
    Ok(best)
}

/// `min_{i ∈ T} max{â_iᵀz : z ∈ Σ_A ∩ 𝔹}` with `Σ_A = {y : Aᵀy ≥ 0}`.
///
/// For a closed convex cone `K` the inner maximum is `‖Π_K(c)‖`, and by the
/// Moreau decomposition `Π_{Σ_A}(c) = c + Π_{cone(A)}(−c)`. Indices are 0-based.
pub fn omega_oracle(a: &Matrix, t_star: &[usize], tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    if t_star.is_empty() {
        return Err(Error::InvalidArgument("T* must be nonempty".into()));
    }
    let ahat = a.normalized_columns();
    let cols: Vec<Vec<f64>> = (0..a.cols()).map(|j| ahat.column(j)).collect();
    let mut omega = f64::INFINITY;
    for &i in t_star {
        if i >= a.cols() {
            return Err(Error::InvalidArgument(format!("column index {i} out of range")));
        }
        let c = &cols[i];
        let neg: Vec<f64> = c.iter().map(|x| -x).collect();
        let p = project_onto_cone(&cols, &neg)?;
        let w: Vec<f64> = c.iter().zip(&p).map(|(x, y)| x + y).collect();
        omega = omega.min(norm(&w));
    }
    Ok(omega)
}

pub fn condition_report(a: &Matrix, tol: f64) -> Result<ConditionReport> {
    let rho = goffin_oracle(a, tol)?;
    let delta = hadamard_delta(a);
    let m = a.rows() as f64;
    Ok(ConditionReport {
        rho,
        delta,
        theta: 1.0 / (m * m * delta * delta),
        encoding_length: encoding_length(a).ok(),
        rho_accuracy: tol,
    })
}
