//! Solver-independent checks of kernel and image certificates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm_inf, Matrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub valid: bool,
    pub residual: f64,
    pub margin: f64,
    pub message: String,
}

impl CertReport {
    fn new(problems: Vec<String>, residual: f64, margin: f64) -> Self {
        let valid = problems.is_empty();
        let message = if valid { "ok".to_string() } else { problems.join("; ") };
        CertReport { valid, residual, margin, message }
    }
}

fn check_support(support: &[usize], n: usize) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &j in support {
        if j >= n {
            return Err(Error::DimensionMismatch { expected: n, found: j + 1 });
        }
        mask[j] = true;
    }
    Ok(mask)
}

pub fn default_kernel_tol(n: usize) -> f64 {
    1e-8 * n as f64
}

/// `1e-8 · max|a_ij| · max(1, ‖y‖∞)`
pub fn default_image_tol(a: &Matrix, y: &[f64]) -> f64 {
    1e-8 * a.max_abs().max(f64::MIN_POSITIVE) * norm_inf(y).max(1.0)
}

/// Valid iff `‖Â_S x_S‖∞ ≤ tol`, `x > 0` on `S` and `x = 0` off `S`, where `Â`
/// has unit columns (zero columns stay zero).
pub fn check_kernel_certificate(a: &Matrix, x: &[f64], support: &[usize], tol: f64) -> Result<CertReport> {
    let n = a.cols();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    let mask = check_support(support, n)?;
    let mut problems = Vec::new();
    let mut margin = f64::INFINITY;
    for j in 0..n {
        if mask[j] {
            margin = margin.min(x[j]);
            if !(x[j] > 0.0) {
                problems.push(format!("x[{}] = {} is not positive on the support", j + 1, x[j]));
            }
        } else if x[j] != 0.0 {
            problems.push(format!("x[{}] = {} is nonzero off the support", j + 1, x[j]));
        }
    }
    if support.is_empty() {
        margin = 0.0;
    }
    let masked: Vec<f64> = x.iter().zip(&mask).map(|(v, s)| if *s { *v } else { 0.0 }).collect();
    let residual = norm_inf(&a.normalized_columns().mul_vec(&masked));
    if !(residual <= tol) {
        problems.push(format!("residual {residual:e} exceeds {tol:e}"));
    }
    Ok(CertReport::new(problems, residual, margin))
}

/// Valid iff `a_iᵀy > 0` on `T` and `|a_iᵀy| ≤ tol` off `T`.
pub fn check_image_certificate(a: &Matrix, y: &[f64], support: &[usize], tol: f64) -> Result<CertReport> {
    if y.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: y.len() });
    }
    let mask = check_support(support, a.cols())?;
    let ay = a.tr_mul_vec(y);
    let mut problems = Vec::new();
    let mut margin = f64::INFINITY;
    let mut residual: f64 = 0.0;
    for (j, v) in ay.iter().enumerate() {
        if mask[j] {
            margin = margin.min(*v);
            if !(*v > 0.0) {
                problems.push(format!("a[{}]ᵀy = {v} is not positive", j + 1));
            }
        } else {
            residual = residual.max(v.abs());
            if !(v.abs() <= tol) {
                problems.push(format!("|a[{}]ᵀy| = {} exceeds {tol:e}", j + 1, v.abs()));
            }
        }
    }
    if support.is_empty() {
        margin = 0.0;
    }
    Ok(CertReport::new(problems, residual, margin))
}

/// Valid iff `S ∩ T = ∅` and `S ∪ T = [n]`.
pub fn check_complementary_pair(s: &[usize], t: &[usize], n: usize) -> CertReport {
    let mut count = vec![0usize; n];
    let mut problems = Vec::new();
    for &j in s.iter().chain(t) {
        match count.get_mut(j) {
            Some(c) => *c += 1,
            None => problems.push(format!("index {} outside [{n}]", j + 1)),
        }
    }
    let overlap: Vec<String> = s.iter().filter(|j| t.contains(j)).map(|j| (j + 1).to_string()).collect();
    if !overlap.is_empty() {
        problems.push(format!("overlap {{{}}}", overlap.join(",")));
    }
    let missing: Vec<String> = (0..n).filter(|&j| count[j] == 0).map(|j| (j + 1).to_string()).collect();
    if !missing.is_empty() {
        problems.push(format!("missing {{{}}}", missing.join(",")));
    }
    CertReport::new(problems, 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        let a = Matrix::from_rows(&[vec![1.0, -1.0]]).unwrap();
        assert!(check_kernel_certificate(&a, &[1.0, 1.0], &[0, 1], 1e-8).unwrap().valid);
        let r = check_kernel_certificate(&a, &[1.0, 0.0], &[0], 1e-8).unwrap();
        assert!(!r.valid);
        assert_eq!(r.residual, 1.0);
        assert!(check_kernel_certificate(&a, &[1.0], &[0], 1e-8).is_err());
    }

    #[test]
    fn image_examples() {
        let r = check_image_certificate(&Matrix::identity(2), &[0.5, 0.5], &[0, 1], 1e-8).unwrap();
        assert!(r.valid);
        assert_eq!(r.margin, 0.5);
        let a = Matrix::from_rows(&[vec![1.0, -1.0]]).unwrap();
        assert!(!check_image_certificate(&a, &[1.0], &[0], 1e-8).unwrap().valid);
    }

    #[test]
    fn complementary_examples() {
        assert!(check_complementary_pair(&[0, 1], &[2], 3).valid);
        let r = check_complementary_pair(&[0], &[0, 1], 2);
        assert!(!r.valid);
        assert!(r.message.contains("overlap"));
        assert!(!check_complementary_pair(&[0], &[], 2).valid);
    }
}
