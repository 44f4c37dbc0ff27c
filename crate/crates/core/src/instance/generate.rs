//! Seeded instance generators for the three regimes `ρ < 0`, `ρ > 0` and `ρ = 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{exact_support_oracle, ConicInstance, Provenance};
use crate::conditioning::{goffin_oracle, RHO_TOL};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, rank, Matrix};

/// Attempts before a generator gives up.
pub const RESAMPLE_BUDGET: usize = 10_000;

fn unit_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-8 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

fn check_rho_target(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidArgument(format!("rho_target must lie in (0, 1), got {rho}")));
    }
    Ok(())
}

/// Unit columns with `0` in the interior of their convex hull and Goffin
/// measure at most `-rho_target` (certified by `goffin_oracle` when it supports
/// the size, in which case `known_rho` holds the measured value).
pub fn gen_kernel_feasible(m: usize, n: usize, rho_target: f64, seed: u64) -> Result<ConicInstance> {
    check_rho_target(rho_target)?;
    if m == 0 || n < m + 1 {
        return Err(Error::InvalidArgument(format!("need n ≥ m + 1 ≥ 2, got m={m}, n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESAMPLE_BUDGET {
        let mut cols: Vec<Vec<f64>> = (0..n - 1).map(|_| unit_vector(&mut rng, m)).collect();
        let mut s = vec![0.0; m];
        for c in &cols {
            for (si, ci) in s.iter_mut().zip(c) {
                *si += ci;
            }
        }
        let ns = norm(&s);
        if ns < 1e-6 {
            continue;
        }
        cols.push(s.iter().map(|x| -x / ns).collect());
        let a = Matrix::from_columns(&cols)?;
        if rank(&a) < m {
            continue;
        }
        let known_rho = match goffin_oracle(&a, RHO_TOL) {
            Ok(rho) if rho <= -rho_target => Some(rho),
            Ok(_) => continue,
            Err(Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        };
        let mut inst = ConicInstance::new(a, Provenance::Generated { family: "kernel".into(), seed });
        inst.known_rho = known_rho;
        inst.known_supports = Some(((0..n).collect(), Vec::new()));
        return Ok(inst);
    }
    Err(Error::ResampleBudget { attempts: RESAMPLE_BUDGET, reason: format!("no instance with rho <= -{rho_target}") })
}

/// Unit columns in the cap `{â : âᵀy* ≥ rho_target}` around a random unit `y*`,
/// the first one on the boundary of the cap. `known_rho = rho_target` is a
/// lower bound on the Goffin measure. For `n ≥ m` the result has full row rank.
pub fn gen_image_feasible(m: usize, n: usize, rho_target: f64, seed: u64) -> Result<ConicInstance> {
    check_rho_target(rho_target)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("need m ≥ 1 and n ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESAMPLE_BUDGET {
        let ystar = if m == 1 { vec![1.0] } else { unit_vector(&mut rng, m) };
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            if m == 1 {
                cols.push(vec![1.0]);
                continue;
            }
            let c = if j == 0 { rho_target } else { rng.random_range(rho_target..=1.0) };
            let mut w = unit_vector(&mut rng, m);
            let p = dot(&w, &ystar);
            for (wi, yi) in w.iter_mut().zip(&ystar) {
                *wi -= p * yi;
            }
            let nw = norm(&w);
            if nw < 1e-8 {
                continue;
            }
            let s = (1.0 - c * c).max(0.0).sqrt();
            let col: Vec<f64> = ystar.iter().zip(&w).map(|(y, wi)| c * y + s * wi / nw).collect();
            let nc = norm(&col);
            cols.push(col.iter().map(|x| x / nc).collect());
        }
        if cols.len() < n {
            continue;
        }
        let a = Matrix::from_columns(&cols)?;
        if n >= m && rank(&a) < m {
            continue;
        }
        let mut inst = ConicInstance::new(a, Provenance::Generated { family: "image".into(), seed });
        inst.known_rho = Some(if m == 1 { 1.0 } else { rho_target });
        inst.known_supports = Some((Vec::new(), (0..n).collect()));
        return Ok(inst);
    }
    Err(Error::ResampleBudget { attempts: RESAMPLE_BUDGET, reason: "rank-deficient samples".into() })
}

fn small_int(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> f64 {
    rng.random_range(lo..=hi) as f64
}

/// Integer instance with `ρ = 0` whose first `s` columns form `S*` and the
/// rest `T*`. The `S` columns span a coordinate subspace `H` and sum to zero;
/// the `T` columns have last coordinate in `[1, 2]`, so `y = e_m ⊥ H` sees
/// them strictly. A random unimodular row transform hides the structure, and
/// the supports are certified by the exact oracle. Full row rank.
pub fn gen_degenerate(m: usize, n: usize, s: usize, seed: u64) -> Result<ConicInstance> {
    if m == 0 || s == 0 || s >= n {
        return Err(Error::InvalidArgument(format!("need 1 ≤ s < n and m ≥ 1, got m={m}, n={n}, s={s}")));
    }
    let t = n - s;
    let h_hi = (s - 1).min(m - 1);
    let mut h_lo = m.saturating_sub(t);
    if s >= 2 && m >= 2 {
        h_lo = h_lo.max(1);
    }
    if h_lo > h_hi {
        return Err(Error::InvalidArgument(format!(
            "cannot build a full-rank instance with m={m}, n={n}, s={s}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESAMPLE_BUDGET {
        let h = rng.random_range(h_lo..=h_hi);
        let mut a = Matrix::zeros(m, n);
        if h > 0 {
            let mut sum = vec![0.0; h];
            for j in 0..s - 1 {
                loop {
                    let v: Vec<f64> = (0..h).map(|_| small_int(&mut rng, -2, 2)).collect();
                    if v.iter().any(|x| *x != 0.0) {
                        for (i, x) in v.iter().enumerate() {
                            a[(i, j)] = *x;
                            sum[i] += x;
                        }
                        break;
                    }
                }
            }
            if sum.iter().all(|x| *x == 0.0) {
                continue;
            }
            for (i, x) in sum.iter().enumerate() {
                a[(i, s - 1)] = -x;
            }
            if rank(&a.select_columns(&(0..s).collect::<Vec<_>>())) < h {
                continue;
            }
        }
        for j in s..n {
            for i in 0..m - 1 {
                a[(i, j)] = small_int(&mut rng, -2, 2);
            }
            a[(m - 1, j)] = small_int(&mut rng, 1, 2);
        }
        let mut u = Matrix::identity(m);
        for i in 1..m {
            for k in 0..i {
                u[(i, k)] = small_int(&mut rng, -1, 1);
            }
        }
        let a = u.matmul(&a);
        if rank(&a) < m {
            continue;
        }
        let split = exact_support_oracle(&a)?;
        let s_set: Vec<usize> = (0..s).collect();
        let t_set: Vec<usize> = (s..n).collect();
        if split.kernel != s_set || split.image != t_set {
            continue;
        }
        let mut inst = ConicInstance::new(a, Provenance::Generated { family: "degenerate".into(), seed });
        inst.known_rho = Some(0.0);
        inst.known_supports = Some((s_set, t_set));
        return Ok(inst);
    }
    Err(Error::ResampleBudget { attempts: RESAMPLE_BUDGET, reason: "exact oracle refuted every sample".into() })
}
