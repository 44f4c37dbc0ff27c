#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use conic_rescale::linalg::{dot, norm, Matrix};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn mat(rows: &[&[f64]]) -> Matrix {
    Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn unit(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let v = gaussian(rng, m);
        let n = norm(&v);
        if n > 1e-8 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

pub fn random_integer_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize, bound: i64) -> Matrix {
    let data = (0..m * n).map(|_| rng.random_range(-bound..=bound) as f64).collect();
    Matrix::from_row_major(m, n, data).unwrap()
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull (monotone chain).
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Intersection of two counter-clockwise convex polygons (Sutherland-Hodgman).
pub fn clip(subject: &[[f64; 2]], clipper: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut out = subject.to_vec();
    for i in 0..clipper.len() {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clipper[i], clipper[(i + 1) % clipper.len()]);
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let (p, q) = (input[j], input[(j + 1) % input.len()]);
            let (cp, cq) = (cross(a, b, p), cross(a, b, q));
            if cp >= 0.0 {
                out.push(p);
            }
            if (cp >= 0.0) != (cq >= 0.0) {
                let t = cp / (cp - cq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
    }
    out
}

pub fn shoelace(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1]).sum::<f64>().abs() / 2.0
}

/// Area of `conv(Â) ∩ −conv(Â)` for a 2-row matrix.
pub fn symmetric_hull_area(a: &Matrix) -> f64 {
    assert_eq!(a.rows(), 2);
    let ahat = a.normalized_columns();
    let pts: Vec<[f64; 2]> = (0..a.cols()).map(|j| [ahat[(0, j)], ahat[(1, j)]]).collect();
    let neg: Vec<[f64; 2]> = pts.iter().map(|p| [-p[0], -p[1]]).collect();
    let (h, g) = (convex_hull(&pts), convex_hull(&neg));
    if h.len() < 3 || g.len() < 3 {
        return 0.0;
    }
    shoelace(&clip(&h, &g))
}

/// Projector onto `ker(A)` from a Gram-Schmidt basis of the row space.
pub fn gram_schmidt_kernel_projector(a: &Matrix) -> Matrix {
    let n = a.cols();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..a.rows() {
        let mut v = a.row(i).to_vec();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nv = norm(&v);
        if nv > 1e-9 * norm(a.row(i)).max(1e-300) {
            basis.push(v.iter().map(|x| x / nv).collect());
        }
    }
    let mut p = Matrix::identity(n);
    for q in &basis {
        p.rank_one_update(-1.0, q, q);
    }
    p
}

/// Largest product of column norms over all linearly independent column
/// subsets, by exhaustive enumeration.
pub fn brute_force_delta(a: &Matrix) -> f64 {
    let norms = a.column_norms();
    let n = a.cols();
    let mut best: f64 = 1.0;
    for size in 1..=n.min(a.rows()) {
        for c in (0..n).combinations(size) {
            if conic_rescale::linalg::rank(&a.select_columns(&c)) == size {
                best = best.max(c.iter().map(|&j| norms[j]).product());
            }
        }
    }
    best
}

/// Points of `F_A = {z : Aᵀz ≥ 0, ‖z‖ ≤ 1}` by hit-and-run from the strictly
/// feasible direction `centre`. Every other point is a chord endpoint pushed
/// out to the unit sphere, so the extreme rays are covered as well as the interior.
pub fn sample_feasible_set(a: &Matrix, centre: &[f64], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let m = a.rows();
    let mut rng = rng(seed);
    let mut z: Vec<f64> = centre.iter().map(|x| 0.5 * x / norm(centre)).collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let d = unit(&mut rng, m);
        // ‖z + t d‖ ≤ 1
        let (b, c) = (dot(&z, &d), dot(&z, &z) - 1.0);
        let root = (b * b - c).max(0.0).sqrt();
        let (mut lo, mut hi) = (-b - root, -b + root);
        // a_jᵀ(z + t d) ≥ 0
        for (s, r) in a.tr_mul_vec(&z).iter().zip(a.tr_mul_vec(&d)) {
            if r > 0.0 {
                lo = lo.max(-s / r);
            } else if r < 0.0 {
                hi = hi.min(-s / r);
            }
        }
        if !(hi > lo) {
            continue;
        }
        let edge = if rng.random::<bool>() { lo } else { hi };
        let p: Vec<f64> = z.iter().zip(&d).map(|(zi, di)| zi + edge * di).collect();
        let p: Vec<f64> = p.iter().map(|x| x / norm(&p)).collect();
        if a.tr_mul_vec(&p).iter().all(|v| *v >= 0.0) {
            out.push(p);
        }
        let t = rng.random_range(lo..hi);
        z = z.iter().zip(&d).map(|(zi, di)| zi + t * di).collect();
        if out.len() < count && a.tr_mul_vec(&z).iter().all(|v| *v >= 0.0) {
            out.push(z.clone());
        }
    }
    out
}

/// Random planar instance with clusters of columns around `e₁` and `−e₁`
/// within an angle `w`, so that `0` may sit barely inside `conv(Â)`. Returns
/// `None` when `0` is not interior.
pub fn thin_planar_instance(seed: u64) -> Option<Matrix> {
    let mut rng = rng(seed);
    let k = rng.random_range(2..=6);
    let l = rng.random_range(1..=4);
    let w = 10f64.powf(rng.random_range(-3.0..-1.5));
    let mut cols = Vec::new();
    for (base, count) in [(0.0, k), (std::f64::consts::PI, l)] {
        for _ in 0..count {
            let t: f64 = base + w * rng.random_range(-1.0..1.0);
            cols.push(vec![t.cos(), t.sin()]);
        }
    }
    let a = Matrix::from_columns(&cols).unwrap();
    let rho = conic_rescale::conditioning::goffin_oracle(&a, 1e-12).ok()?;
    (rho < 0.0).then_some(a)
}

/// Unit columns `c·e_m + √(1−c²)·u` with `c ∈ [δ, 2δ]` and `u ⊥ e_m` random:
/// every column sits near the rim of the cap, so `ρ` is of order `δ`.
pub fn rim_instance(m: usize, n: usize, delta: f64, seed: u64) -> Matrix {
    let mut rng = rng(seed);
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let c = delta * rng.random_range(1.0..2.0);
            let mut v: Vec<f64> = unit(&mut rng, m - 1).iter().map(|u| u * (1.0 - c * c).sqrt()).collect();
            v.push(c);
            v
        })
        .collect();
    Matrix::from_columns(&cols).unwrap()
}
