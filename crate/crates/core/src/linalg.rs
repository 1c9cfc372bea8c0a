//! Small dense linear algebra: pivoted Gaussian elimination for the square
//! systems of transversal hyperplanes, and SVD-based minimum-norm solves.

use nalgebra::{DMatrix, DVector};

/// Systems whose 1-norm condition estimate exceeds this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Solves the square system `a x = b` (row-major `a`) by Gaussian elimination
/// with partial pivoting. Returns `None` if the matrix is singular or its
/// condition number exceeds [`MAX_CONDITION`].
pub fn solve_square(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let norm_a = one_norm(a, n);
    if norm_a == 0.0 {
        return None;
    }
    let lu = Lu::factor(a, n)?;
    // ‖A⁻¹‖₁ by explicit inversion; n is tiny.
    let mut inv_norm = 0.0_f64;
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let col = lu.solve(&e);
        inv_norm = inv_norm.max(col.iter().map(|v| v.abs()).sum());
    }
    if !(norm_a * inv_norm <= MAX_CONDITION) {
        return None;
    }
    let x = lu.solve(b);
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn one_norm(a: &[f64], n: usize) -> f64 {
    (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

struct Lu {
    n: usize,
    m: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(a: &[f64], n: usize) -> Option<Self> {
        let mut m = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| m[i * n + k].abs().total_cmp(&m[j * n + k].abs()))
                .unwrap();
            if m[p * n + k] == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    m.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let piv = m[k * n + k];
            for i in k + 1..n {
                let f = m[i * n + k] / piv;
                m[i * n + k] = f;
                for j in k + 1..n {
                    m[i * n + j] -= f * m[k * n + j];
                }
            }
        }
        Some(Self { n, m, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.m[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.m[i * n + j] * x[j];
            }
            x[i] /= self.m[i * n + i];
        }
        x
    }
}

/// Numerical rank of the matrix whose rows are `rows`.
pub fn rank(rows: &[Vec<f64>]) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let scale = m.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    m.rank(1e-10 * scale * rows.len().max(rows[0].len()) as f64)
}

/// Minimum-norm least-squares solution of `g x = t` (`g` row-major with `cols` columns).
pub fn min_norm_lstsq(g: &[f64], cols: usize, t: &[f64]) -> Vec<f64> {
    let rows = t.len();
    if rows == 0 {
        return vec![0.0; cols];
    }
    let m = DMatrix::from_row_slice(rows, cols, g);
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    let eps = 1e-12 * smax.max(1.0) * rows.max(cols) as f64;
    let rhs = DVector::from_column_slice(t);
    svd.solve(&rhs, eps).map(|v| v.iter().copied().collect()).unwrap_or_else(|_| vec![0.0; cols])
}

/// Minimum-norm solution of the consistent system `g x = t`, or `None` if the
/// system has no exact solution (residual above `tol·(1+‖t‖∞)`).
pub fn min_norm_exact(g: &[f64], cols: usize, t: &[f64], tol: f64) -> Option<Vec<f64>> {
    let x = min_norm_lstsq(g, cols, t);
    let scale = 1.0 + t.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for (i, ti) in t.iter().enumerate() {
        let r: f64 = g[i * cols..(i + 1) * cols].iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() - ti;
        if r.abs() > tol * scale {
            return None;
        }
    }
    Some(x)
}

/// Minimizes `‖a x − y‖²` subject to `cᵀx = h` via the KKT system.
pub fn constrained_lstsq(a: &[f64], cols: usize, y: &[f64], c: &[f64], h: f64) -> Option<Vec<f64>> {
    let rows = y.len();
    let am = DMatrix::from_row_slice(rows, cols, a);
    let ata = am.transpose() * &am;
    let aty = am.transpose() * DVector::from_column_slice(y);
    let k = cols + 1;
    let mut kkt = DMatrix::zeros(k, k);
    kkt.view_mut((0, 0), (cols, cols)).copy_from(&(ata * 2.0));
    for j in 0..cols {
        kkt[(j, cols)] = c[j];
        kkt[(cols, j)] = c[j];
    }
    let mut rhs = DVector::zeros(k);
    for j in 0..cols {
        rhs[j] = 2.0 * aty[j];
    }
    rhs[cols] = h;
    let sol = kkt.lu().solve(&rhs)?;
    Some(sol.iter().take(cols).copied().collect())
}
