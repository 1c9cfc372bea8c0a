//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! The programs solved here have at most a few dozen variables, so a full
//! tableau is simpler and more predictable than anything sparse.

use crate::error::{Error, Result};

const EPS: f64 = 1e-10;
// Reduced costs above this are treated as roundoff when no row blocks the ray.
const RAY_EPS: f64 = 1e-7;
const MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Row {
    coef: Vec<f64>,
    cmp: Cmp,
    rhs: f64,
}

/// `minimize c·x` subject to linear rows; variables are nonnegative unless
/// marked free.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    free: Vec<bool>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self { objective, free: vec![false; n], rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_free(&mut self, j: usize) {
        self.free[j] = true;
    }

    pub fn add_row(&mut self, coef: Vec<f64>, cmp: Cmp, rhs: f64) {
        debug_assert_eq!(coef.len(), self.num_vars());
        self.rows.push(Row { coef, cmp, rhs });
    }

    /// Adds the sparse row `Σ coef_j x_j (cmp) rhs`.
    pub fn add_sparse_row(&mut self, entries: &[(usize, f64)], cmp: Cmp, rhs: f64) {
        let mut coef = vec![0.0; self.num_vars()];
        for &(j, v) in entries {
            coef[j] += v;
        }
        self.add_row(coef, cmp, rhs);
    }

    pub fn minimize(&self) -> Result<LpSolution> {
        // Column layout: for each original var j, column pos[j]; free vars get a
        // second (negated) column.
        let nv = self.num_vars();
        let mut pos = Vec::with_capacity(nv);
        let mut ncols = 0;
        for j in 0..nv {
            pos.push(ncols);
            ncols += if self.free[j] { 2 } else { 1 };
        }
        let structural = ncols;
        let m = self.rows.len();

        // Normalize rows to nonnegative rhs.
        let mut rows: Vec<(Vec<f64>, Cmp, f64)> = Vec::with_capacity(m);
        for r in &self.rows {
            let mut c = vec![0.0; structural];
            for j in 0..nv {
                c[pos[j]] = r.coef[j];
                if self.free[j] {
                    c[pos[j] + 1] = -r.coef[j];
                }
            }
            let (c, cmp, rhs) = if r.rhs < 0.0 {
                let flipped = match r.cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
                (c.iter().map(|v| -v).collect(), flipped, -r.rhs)
            } else {
                (c, r.cmp, r.rhs)
            };
            rows.push((c, cmp, rhs));
        }

        let n_slack = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Cmp::Le).count();
        let total = structural + n_slack + n_art;
        let art_start = structural + n_slack;
        let width = total + 1;

        let mut t = Tableau { m, width, a: vec![0.0; (m + 1) * width], basis: vec![0; m] };
        let mut s = structural;
        let mut a = art_start;
        for (i, (c, cmp, rhs)) in rows.iter().enumerate() {
            t.a[i * width..i * width + structural].copy_from_slice(c);
            t.a[i * width + total] = *rhs;
            match cmp {
                Cmp::Le => {
                    t.a[i * width + s] = 1.0;
                    t.basis[i] = s;
                    s += 1;
                }
                Cmp::Ge => {
                    t.a[i * width + s] = -1.0;
                    s += 1;
                    t.a[i * width + a] = 1.0;
                    t.basis[i] = a;
                    a += 1;
                }
                Cmp::Eq => {
                    t.a[i * width + a] = 1.0;
                    t.basis[i] = a;
                    a += 1;
                }
            }
        }

        let mut iters = 0;
        if n_art > 0 {
            // Phase 1: minimize the sum of artificials.
            let mut cost = vec![0.0; total];
            cost[art_start..].iter_mut().for_each(|v| *v = 1.0);
            t.set_objective(&cost);
            t.run(total, &mut iters)?;
            let infeas = -t.a[m * width + total];
            let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
            if infeas > 1e-8 * scale {
                return Err(Error::Infeasible);
            }
            // Drive artificials out of the basis.
            for i in 0..m {
                if t.basis[i] >= art_start {
                    if let Some(j) = (0..art_start).find(|&j| t.a[i * width + j].abs() > 1e-9) {
                        t.pivot(i, j);
                    }
                }
            }
        }

        // Phase 2 over non-artificial columns.
        let mut cost = vec![0.0; total];
        for j in 0..nv {
            cost[pos[j]] = self.objective[j];
            if self.free[j] {
                cost[pos[j] + 1] = -self.objective[j];
            }
        }
        t.set_objective(&cost);
        t.run(art_start, &mut iters)?;

        let mut col = vec![0.0; total];
        for i in 0..m {
            col[t.basis[i]] = t.a[i * width + total];
        }
        let x: Vec<f64> = (0..nv)
            .map(|j| if self.free[j] { col[pos[j]] - col[pos[j] + 1] } else { col[pos[j]] })
            .collect();
        let objective = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution { x, objective })
    }
}

struct Tableau {
    m: usize,
    width: usize,
    a: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    /// Installs reduced costs for `cost` in the last row.
    fn set_objective(&mut self, cost: &[f64]) {
        let (m, w) = (self.m, self.width);
        let total = w - 1;
        for j in 0..total {
            self.a[m * w + j] = cost[j];
        }
        self.a[m * w + total] = 0.0;
        for i in 0..m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..w {
                    self.a[m * w + j] -= cb * self.a[i * w + j];
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.a[r * w + c];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f != 0.0 {
                for j in 0..w {
                    self.a[i * w + j] -= f * self.a[r * w + j];
                }
                self.a[i * w + c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule over the first `ncols` columns. A column with only a
    /// roundoff-sized negative reduced cost and no blocking row is skipped
    /// rather than reported as an unbounded ray.
    fn run(&mut self, ncols: usize, iters: &mut usize) -> Result<()> {
        let (m, w) = (self.m, self.width);
        loop {
            let mut entering = None;
            for c in (0..ncols).filter(|&j| self.a[m * w + j] < -EPS) {
                match self.ratio_row(c) {
                    Some(r) => {
                        entering = Some((r, c));
                        break;
                    }
                    None if self.a[m * w + c] < -RAY_EPS => return Err(Error::Unbounded),
                    None => {}
                }
            }
            let Some((r, c)) = entering else {
                return Ok(());
            };
            self.pivot(r, c);
            *iters += 1;
            if *iters > MAX_ITER {
                return Err(Error::IterationLimit);
            }
        }
    }

    fn ratio_row(&self, c: usize) -> Option<usize> {
        let (m, w) = (self.m, self.width);
        let rhs = w - 1;
        let mut best: Option<(usize, f64)> = None;
        for i in 0..m {
            let v = self.a[i * w + c];
            if v > EPS {
                let ratio = self.a[i * w + rhs] / v;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - 1e-12 || (ratio <= br + 1e-12 && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
        }
        best.map(|(r, _)| r)
    }
}
