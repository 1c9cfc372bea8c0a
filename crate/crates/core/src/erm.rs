//! Empirical risk minimizers over affine functions: OLS, generalized L1-ERM
//! (weighted absolute loss plus phantom regularizer) and quantile regression.
//!
//! The piecewise-linear objectives are solved in two stages. Stage 1 is a
//! linear program giving the optimal value `r*`. Stage 2 picks the
//! minimum-norm point of the optimal set: on that set every absolute term is
//! affine, so the optimal set is a union of faces of the arrangement of
//! breakpoint hyperplanes `{β : row·β = target}`. The minimum-norm optimum
//! is therefore the projection of the origin onto the intersection of at
//! most `d + 1` breakpoint hyperplanes, and all such intersections are
//! enumerated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_norm_lstsq, solve_square};
use crate::lp::{Cmp, LinearProgram};
use crate::model::{DataSet, ExtReal, Hyperplane};

/// `w_plus · max(t − row·β, 0) + w_minus · max(row·β − t, 0)`.
#[derive(Debug, Clone, PartialEq)]
struct Term {
    row: Vec<f64>,
    target: f64,
    w_plus: f64,
    w_minus: f64,
}

impl Term {
    fn value(&self, beta: &[f64]) -> f64 {
        let r = self.target - dot(&self.row, beta);
        if r >= 0.0 {
            self.w_plus * r
        } else {
            -self.w_minus * r
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone)]
struct PiecewiseObjective {
    cols: usize,
    terms: Vec<Term>,
    linear: Vec<f64>,
}

impl PiecewiseObjective {
    fn value(&self, beta: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.value(beta)).sum::<f64>() + dot(&self.linear, beta)
    }

    fn stage1(&self) -> Result<(f64, Vec<f64>)> {
        let c = self.cols;
        let m = self.terms.len();
        let mut obj = vec![0.0; c + 2 * m];
        obj[..c].copy_from_slice(&self.linear);
        for (i, t) in self.terms.iter().enumerate() {
            obj[c + 2 * i] = t.w_plus;
            obj[c + 2 * i + 1] = t.w_minus;
        }
        let mut lp = LinearProgram::new(obj);
        for j in 0..c {
            lp.set_free(j);
        }
        for (i, t) in self.terms.iter().enumerate() {
            let mut entries: Vec<(usize, f64)> = t.row.iter().enumerate().map(|(j, v)| (j, *v)).collect();
            entries.push((c + 2 * i, 1.0));
            entries.push((c + 2 * i + 1, -1.0));
            lp.add_sparse_row(&entries, Cmp::Eq, t.target);
        }
        let sol = lp.minimize()?;
        let beta = sol.x[..c].to_vec();
        Ok((self.value(&beta), beta))
    }

    /// Minimum-norm point among all breakpoint-hyperplane intersections whose
    /// objective is within tolerance of the optimum.
    fn stage2(&self, r_star: f64) -> Option<(f64, Vec<f64>)> {
        let c = self.cols;
        let m = self.terms.len();
        let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
        let mut subset: Vec<usize> = Vec::with_capacity(c);
        visit_subsets(m, c, &mut subset, &mut |s| {
            if let Some(p) = self.project_origin(s) {
                candidates.push((self.value(&p), p));
            }
        });
        let (best, at) = candidates
            .iter()
            .map(|(v, p)| (*v, p.as_slice()))
            .min_by(|a, b| a.0.total_cmp(&b.0))?;
        let best = best.min(r_star);
        // rounding in evaluating the objective scales with the size of its terms
        let tol = 1e-12 * (1.0 + self.magnitude(at));
        candidates
            .into_iter()
            .filter(|(v, _)| *v <= best + tol)
            .min_by(|a, b| dot(&a.1, &a.1).total_cmp(&dot(&b.1, &b.1)))
    }

    /// Sum of the absolute sizes of everything added up in `value(beta)`.
    fn magnitude(&self, beta: &[f64]) -> f64 {
        let abs_dot = |a: &[f64]| a.iter().zip(beta).map(|(x, y)| (x * y).abs()).sum::<f64>();
        self.terms.iter().map(|t| t.w_plus.max(t.w_minus) * (t.target.abs() + abs_dot(&t.row))).sum::<f64>() + abs_dot(&self.linear)
    }

    /// Projection of the origin onto `{β : row_i·β = t_i, i ∈ s}`; `None` when the rows are dependent.
    fn project_origin(&self, s: &[usize]) -> Option<Vec<f64>> {
        let c = self.cols;
        let k = s.len();
        if k == 0 {
            return Some(vec![0.0; c]);
        }
        let mut gram = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                gram[a * k + b] = dot(&self.terms[s[a]].row, &self.terms[s[b]].row);
            }
        }
        let t: Vec<f64> = s.iter().map(|&i| self.terms[i].target).collect();
        let lambda = solve_square(&gram, &t)?;
        let mut p = vec![0.0; c];
        for (a, &i) in s.iter().enumerate() {
            for j in 0..c {
                p[j] += lambda[a] * self.terms[i].row[j];
            }
        }
        Some(p)
    }

    fn solve(&self) -> Result<ErmSolution> {
        let (r_star, vertex) = self.stage1()?;
        let (objective, beta) = self.stage2(r_star).unwrap_or((r_star, vertex.clone()));
        Ok(ErmSolution {
            hyperplane: Hyperplane::from_coefficients(&beta),
            objective,
            vertex: Hyperplane::from_coefficients(&vertex),
        })
    }
}

/// Calls `f` on every subset of `0..m` of size at most `max`, in lexicographic order.
fn visit_subsets(m: usize, max: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    f(cur);
    if cur.len() == max {
        return;
    }
    let start = cur.last().map_or(0, |v| v + 1);
    for i in start..m {
        cur.push(i);
        visit_subsets(m, max, cur, f);
        cur.pop();
    }
}

/// Result of a two-stage solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ErmSolution {
    /// Minimum-norm optimum.
    pub hyperplane: Hyperplane,
    pub objective: f64,
    /// Basic optimal solution of the stage-1 program.
    pub vertex: Hyperplane,
}

/// A phantom term `weight · |target − β₁·anchor − β₀|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phantom {
    pub anchor: Vec<f64>,
    pub target: f64,
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct L1Config {
    /// Per-agent weights; all ones when absent.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub phantoms: Vec<Phantom>,
    /// Linear term on `(β₁, β₀)`; empty means zero.
    #[serde(default)]
    pub drift: Vec<f64>,
}

impl L1Config {
    pub fn with_weights(mut self, w: Vec<f64>) -> Self {
        self.weights = Some(w);
        self
    }

    /// `d = 0` regularizer `h(y) = Σ_j |y − α_j| + (k₋∞ − k₊∞)·y` for phantoms in the extended reals.
    pub fn with_scalar_phantoms(mut self, phantoms: &[ExtReal]) -> Self {
        let mut drift = 0.0;
        for p in phantoms {
            match p {
                ExtReal::Finite(a) => self.phantoms.push(Phantom { anchor: vec![], target: *a, weight: 1.0 }),
                ExtReal::NegInf => drift += 1.0,
                ExtReal::PosInf => drift -= 1.0,
            }
        }
        self.drift = vec![drift];
        self
    }

    pub fn with_scalar_drift(mut self, drift: f64) -> Self {
        self.drift = vec![drift];
        self
    }

    fn objective(&self, data: &DataSet) -> Result<PiecewiseObjective> {
        let n = data.n();
        let d = data.dim();
        let weights = match &self.weights {
            Some(w) if w.len() != n => return Err(Error::DimensionMismatch { expected: n, found: w.len() }),
            Some(w) => w.clone(),
            None => vec![1.0; n],
        };
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidInput("agent weights must be positive".into()));
        }
        let mut terms: Vec<Term> = (0..n)
            .map(|i| Term { row: data.x_bar(i), target: data.y(i), w_plus: weights[i], w_minus: weights[i] })
            .collect();
        for p in &self.phantoms {
            if p.anchor.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.anchor.len() });
            }
            if !(p.weight > 0.0 && p.weight.is_finite() && p.target.is_finite()) {
                return Err(Error::InvalidInput("phantom weights must be positive and targets finite".into()));
            }
            let mut row = p.anchor.clone();
            row.push(1.0);
            terms.push(Term { row, target: p.target, w_plus: p.weight, w_minus: p.weight });
        }
        let linear = match self.drift.len() {
            0 => vec![0.0; d + 1],
            l if l == d + 1 => self.drift.clone(),
            l => return Err(Error::DimensionMismatch { expected: d + 1, found: l }),
        };
        Ok(PiecewiseObjective { cols: d + 1, terms, linear })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileConfig {
    pub q: f64,
}

impl QuantileConfig {
    pub fn new(q: f64) -> Result<Self> {
        let c = Self { q };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q > 0.0 && self.q < 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("quantile q = {} outside (0, 1)", self.q)))
        }
    }
}

/// Minimum-norm least squares.
pub fn fit_ols(data: &DataSet) -> Hyperplane {
    let c = data.dim() + 1;
    let mut a = Vec::with_capacity(data.n() * c);
    for i in 0..data.n() {
        a.extend_from_slice(&data.x_bar(i));
    }
    Hyperplane::from_coefficients(&min_norm_lstsq(&a, c, data.ys()))
}

pub fn solve_l1erm(data: &DataSet, cfg: &L1Config) -> Result<ErmSolution> {
    cfg.objective(data)?.solve()
}

pub fn fit_l1erm(data: &DataSet, cfg: &L1Config) -> Result<Hyperplane> {
    Ok(solve_l1erm(data, cfg)?.hyperplane)
}

/// Weighted absolute loss plus regularizer at `h`.
pub fn l1_objective(data: &DataSet, cfg: &L1Config, h: &Hyperplane) -> Result<f64> {
    Ok(cfg.objective(data)?.value(&h.coefficients()))
}

fn quantile_objective(data: &DataSet, cfg: &QuantileConfig) -> Result<PiecewiseObjective> {
    cfg.validate()?;
    let terms = (0..data.n())
        .map(|i| Term { row: data.x_bar(i), target: data.y(i), w_plus: cfg.q, w_minus: 1.0 - cfg.q })
        .collect();
    Ok(PiecewiseObjective { cols: data.dim() + 1, terms, linear: vec![0.0; data.dim() + 1] })
}

pub fn solve_quantile(data: &DataSet, cfg: &QuantileConfig) -> Result<ErmSolution> {
    quantile_objective(data, cfg)?.solve()
}

pub fn fit_quantile(data: &DataSet, cfg: &QuantileConfig) -> Result<Hyperplane> {
    Ok(solve_quantile(data, cfg)?.hyperplane)
}

/// The quantile risk: weight `q` on points on or above the fit, `1 − q` below.
pub fn quantile_risk(data: &DataSet, cfg: &QuantileConfig, h: &Hyperplane) -> Result<f64> {
    Ok(quantile_objective(data, cfg)?.value(&h.coefficients()))
}
