//! Generalized resistant hyperplanes (GRH) and their `d = 1` special case,
//! generalized resistant lines (GRL).
//!
//! Given a publicly separable family `S_1, …, S_{d+1}` with ranks `k_t`, the
//! GRH is the unique hyperplane whose `k_t`-th smallest residual on `S_t` is
//! zero for every `t`. It passes through one agent of each set, so it is
//! found by enumerating all `Π |S_t|` transversal hyperplanes and keeping
//! those that satisfy the rank conditions. The enumeration is exponential in
//! `d`; the transversal systems depend only on the public `x`'s and are
//! factorized once in [`GrhMechanism::new`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve_square;
use crate::model::{DataSet, Hyperplane, MedianSide};
use crate::separability::{require_admissible, require_publicly_separable, sorted_by_x, transversals, AgentPartition};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrhResult {
    pub hyperplane: Hyperplane,
    /// One agent per set, in set order.
    pub transversal: Vec<usize>,
    pub candidates_examined: usize,
}

/// Absolute tolerance under which a residual counts as zero.
pub fn zero_tolerance(data: &DataSet) -> f64 {
    1e-9 * (1.0 + data.max_abs_y())
}

/// Tie-robust reading of "the `k`-th smallest residual is zero": at most
/// `k − 1` residuals are negative and at least `k` are nonpositive.
pub fn rank_condition_holds(residuals: &[f64], k: usize, tol: f64) -> bool {
    let neg = residuals.iter().filter(|r| **r < -tol).count();
    let le = residuals.iter().filter(|r| **r <= tol).count();
    neg < k && le >= k
}

pub fn satisfies_rank_conditions(data: &DataSet, part: &AgentPartition, h: &Hyperplane) -> bool {
    let tol = zero_tolerance(data);
    part.sets.iter().zip(&part.ranks).all(|(s, &k)| {
        let r: Vec<f64> = s.iter().map(|&i| data.y(i) - h.eval(data.x(i))).collect();
        rank_condition_holds(&r, k, tol)
    })
}

fn same_plane(a: &Hyperplane, b: &Hyperplane) -> bool {
    let scale = 1.0 + a.max_abs_coefficient().max(b.max_abs_coefficient());
    a.approx_eq(b, 1e-9 * scale)
}

/// A GRH mechanism bound to fixed public data: partition validated and every
/// transversal system inverted once.
#[derive(Debug, Clone)]
pub struct GrhMechanism {
    part: AgentPartition,
    xs: Vec<f64>,
    dim: usize,
    systems: Vec<(Vec<usize>, Vec<f64>)>,
}

impl GrhMechanism {
    pub fn new(public: &DataSet, part: AgentPartition) -> Result<Self> {
        let d = public.dim();
        part.validate(public.n())?;
        if part.len() != d + 1 {
            return Err(Error::InvalidInput(format!("a GRH in R^{d} needs {} sets, got {}", d + 1, part.len())));
        }
        require_publicly_separable(public, &part)?;
        let m = d + 1;
        let sizes: Vec<usize> = part.sets.iter().map(|s| s.len()).collect();
        let mut systems = Vec::with_capacity(sizes.iter().product());
        for pick in transversals(&sizes) {
            let agents: Vec<usize> = pick.iter().enumerate().map(|(t, &j)| part.sets[t][j]).collect();
            let mut a = Vec::with_capacity(m * m);
            for &i in &agents {
                a.extend_from_slice(&public.x_bar(i));
            }
            let mut inv = vec![0.0; m * m];
            for c in 0..m {
                let mut e = vec![0.0; m];
                e[c] = 1.0;
                let col = solve_square(&a, &e).ok_or_else(|| Error::SingularTransversal(agents.clone()))?;
                for r in 0..m {
                    inv[r * m + c] = col[r];
                }
            }
            systems.push((agents, inv));
        }
        Ok(Self { part, xs: public.xs_flat().to_vec(), dim: d, systems })
    }

    pub fn partition(&self) -> &AgentPartition {
        &self.part
    }

    fn check_public(&self, data: &DataSet) -> Result<()> {
        data.require_dim(self.dim)?;
        if data.xs_flat() != self.xs.as_slice() {
            return Err(Error::InvalidInput("data has different public x-vectors than the prepared mechanism".into()));
        }
        Ok(())
    }

    /// All transversal hyperplanes for the reports in `data`.
    pub fn traversal_hyperplanes(&self, data: &DataSet) -> Result<Vec<(Vec<usize>, Hyperplane)>> {
        self.check_public(data)?;
        Ok(self.systems.iter().map(|(agents, inv)| (agents.clone(), self.solve(inv, agents, data))).collect())
    }

    fn solve(&self, inv: &[f64], agents: &[usize], data: &DataSet) -> Hyperplane {
        let m = self.dim + 1;
        let coef: Vec<f64> = (0..m).map(|r| (0..m).map(|c| inv[r * m + c] * data.y(agents[c])).sum()).collect();
        Hyperplane::from_coefficients(&coef)
    }

    pub fn fit(&self, data: &DataSet) -> Result<GrhResult> {
        self.check_public(data)?;
        let tol = zero_tolerance(data);
        let mut found: Vec<(Vec<usize>, Hyperplane)> = Vec::new();
        let mut resid = Vec::new();
        for (agents, inv) in &self.systems {
            let h = self.solve(inv, agents, data);
            let ok = self.part.sets.iter().zip(&self.part.ranks).all(|(s, &k)| {
                resid.clear();
                resid.extend(s.iter().map(|&i| data.y(i) - h.eval(data.x(i))));
                rank_condition_holds(&resid, k, tol)
            });
            if ok && !found.iter().any(|(_, g)| same_plane(g, &h)) {
                found.push((agents.clone(), h));
            }
        }
        match found.len() {
            0 => Err(Error::NoSolution),
            1 => {
                let (transversal, hyperplane) = found.pop().unwrap();
                Ok(GrhResult { hyperplane, transversal, candidates_examined: self.systems.len() })
            }
            k => Err(Error::UniquenessViolation(k)),
        }
    }
}

/// Every transversal hyperplane of a publicly separable family.
pub fn traversal_hyperplanes(data: &DataSet, part: &AgentPartition) -> Result<Vec<(Vec<usize>, Hyperplane)>> {
    GrhMechanism::new(data, part.clone())?.traversal_hyperplanes(data)
}

pub fn fit_grh(data: &DataSet, part: &AgentPartition) -> Result<GrhResult> {
    GrhMechanism::new(data, part.clone())?.fit(data)
}

/// Checks that `S` and `S′` lie on opposite sides of a vertical line.
pub fn require_line_separable(data: &DataSet, s: &[usize], s_prime: &[usize]) -> Result<()> {
    data.require_dim(1)?;
    let range = |set: &[usize]| {
        set.iter().map(|&i| data.x(i)[0]).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    };
    let (a_lo, a_hi) = range(s);
    let (b_lo, b_hi) = range(s_prime);
    if a_hi < b_lo || b_hi < a_lo {
        Ok(())
    } else {
        Err(Error::NotSeparable)
    }
}

pub fn fit_grl(data: &DataSet, s: &[usize], s_prime: &[usize], k: usize, k_prime: usize) -> Result<Hyperplane> {
    data.require_dim(1)?;
    let part = AgentPartition::new(vec![s.to_vec(), s_prime.to_vec()], vec![k, k_prime])?;
    part.validate(data.n())?;
    require_line_separable(data, s, s_prime)?;
    Ok(fit_grh(data, &part)?.hyperplane)
}

/// GRL outputs for every rank pair `(k, k′)`, in lexicographic order.
pub fn grl_all_ranks(data: &DataSet, s: &[usize], s_prime: &[usize]) -> Result<Vec<((usize, usize), Hyperplane)>> {
    require_line_separable(data, s, s_prime)?;
    let mech = GrhMechanism::new(data, AgentPartition::new(vec![s.to_vec(), s_prime.to_vec()], vec![1, 1])?)?;
    let mut out = Vec::new();
    for k in 1..=s.len() {
        for kp in 1..=s_prime.len() {
            let m = GrhMechanism { part: AgentPartition { sets: mech.part.sets.clone(), ranks: vec![k, kp] }, ..mech.clone() };
            out.push(((k, kp), m.fit(data)?.hyperplane));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetScheme {
    /// Left and right halves.
    BrownMood,
    /// Left and right thirds; the middle third is ignored.
    Tukey,
}

pub fn preset_partition(data: &DataSet, scheme: PresetScheme, side: MedianSide) -> Result<AgentPartition> {
    data.require_dim(1)?;
    require_admissible(data)?;
    let n = data.n();
    let order = sorted_by_x(data);
    let (left, right) = match scheme {
        PresetScheme::BrownMood => {
            if n < 2 {
                return Err(Error::InvalidInput("Brown-Mood needs n ≥ 2".into()));
            }
            (order[..n / 2].to_vec(), order[n / 2..].to_vec())
        }
        PresetScheme::Tukey => {
            if n < 3 {
                return Err(Error::InvalidInput("Tukey needs n ≥ 3".into()));
            }
            let third = n.div_ceil(3);
            (order[..third].to_vec(), order[n - third..].to_vec())
        }
    };
    AgentPartition::with_median_ranks(vec![left, right], side)
}
