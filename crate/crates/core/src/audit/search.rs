//! Searching for profitable misreports by single agents and coalitions.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MechanismSpec, PreparedMechanism};
use crate::error::{Error, Result};
use crate::linalg::solve_square;
use crate::model::DataSet;

/// Residual improvements at or below this are ignored.
pub const STRICT_MARGIN: f64 = 1e-9;

/// How an agent compares outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreferenceModel {
    /// Compare `|y_i − ŷ_i|`: strictly better means more than 1e-9 closer
    /// to the true value, on either side.
    #[default]
    Residual,
    /// Better for some single-peaked preference: also counts any outcome
    /// that moved strictly to the other side of the true value. Certificates
    /// under this model may have `after > before`.
    AnySinglePeaked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Change {
    Worse,
    Weak,
    Strict,
}

impl PreferenceModel {
    fn classify(self, before: f64, after: f64) -> Change {
        if self == PreferenceModel::AnySinglePeaked && crossed(before, after) {
            return Change::Strict;
        }
        if after.abs() < before.abs() - STRICT_MARGIN {
            Change::Strict
        } else if after.abs() <= before.abs() + STRICT_MARGIN {
            Change::Weak
        } else {
            Change::Worse
        }
    }
}

fn crossed(before: f64, after: f64) -> bool {
    before.abs() > STRICT_MARGIN && after.abs() > STRICT_MARGIN && before.signum() != after.signum()
}

/// A concrete manipulation: the coalition's misreports and every member's true
/// residual before and after.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationCertificate {
    pub coalition: Vec<usize>,
    pub misreports: BTreeMap<usize, f64>,
    /// `|y_i − ŷ_i|` under truthful reports, per coalition member.
    pub before: Vec<f64>,
    /// `|y_i − ŷ_i|` under the misreports.
    pub after: Vec<f64>,
    /// Whether the member's outcome moved to the other side of her report.
    pub crossed: Vec<bool>,
    pub preference: PreferenceModel,
}

impl ViolationCertificate {
    /// Reruns the mechanism and checks the recorded residuals (to 1e-12) and
    /// the violation condition.
    pub fn replay(&self, mech: &PreparedMechanism, data: &DataSet) -> Result<bool> {
        let truthful = mech.fit(data)?;
        let mut ys = data.ys().to_vec();
        for (&i, &v) in &self.misreports {
            data.check_index(i)?;
            ys[i] = v;
        }
        let lied = mech.fit(&data.with_ys(ys)?)?;
        let mut changes = Vec::new();
        for (k, &i) in self.coalition.iter().enumerate() {
            let b = data.y(i) - truthful.eval(data.x(i));
            let a = data.y(i) - lied.eval(data.x(i));
            if (b.abs() - self.before[k]).abs() > 1e-12 || (a.abs() - self.after[k]).abs() > 1e-12 {
                return Ok(false);
            }
            changes.push(self.preference.classify(b, a));
        }
        Ok(is_violation(&changes))
    }
}

fn is_violation(changes: &[Change]) -> bool {
    changes.iter().all(|c| *c != Change::Worse) && changes.iter().any(|c| *c == Change::Strict)
}

/// Predictions at `x_agent` of every hyperplane through `d + 1` other agents.
pub fn crossing_points(data: &DataSet, agent: usize) -> Result<Vec<f64>> {
    data.check_index(agent)?;
    let m = data.dim() + 1;
    let others: Vec<usize> = (0..data.n()).filter(|&j| j != agent).collect();
    let mut out = Vec::new();
    if others.len() < m {
        return Ok(out);
    }
    let mut idx: Vec<usize> = (0..m).collect();
    let xa = data.x_bar(agent);
    loop {
        let a: Vec<f64> = idx.iter().flat_map(|&k| data.x_bar(others[k])).collect();
        let t: Vec<f64> = idx.iter().map(|&k| data.y(others[k])).collect();
        if let Some(beta) = solve_square(&a, &t) {
            out.push(beta.iter().zip(&xa).map(|(b, x)| b * x).sum());
        }
        // next combination
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if idx[i] < others.len() - m + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// A 41-point grid over `[min y − range, max y + range]`, small moves of the
/// agent's own report (±0.1% and ±10% of the range), then the crossing
/// points, without duplicates.
pub fn default_candidates(data: &DataSet, agent: usize) -> Result<Vec<f64>> {
    data.check_index(agent)?;
    let lo = data.ys().iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.ys().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = if hi > lo { hi - lo } else { 1.0 };
    let (a, b) = (lo - range, hi + range);
    let mut out: Vec<f64> = (0..41).map(|k| a + (b - a) * k as f64 / 40.0).collect();
    let y = data.y(agent);
    out.extend([1e-3, -1e-3, 0.1, -0.1].iter().map(|f| y + f * range));
    out.extend(crossing_points(data, agent)?);
    let mut seen = std::collections::HashSet::new();
    out.retain(|v| seen.insert(v.to_bits()));
    Ok(out)
}

pub fn audit_sp(mech: &MechanismSpec, data: &DataSet, agent: usize, candidates: &[f64]) -> Result<Option<ViolationCertificate>> {
    audit_sp_with(&mech.prepare(data)?, data, agent, candidates, PreferenceModel::default())
}

/// First candidate (in order) that makes `agent` strictly better off.
pub fn audit_sp_with(
    mech: &PreparedMechanism,
    data: &DataSet,
    agent: usize,
    candidates: &[f64],
    preference: PreferenceModel,
) -> Result<Option<ViolationCertificate>> {
    data.check_index(agent)?;
    if candidates.is_empty() {
        return Err(Error::InvalidInput("no candidate misreports".into()));
    }
    let truthful = mech.fit(data)?;
    let y = data.y(agent);
    let before = y - truthful.eval(data.x(agent));
    for &c in candidates {
        let after = y - mech.fit_unchecked(&data.with_report(agent, c)?)?.eval(data.x(agent));
        if preference.classify(before, after) == Change::Strict {
            return Ok(Some(ViolationCertificate {
                coalition: vec![agent],
                misreports: BTreeMap::from([(agent, c)]),
                before: vec![before.abs()],
                after: vec![after.abs()],
                crossed: vec![crossed(before, after)],
                preference,
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GspOptions {
    pub max_coalition: usize,
    /// Candidates per member (truthful report included) for coalitions of
    /// two or more; single agents use their full candidate list.
    pub candidates_per_agent: usize,
    pub seed: u64,
    pub preference: PreferenceModel,
    /// All coalitions are enumerated up to this many agents.
    pub exhaustive_limit: usize,
    /// Coalitions sampled per size beyond the exhaustive limit.
    pub sampled_coalitions: usize,
}

impl GspOptions {
    pub fn new(max_coalition: usize, candidates_per_agent: usize, seed: u64) -> Self {
        Self {
            max_coalition,
            candidates_per_agent,
            seed,
            preference: PreferenceModel::default(),
            exhaustive_limit: 8,
            sampled_coalitions: 256,
        }
    }
}

pub fn audit_gsp(
    mech: &MechanismSpec,
    data: &DataSet,
    max_coalition: usize,
    candidates_per_agent: usize,
    seed: u64,
) -> Result<Option<ViolationCertificate>> {
    audit_gsp_with(&mech.prepare(data)?, data, &GspOptions::new(max_coalition, candidates_per_agent, seed))
}

fn combinations(n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn coalitions(n: usize, opts: &GspOptions) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for k in 1..=opts.max_coalition {
        if n <= opts.exhaustive_limit {
            combinations(n, k, &mut out);
        } else {
            let mut seen = std::collections::BTreeSet::new();
            for _ in 0..opts.sampled_coalitions {
                let mut c = sample(&mut rng, n, k).into_vec();
                c.sort_unstable();
                if seen.insert(c.clone()) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Searches coalitions by size, then lexicographically, for a joint
/// misreport leaving every member weakly better off and one strictly. The
/// result is the first certificate in that order, whatever the thread count.
pub fn audit_gsp_with(mech: &PreparedMechanism, data: &DataSet, opts: &GspOptions) -> Result<Option<ViolationCertificate>> {
    let n = data.n();
    if opts.max_coalition == 0 || opts.max_coalition > n {
        return Err(Error::InvalidInput(format!("max_coalition {} outside 1..={n}", opts.max_coalition)));
    }
    if opts.candidates_per_agent == 0 {
        return Err(Error::InvalidInput("candidates_per_agent must be positive".into()));
    }
    let truthful = mech.fit(data)?;
    let before: Vec<f64> = (0..n).map(|i| data.y(i) - truthful.eval(data.x(i))).collect();
    let lists: Vec<Vec<f64>> = (0..n).map(|i| default_candidates(data, i)).collect::<Result<_>>()?;
    let coals = coalitions(n, opts);

    let found = coals.par_iter().enumerate().find_map_first(|(ci, coal)| {
        let cands: Vec<Vec<f64>> = coal
            .iter()
            .map(|&i| {
                if coal.len() == 1 {
                    return lists[i].clone();
                }
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ ((ci as u64 + 1) << 20) ^ i as u64);
                let pool = &lists[i];
                let take = (opts.candidates_per_agent - 1).min(pool.len());
                let mut picks = sample(&mut rng, pool.len(), take).into_vec();
                picks.sort_unstable();
                std::iter::once(data.y(i)).chain(picks.into_iter().map(|p| pool[p])).collect()
            })
            .collect();
        search_coalition(mech, data, coal, &cands, &before, opts.preference).transpose()
    });
    found.transpose()
}

fn search_coalition(
    mech: &PreparedMechanism,
    data: &DataSet,
    coal: &[usize],
    cands: &[Vec<f64>],
    before: &[f64],
    preference: PreferenceModel,
) -> Result<Option<ViolationCertificate>> {
    let k = coal.len();
    let mut pos = vec![0usize; k];
    let mut ys = data.ys().to_vec();
    loop {
        let mut any_lie = false;
        for (m, &i) in coal.iter().enumerate() {
            ys[i] = cands[m][pos[m]];
            any_lie |= ys[i] != data.y(i);
        }
        if any_lie {
            let h = mech.fit_unchecked(&data.with_ys(ys.clone())?)?;
            let afters: Vec<f64> = coal.iter().map(|&i| data.y(i) - h.eval(data.x(i))).collect();
            let changes: Vec<Change> = coal.iter().zip(&afters).map(|(&i, &a)| preference.classify(before[i], a)).collect();
            if is_violation(&changes) {
                return Ok(Some(ViolationCertificate {
                    coalition: coal.to_vec(),
                    misreports: coal.iter().map(|&i| (i, ys[i])).collect(),
                    before: coal.iter().map(|&i| before[i].abs()).collect(),
                    after: afters.iter().map(|a| a.abs()).collect(),
                    crossed: coal.iter().zip(&afters).map(|(&i, &a)| crossed(before[i], a)).collect(),
                    preference,
                }));
            }
        }
        // odometer
        let mut m = k;
        loop {
            if m == 0 {
                return Ok(None);
            }
            m -= 1;
            pos[m] += 1;
            if pos[m] < cands[m].len() {
                break;
            }
            pos[m] = 0;
        }
    }
}
