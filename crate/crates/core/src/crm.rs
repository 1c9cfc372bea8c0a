//! Clockwise repeated median (CRM) lines for simple linear regression.
//!
//! Each agent `i ∈ S` takes the median clockwise angle towards the agents of
//! `S′ \ {i}`; the median of those medians is the directing angle. The agent
//! realizing it (the directing point) and the agent realizing its inner
//! median (the directed point) determine the slope.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{median_with_side, DataSet, Hyperplane, MedianSide};
use crate::separability::require_admissible;

/// How the intercept is chosen once the slope is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterceptRule {
    /// The line passes through the directing point and its directed point.
    #[default]
    DirectingPair,
    /// Median over `S` of `y_i − β₁·x_i`, using `intercept_side`.
    MedianIntercept,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrmConfig {
    #[serde(alias = "S")]
    pub s: Vec<usize>,
    #[serde(alias = "Sprime")]
    pub s_prime: Vec<usize>,
    #[serde(default)]
    pub outer_side: MedianSide,
    #[serde(default)]
    pub inner_side: MedianSide,
    #[serde(default)]
    pub intercept_side: MedianSide,
    #[serde(default)]
    pub intercept_rule: InterceptRule,
}

impl CrmConfig {
    pub fn new(s: Vec<usize>, s_prime: Vec<usize>) -> Self {
        Self {
            s,
            s_prime,
            outer_side: MedianSide::Left,
            inner_side: MedianSide::Left,
            intercept_side: MedianSide::Left,
            intercept_rule: InterceptRule::DirectingPair,
        }
    }

    /// `S = S′ = N`.
    pub fn full(n: usize) -> Self {
        Self::new((0..n).collect(), (0..n).collect())
    }

    pub fn with_sides(mut self, outer: MedianSide, inner: MedianSide, intercept: MedianSide) -> Self {
        self.outer_side = outer;
        self.inner_side = inner;
        self.intercept_side = intercept;
        self
    }

    pub fn with_intercept_rule(mut self, rule: InterceptRule) -> Self {
        self.intercept_rule = rule;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.s.is_empty() || self.s_prime.is_empty() {
            return Err(Error::InvalidInput("S and S′ must be nonempty".into()));
        }
        for &i in self.s.iter().chain(&self.s_prime) {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
        }
        if let Some(&i) = self.s.iter().find(|&&i| self.s_prime.iter().all(|&j| j == i)) {
            return Err(Error::InvalidInput(format!("S′ \\ {{{i}}} is empty")));
        }
        Ok(())
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Clockwise angle from `p_i` to `p_j`, in `[0, 2π)`.
pub fn cwa(p_i: (f64, f64), p_j: (f64, f64)) -> Result<f64> {
    let dx = p_j.0 - p_i.0;
    if dx == 0.0 {
        return Err(Error::InvalidInput(format!("cwa undefined for equal x-coordinates ({})", p_i.0)));
    }
    let s = (p_j.1 - p_i.1) / dx;
    Ok(PI + sign(dx) * FRAC_PI_2 + sign(s) * s.atan().abs())
}

/// Slope encoded by an angle, as in the closed form `tan(DA − π − (π/2)·sign(DA − π))`.
pub fn slope_from_angle(angle: f64) -> f64 {
    (angle - PI - FRAC_PI_2 * sign(angle - PI)).tan()
}

/// The directing angle together with the agents realizing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Directing {
    pub angle: f64,
    /// Directing point (in `S`).
    pub from: usize,
    /// Directed point (in `S′ \ {from}`).
    pub to: usize,
}

fn point(data: &DataSet, i: usize) -> (f64, f64) {
    (data.x(i)[0], data.y(i))
}

/// Median of `(angle, index)` pairs; ties on angle resolved by smaller index.
fn median_pair(mut v: Vec<(f64, usize, usize)>, side: MedianSide) -> (f64, usize, usize) {
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    v[side.rank(v.len()) - 1]
}

pub fn directing(data: &DataSet, cfg: &CrmConfig) -> Result<Directing> {
    data.require_dim(1)?;
    cfg.validate(data.n())?;
    require_admissible(data)?;
    let mut outer = Vec::with_capacity(cfg.s.len());
    for &i in &cfg.s {
        let mut inner = Vec::with_capacity(cfg.s_prime.len());
        for &j in cfg.s_prime.iter().filter(|&&j| j != i) {
            inner.push((cwa(point(data, i), point(data, j))?, j, j));
        }
        let (angle, j, _) = median_pair(inner, cfg.inner_side);
        outer.push((angle, i, j));
    }
    let (angle, from, to) = median_pair(outer, cfg.outer_side);
    Ok(Directing { angle, from, to })
}

pub fn directing_angle(data: &DataSet, cfg: &CrmConfig) -> Result<f64> {
    Ok(directing(data, cfg)?.angle)
}

pub fn fit_crm(data: &DataSet, cfg: &CrmConfig) -> Result<Hyperplane> {
    let dir = directing(data, cfg)?;
    let (xi, yi) = point(data, dir.from);
    let (xj, yj) = point(data, dir.to);
    let slope = (yj - yi) / (xj - xi);
    let intercept = match cfg.intercept_rule {
        InterceptRule::DirectingPair => yi - slope * xi,
        InterceptRule::MedianIntercept => {
            let icpts: Vec<f64> = cfg.s.iter().map(|&k| data.y(k) - slope * data.x(k)[0]).collect();
            median_with_side(&icpts, cfg.intercept_side)?
        }
    };
    Ok(Hyperplane::line(slope, intercept))
}
