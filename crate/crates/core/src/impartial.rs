//! Impartial mechanisms: every agent's outcome ignores her own report.
//!
//! The family is `β₁ = Σ_i g_i(y_i)`, `β₀ = c − Σ_i ⟨g_i(y_i), x_i⟩`, so that
//! `ŷ_j = c + Σ_{i≠j} ⟨g_i(y_i), x_j − x_i⟩`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{median_with_side, DataSet, ExtReal, Hyperplane, MedianSide};

/// A map `R → R^d`, restricted to serializable shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ImpartialFn {
    /// `y ↦ a·y + b`.
    Affine { a: Vec<f64>, b: Vec<f64> },
    /// Linear interpolation through `(breakpoints[k], values[k])`, constant
    /// beyond the first and last breakpoint.
    PiecewiseLinear { breakpoints: Vec<f64>, values: Vec<Vec<f64>> },
}

impl ImpartialFn {
    pub fn zero(d: usize) -> Self {
        ImpartialFn::Affine { a: vec![0.0; d], b: vec![0.0; d] }
    }

    pub fn dim(&self) -> usize {
        match self {
            ImpartialFn::Affine { a, .. } => a.len(),
            ImpartialFn::PiecewiseLinear { values, .. } => values.first().map_or(0, |v| v.len()),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            ImpartialFn::Affine { a, .. } => a.iter().all(|v| *v == 0.0),
            ImpartialFn::PiecewiseLinear { values, .. } => values.windows(2).all(|w| w[0] == w[1]),
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        match self {
            ImpartialFn::Affine { a, b } => {
                if a.len() != d || b.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: if a.len() != d { a.len() } else { b.len() } });
                }
                if a.iter().chain(b).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("non-finite impartial coefficient".into()));
                }
            }
            ImpartialFn::PiecewiseLinear { breakpoints, values } => {
                if breakpoints.is_empty() || breakpoints.len() != values.len() {
                    return Err(Error::InvalidInput("piecewise-linear table needs one value per breakpoint".into()));
                }
                if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
                }
                if let Some(v) = values.iter().find(|v| v.len() != d) {
                    return Err(Error::DimensionMismatch { expected: d, found: v.len() });
                }
                if breakpoints.iter().chain(values.iter().flatten()).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("non-finite piecewise-linear entry".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, y: f64) -> Vec<f64> {
        match self {
            ImpartialFn::Affine { a, b } => a.iter().zip(b).map(|(a, b)| a * y + b).collect(),
            ImpartialFn::PiecewiseLinear { breakpoints, values } => {
                let last = breakpoints.len() - 1;
                if y <= breakpoints[0] {
                    return values[0].clone();
                }
                if y >= breakpoints[last] {
                    return values[last].clone();
                }
                let k = breakpoints.partition_point(|b| *b <= y) - 1;
                let t = (y - breakpoints[k]) / (breakpoints[k + 1] - breakpoints[k]);
                values[k].iter().zip(&values[k + 1]).map(|(u, v)| u + t * (v - u)).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpartialConfig {
    pub g: Vec<ImpartialFn>,
    #[serde(default)]
    pub c: f64,
}

impl ImpartialConfig {
    /// The constant mechanism `y = c`.
    pub fn constant(n: usize, d: usize, c: f64) -> Self {
        Self { g: vec![ImpartialFn::zero(d); n], c }
    }

    /// Two agents on a line, each receiving the other's report as outcome.
    pub fn swap(x1: f64, x2: f64) -> Result<Self> {
        if x1 == x2 {
            return Err(Error::Inadmissible(0, 1));
        }
        let s = 1.0 / (x2 - x1);
        Ok(Self {
            g: vec![ImpartialFn::Affine { a: vec![s], b: vec![0.0] }, ImpartialFn::Affine { a: vec![-s], b: vec![0.0] }],
            c: 0.0,
        })
    }

    pub fn is_constant(&self) -> bool {
        self.g.iter().all(ImpartialFn::is_constant)
    }

    pub fn validate(&self, n: usize, d: usize) -> Result<()> {
        if self.g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.g.len() });
        }
        if !self.c.is_finite() {
            return Err(Error::InvalidInput("non-finite constant".into()));
        }
        self.g.iter().try_for_each(|g| g.validate(d))
    }
}

pub fn fit_impartial(data: &DataSet, cfg: &ImpartialConfig) -> Result<Hyperplane> {
    let d = data.dim();
    cfg.validate(data.n(), d)?;
    let mut beta1 = vec![0.0; d];
    let mut beta0 = cfg.c;
    for (i, g) in cfg.g.iter().enumerate() {
        let v = g.eval(data.y(i));
        let x = data.x(i);
        for j in 0..d {
            beta1[j] += v[j];
            beta0 -= v[j] * x[j];
        }
    }
    Ok(Hyperplane::new(beta1, beta0))
}

/// Median of `n` reports and `n + 1` phantoms (an odd count, so side-free).
pub fn generalized_median(values: &[f64], phantoms: &[ExtReal]) -> Result<ExtReal> {
    if phantoms.len() != values.len() + 1 {
        return Err(Error::DimensionMismatch { expected: values.len() + 1, found: phantoms.len() });
    }
    let mut all: Vec<ExtReal> = values.iter().map(|v| ExtReal::Finite(*v)).collect();
    all.extend_from_slice(phantoms);
    median_with_side(&all, MedianSide::Left)
}
