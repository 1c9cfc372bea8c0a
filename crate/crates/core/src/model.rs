//! Data model shared by every mechanism: data sets, hyperplanes, residuals,
//! order statistics and the extended real line used for phantoms.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `n` agents, each with a public vector `x_i ∈ R^d` and a private report `y_i`.
///
/// Coordinates are stored row-major in one buffer; `d = 0` is allowed and
/// models the single-dimensional (facility location) setting.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    dim: usize,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl DataSet {
    pub fn new(xs: Vec<Vec<f64>>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch { expected: ys.len(), found: xs.len() });
        }
        if ys.is_empty() {
            return Err(Error::InvalidInput("a data set needs at least one agent".into()));
        }
        let dim = xs[0].len();
        let mut flat = Vec::with_capacity(dim * xs.len());
        for x in &xs {
            if x.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: x.len() });
            }
            flat.extend_from_slice(x);
        }
        Self::from_flat(dim, flat, ys)
    }

    /// Builds a data set from a row-major coordinate buffer.
    pub fn from_flat(dim: usize, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if ys.is_empty() {
            return Err(Error::InvalidInput("a data set needs at least one agent".into()));
        }
        if xs.len() != dim * ys.len() {
            return Err(Error::DimensionMismatch { expected: dim * ys.len(), found: xs.len() });
        }
        if let Some(v) = xs.iter().chain(ys.iter()).find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite entry {v}")));
        }
        Ok(Self { dim, xs, ys })
    }

    /// Simple linear regression data (`d = 1`).
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        let xs = points.iter().map(|p| p.0).collect();
        let ys = points.iter().map(|p| p.1).collect();
        Self::from_flat(1, xs, ys)
    }

    /// Single-dimensional data (`d = 0`): only the reports.
    pub fn scalar(ys: Vec<f64>) -> Result<Self> {
        Self::from_flat(0, Vec::new(), ys)
    }

    pub fn n(&self) -> usize {
        self.ys.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.xs[i * self.dim..(i + 1) * self.dim]
    }

    /// The augmented vector `(x_i, 1)`.
    pub fn x_bar(&self, i: usize) -> Vec<f64> {
        let mut v = self.x(i).to_vec();
        v.push(1.0);
        v
    }

    pub fn y(&self, i: usize) -> f64 {
        self.ys[i]
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn xs_flat(&self) -> &[f64] {
        &self.xs
    }

    pub fn xs(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| self.x(i).to_vec()).collect()
    }

    /// Same public information, different reports.
    pub fn with_ys(&self, ys: Vec<f64>) -> Result<Self> {
        if ys.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: ys.len() });
        }
        Self::from_flat(self.dim, self.xs.clone(), ys)
    }

    /// Same data with agent `i` reporting `y` instead.
    pub fn with_report(&self, i: usize, y: f64) -> Result<Self> {
        self.check_index(i)?;
        let mut ys = self.ys.clone();
        ys[i] = y;
        self.with_ys(ys)
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange { index: i, len: self.n() });
        }
        Ok(())
    }

    pub fn max_abs_y(&self) -> f64 {
        self.ys.iter().fold(0.0_f64, |m, y| m.max(y.abs()))
    }

    pub(crate) fn require_dim(&self, d: usize) -> Result<()> {
        if self.dim != d {
            return Err(Error::DimensionMismatch { expected: d, found: self.dim });
        }
        Ok(())
    }
}

/// The hyperplane `ŷ = β₁·x + β₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub beta1: Vec<f64>,
    pub beta0: f64,
}

impl Hyperplane {
    pub fn new(beta1: Vec<f64>, beta0: f64) -> Self {
        Self { beta1, beta0 }
    }

    /// A line `y = slope·x + intercept`.
    pub fn line(slope: f64, intercept: f64) -> Self {
        Self { beta1: vec![slope], beta0: intercept }
    }

    /// The constant hyperplane `y = c` in `R^d`.
    pub fn constant(dim: usize, c: f64) -> Self {
        Self { beta1: vec![0.0; dim], beta0: c }
    }

    /// Builds from the stacked coefficient vector `(β₁, β₀)`.
    pub fn from_coefficients(coef: &[f64]) -> Self {
        let (b1, b0) = coef.split_at(coef.len() - 1);
        Self { beta1: b1.to_vec(), beta0: b0[0] }
    }

    pub fn coefficients(&self) -> Vec<f64> {
        let mut v = self.beta1.clone();
        v.push(self.beta0);
        v
    }

    pub fn dim(&self) -> usize {
        self.beta1.len()
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(self.eval(x))
    }

    /// Unchecked prediction; `x` should have length `dim()`.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.beta1.iter().zip(x).map(|(b, v)| b * v).sum::<f64>() + self.beta0
    }

    /// Coefficientwise comparison with absolute tolerance.
    pub fn approx_eq(&self, other: &Hyperplane, tol: f64) -> bool {
        self.dim() == other.dim()
            && (self.beta0 - other.beta0).abs() <= tol
            && self.beta1.iter().zip(&other.beta1).all(|(a, b)| (a - b).abs() <= tol)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.beta1.iter().fold(self.beta0.abs(), |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.beta0.is_finite() && self.beta1.iter().all(|v| v.is_finite())
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y =")?;
        for (j, b) in self.beta1.iter().enumerate() {
            write!(f, " {:+}·x{}", b + 0.0, j + 1)?;
        }
        write!(f, " {:+}", self.beta0 + 0.0)
    }
}

/// Which middle element an even-length median returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MedianSide {
    #[default]
    Left,
    Right,
}

impl MedianSide {
    /// 1-based rank of the median among `len` values.
    pub fn rank(self, len: usize) -> usize {
        if len % 2 == 1 {
            (len + 1) / 2
        } else {
            match self {
                MedianSide::Left => len / 2,
                MedianSide::Right => len / 2 + 1,
            }
        }
    }
}

/// Per-agent predictions and residuals under a hyperplane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeRecord {
    pub predictions: Vec<f64>,
    pub residuals: Vec<f64>,
}

pub fn predict(h: &Hyperplane, x: &[f64]) -> Result<f64> {
    h.predict(x)
}

pub fn outcomes(h: &Hyperplane, data: &DataSet) -> Result<OutcomeRecord> {
    data.require_dim(h.dim())?;
    let predictions: Vec<f64> = (0..data.n()).map(|i| h.eval(data.x(i))).collect();
    let residuals = predictions.iter().zip(data.ys()).map(|(p, y)| y - p).collect();
    Ok(OutcomeRecord { predictions, residuals })
}

/// Residual sum of squares.
pub fn rss(data: &DataSet, h: &Hyperplane) -> Result<f64> {
    data.require_dim(h.dim())?;
    Ok((0..data.n())
        .map(|i| {
            let r = data.y(i) - h.eval(data.x(i));
            r * r
        })
        .sum())
}

/// A point of `R ∪ {−∞, +∞}`. Only ordering is defined; there is no arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// Maps `±∞` floats to the infinite variants.
    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else if v == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(v)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    fn rank(self) -> u8 {
        match self {
            ExtReal::NegInf => 0,
            ExtReal::Finite(_) => 1,
            ExtReal::PosInf => 2,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::from_f64(v)
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.total_cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

// JSON has no infinities: finite values serialize as numbers, the others as "-inf" / "inf".
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::NegInf => s.serialize_str("-inf"),
            ExtReal::PosInf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtReal::Finite(v)),
            Raw::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "-inf" | "-infinity" => Ok(ExtReal::NegInf),
                "inf" | "+inf" | "infinity" => Ok(ExtReal::PosInf),
                other => other
                    .parse::<f64>()
                    .map(ExtReal::from_f64)
                    .map_err(|_| serde::de::Error::custom(format!("not an extended real: {t}"))),
            },
        }
    }
}

/// Values with an exact total order (no tolerance).
pub trait TotalOrder: Copy {
    fn total(&self, other: &Self) -> Ordering;
}

impl TotalOrder for f64 {
    fn total(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

impl TotalOrder for ExtReal {
    fn total(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

/// The `j`-th smallest value (1-based), counting multiplicity.
pub fn order_statistic<T: TotalOrder>(values: &[T], j: usize) -> Result<T> {
    if values.is_empty() {
        return Err(Error::InvalidInput("order statistic of an empty list".into()));
    }
    if j == 0 || j > values.len() {
        return Err(Error::IndexOutOfRange { index: j, len: values.len() });
    }
    let mut v = values.to_vec();
    let (_, nth, _) = v.select_nth_unstable_by(j - 1, |a, b| a.total(b));
    Ok(*nth)
}

/// Median with an explicit choice of left/right middle for even lengths.
pub fn median_with_side<T: TotalOrder>(values: &[T], side: MedianSide) -> Result<T> {
    if values.is_empty() {
        return Err(Error::InvalidInput("median of an empty list".into()));
    }
    order_statistic(values, side.rank(values.len()))
}
