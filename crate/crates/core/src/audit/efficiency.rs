//! Efficiency ratios against OLS and the two-approximation lower-bound instance.

use serde::{Deserialize, Serialize};

use super::MechanismSpec;
use crate::erm::fit_ols;
use crate::error::{Error, Result};
use crate::linalg::constrained_lstsq;
use crate::model::{rss, DataSet, ExtReal, Hyperplane};

/// `rss(mech) / rss(OLS)`: 1 when both vanish, `+∞` when only OLS does.
pub fn efficiency_ratio(mech: &MechanismSpec, data: &DataSet) -> Result<ExtReal> {
    let ours = rss(data, &mech.fit(data)?)?;
    let best = rss(data, &fit_ols(data))?;
    let zero = 1e-18 * (1.0 + data.ys().iter().map(|y| y * y).sum::<f64>());
    Ok(match (best <= zero, ours <= zero) {
        (true, true) => ExtReal::Finite(1.0),
        (true, false) => ExtReal::PosInf,
        _ => ExtReal::Finite(ours / best),
    })
}

fn t_value(n: f64, x: f64) -> f64 {
    (n * n * n - n) / (2.0 * (1.0 + 3.0 * n + 2.0 * n * n + 6.0 * x * x - 6.0 * x * n - 6.0 * x))
}

/// The larger root of `6X² − 6(n+1)X + (1 + 3n + 2n²) − (n³ − n)/2`.
pub fn lowerbound_root(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("lower-bound instance needs n ≥ 3, got {n}")));
    }
    let n = n as f64;
    let b = -6.0 * (n + 1.0);
    let c = 1.0 + 3.0 * n + 2.0 * n * n - (n * n * n - n) / 2.0;
    Ok((-b + (b * b - 24.0 * c).sqrt()) / 12.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundDiagnostics {
    pub n: usize,
    pub x: f64,
    /// Should be 1.
    pub t: f64,
    pub y: f64,
    /// OLS risk with `y_{n+1} = y`.
    pub f0: f64,
    pub f0_expected: f64,
    pub h: f64,
    /// Least risk over lines through `(X, h)` with `y_{n+1} = h`.
    pub f1: f64,
    pub f1_expected: f64,
    /// `f1 / f0(h)`, which should be 2.
    pub ratio: f64,
}

fn instance(n: usize, x: f64, y: f64) -> Result<DataSet> {
    let mut pts: Vec<(f64, f64)> = (1..=n).map(|i| (i as f64, 0.0)).collect();
    pts.push((x, y));
    DataSet::from_points(&pts)
}

pub fn lowerbound_diagnostics(n: usize, y: f64, h: f64) -> Result<LowerBoundDiagnostics> {
    let x = lowerbound_root(n)?;
    let data = instance(n, x, y)?;
    let f0 = rss(&data, &fit_ols(&data))?;

    let at_h = instance(n, x, h)?;
    let a: Vec<f64> = (0..at_h.n()).flat_map(|i| at_h.x_bar(i)).collect();
    let beta = constrained_lstsq(&a, 2, at_h.ys(), &[x, 1.0], h).ok_or(Error::NoSolution)?;
    let f1 = rss(&at_h, &Hyperplane::from_coefficients(&beta))?;
    let f0_h = rss(&at_h, &fit_ols(&at_h))?;
    Ok(LowerBoundDiagnostics {
        n,
        x,
        t: t_value(n as f64, x),
        y,
        f0,
        f0_expected: y * y / 2.0,
        h,
        f1,
        f1_expected: h * h,
        ratio: f1 / f0_h,
    })
}

/// `n` agents at `x = 1..n` reporting 0 and one at `X` reporting 1.
pub fn lowerbound_instance(n: usize) -> Result<(DataSet, LowerBoundDiagnostics)> {
    let diag = lowerbound_diagnostics(n, 1.0, 1.0)?;
    Ok((instance(n, diag.x, 1.0)?, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::Mechanism;
    use crate::erm::L1Config;
    use crate::impartial::ImpartialConfig;

    #[test]
    fn root_for_three() {
        let x = lowerbound_root(3).unwrap();
        assert!((x - (24.0 + 192f64.sqrt()) / 12.0).abs() < 1e-12);
        assert!((x - 3.154701).abs() < 1e-6);
        assert!(lowerbound_root(2).is_err());
    }

    #[test]
    fn instance_arithmetic() {
        for n in 3..=10 {
            let (data, d) = lowerbound_instance(n).unwrap();
            assert_eq!(data.n(), n + 1);
            assert!((d.t - 1.0).abs() <= 1e-9, "n={n} t={}", d.t);
            assert!((d.f0 - 0.5).abs() <= 1e-9 * 0.5);
            assert!((d.f1 - 1.0).abs() <= 1e-6);
            assert!((d.ratio - 2.0).abs() <= 1e-5);
        }
        let d = lowerbound_diagnostics(4, 3.0, 2.5).unwrap();
        assert!((d.f0 - 4.5).abs() < 1e-9 && (d.f1 - 6.25).abs() < 1e-6);
    }

    #[test]
    fn larger_root_grows_like_n_to_one_and_a_half() {
        let r: Vec<f64> = [100, 400].iter().map(|&n| lowerbound_root(n).unwrap() / (n as f64).powf(1.5)).collect();
        assert!((r[0] / r[1] - 1.0).abs() < 0.2);
    }

    #[test]
    fn ratios() {
        let data = DataSet::from_points(&[(0.0, 1.0), (1.0, 3.0), (2.0, 2.0), (3.0, 7.0)]).unwrap();
        assert_eq!(efficiency_ratio(&MechanismSpec::new(Mechanism::Ols), &data).unwrap(), ExtReal::Finite(1.0));
        let r = efficiency_ratio(&MechanismSpec::new(Mechanism::L1Erm(L1Config::default())), &data).unwrap();
        assert!(r >= ExtReal::Finite(1.0) && r <= ExtReal::Finite(4.0));
        let line = DataSet::from_points(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        let constant = MechanismSpec::new(Mechanism::Impartial(ImpartialConfig::constant(3, 1, 0.0)));
        assert_eq!(efficiency_ratio(&constant, &line).unwrap(), ExtReal::PosInf);
        let flat = DataSet::from_points(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        let constant = MechanismSpec::new(Mechanism::Impartial(ImpartialConfig::constant(2, 1, 0.0)));
        assert_eq!(efficiency_ratio(&constant, &flat).unwrap(), ExtReal::Finite(1.0));
    }
}
