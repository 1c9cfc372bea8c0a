//! Influence bounds of traversal mechanisms.

use serde::{Deserialize, Serialize};

use super::search::crossing_points;
use super::{MechanismSpec, PreparedMechanism};
use crate::error::{Error, Result};
use crate::model::{median_with_side, DataSet, ExtReal, MedianSide};

/// The interval `[lower, upper]` over which an agent's report moves her own
/// outcome: `ŷ_i = med(y_i, lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfluenceBounds {
    pub lower: ExtReal,
    pub upper: ExtReal,
}

impl InfluenceBounds {
    /// The outcome the bounds predict for report `y`.
    pub fn outcome(&self, y: f64) -> f64 {
        match median_with_side(&[ExtReal::Finite(y), self.lower, self.upper], MedianSide::Left) {
            Ok(ExtReal::Finite(v)) => v,
            _ => y,
        }
    }
}

pub fn influence_bounds(mech: &MechanismSpec, data: &DataSet, agent: usize) -> Result<InfluenceBounds> {
    influence_bounds_with(&mech.prepare(data)?, data, agent)
}

/// Probes the agent's report just below and just above every crossing point
/// (predictions of hyperplanes through `d + 1` other agents). An outcome that
/// tracks the probe means the bound is infinite on that side.
pub fn influence_bounds_with(mech: &PreparedMechanism, data: &DataSet, agent: usize) -> Result<InfluenceBounds> {
    data.check_index(agent)?;
    if !mech.traversal_flag() {
        return Err(Error::Unsupported(
            mech.spec().mechanism.name().into(),
            "influence bounds need a mechanism that passes through d + 1 data points".into(),
        ));
    }
    let needed = data.dim() + 1;
    let others = data.n() - 1;
    let mut z = if others >= needed {
        crossing_points(data, agent)?
    } else if mech.is_impartial() {
        Vec::new()
    } else {
        return Err(Error::NotEnoughAgents { needed, found: others });
    };
    if z.is_empty() {
        z.push(mech.fit(data)?.eval(data.x(agent)));
    }
    let lo = z.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = z.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let probe = |p: f64, inf: ExtReal| -> Result<ExtReal> {
        let v = mech.outcome_for(&data.with_report(agent, p)?, agent)?;
        Ok(if (v - p).abs() <= 1e-9 * (1.0 + p.abs()) { inf } else { ExtReal::Finite(v) })
    };
    Ok(InfluenceBounds { lower: probe(lo, ExtReal::NegInf)?, upper: probe(hi, ExtReal::PosInf)? })
}
