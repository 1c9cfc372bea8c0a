//! Black-box manipulation audits and efficiency measurements.
//!
//! Audits are falsifiers: a returned certificate is a concrete, replayable
//! manipulation, but finding none over a finite candidate set proves nothing.

mod builtins;
mod efficiency;
mod influence;
pub mod random;
mod search;

pub use builtins::{builtin_instance, BuiltinInstance};
pub use efficiency::{efficiency_ratio, lowerbound_diagnostics, lowerbound_instance, lowerbound_root, LowerBoundDiagnostics};
pub use influence::{influence_bounds, influence_bounds_with, InfluenceBounds};
pub use search::{
    audit_gsp, audit_gsp_with, audit_sp, audit_sp_with, crossing_points, default_candidates, GspOptions, PreferenceModel,
    ViolationCertificate,
};

use serde::{Deserialize, Serialize};

use crate::crm::{fit_crm, CrmConfig};
use crate::erm::{fit_l1erm, fit_ols, fit_quantile, L1Config, QuantileConfig};
use crate::error::{Error, Result};
use crate::grh::{preset_partition, require_line_separable, GrhMechanism, PresetScheme};
use crate::impartial::{fit_impartial, generalized_median, ImpartialConfig};
use crate::model::{DataSet, ExtReal, Hyperplane, MedianSide};
use crate::separability::AgentPartition;

/// A regression mechanism and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mechanism {
    Ols,
    L1Erm(L1Config),
    Quantile(QuantileConfig),
    Crm(CrmConfig),
    Grl {
        #[serde(alias = "S")]
        s: Vec<usize>,
        #[serde(alias = "Sprime")]
        s_prime: Vec<usize>,
        k: usize,
        k_prime: usize,
    },
    Grh(AgentPartition),
    /// GRL on the left and right halves by x, with median ranks.
    BrownMood {
        #[serde(default)]
        side: MedianSide,
    },
    /// GRL on the left and right thirds by x, with median ranks.
    Tukey {
        #[serde(default)]
        side: MedianSide,
    },
    Impartial(ImpartialConfig),
    /// Two agents receiving each other's report (needs `n = 2`, `d = 1`).
    ImpartialSwap,
    /// Median of the reports and `n + 1` phantoms (`d = 0`).
    GeneralizedMedian { phantoms: Vec<ExtReal> },
}

impl Mechanism {
    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::Ols => "ols",
            Mechanism::L1Erm(_) => "l1-erm",
            Mechanism::Quantile(_) => "quantile",
            Mechanism::Crm(_) => "crm",
            Mechanism::Grl { .. } => "grl",
            Mechanism::Grh(_) => "grh",
            Mechanism::BrownMood { .. } => "brown-mood",
            Mechanism::Tukey { .. } => "tukey",
            Mechanism::Impartial(_) => "impartial",
            Mechanism::ImpartialSwap => "impartial-swap",
            Mechanism::GeneralizedMedian { .. } => "generalized-median",
        }
    }

    /// Whether the output is guaranteed to pass through `d + 1` data points.
    pub fn passes_through_data(&self) -> bool {
        matches!(
            self,
            Mechanism::Crm(_) | Mechanism::Grl { .. } | Mechanism::Grh(_) | Mechanism::BrownMood { .. } | Mechanism::Tukey { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismSpec {
    #[serde(flatten)]
    pub mechanism: Mechanism,
    /// Overrides the traversal property; only meaningful for impartial
    /// mechanisms with `n = d + 1`, which interpolate every point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traversal: Option<bool>,
}

impl From<Mechanism> for MechanismSpec {
    fn from(mechanism: Mechanism) -> Self {
        Self { mechanism, traversal: None }
    }
}

impl MechanismSpec {
    pub fn new(mechanism: Mechanism) -> Self {
        mechanism.into()
    }

    pub fn traversal_flag(&self) -> bool {
        self.traversal.unwrap_or_else(|| self.mechanism.passes_through_data())
    }

    /// Resolves data-dependent parameters and validates everything that
    /// depends only on the public `x`'s.
    pub fn prepare(&self, public: &DataSet) -> Result<PreparedMechanism> {
        let n = public.n();
        let d = public.dim();
        let inner = match &self.mechanism {
            Mechanism::Ols => Inner::Ols,
            Mechanism::L1Erm(c) => Inner::L1(c.clone()),
            Mechanism::Quantile(c) => {
                c.validate()?;
                Inner::Quantile(*c)
            }
            Mechanism::Crm(c) => {
                public.require_dim(1)?;
                c.validate(n)?;
                crate::separability::require_admissible(public)?;
                Inner::Crm(c.clone())
            }
            Mechanism::Grl { s, s_prime, k, k_prime } => {
                public.require_dim(1)?;
                let part = AgentPartition::new(vec![s.clone(), s_prime.clone()], vec![*k, *k_prime])?;
                part.validate(n)?;
                require_line_separable(public, s, s_prime)?;
                Inner::Grh(GrhMechanism::new(public, part)?)
            }
            Mechanism::Grh(part) => Inner::Grh(GrhMechanism::new(public, part.clone())?),
            Mechanism::BrownMood { side } => {
                Inner::Grh(GrhMechanism::new(public, preset_partition(public, PresetScheme::BrownMood, *side)?)?)
            }
            Mechanism::Tukey { side } => Inner::Grh(GrhMechanism::new(public, preset_partition(public, PresetScheme::Tukey, *side)?)?),
            Mechanism::Impartial(c) => {
                c.validate(n, d)?;
                Inner::Impartial(c.clone())
            }
            Mechanism::ImpartialSwap => {
                public.require_dim(1)?;
                if n != 2 {
                    return Err(Error::DimensionMismatch { expected: 2, found: n });
                }
                Inner::Impartial(ImpartialConfig::swap(public.x(0)[0], public.x(1)[0])?)
            }
            Mechanism::GeneralizedMedian { phantoms } => {
                public.require_dim(0)?;
                if phantoms.len() != n + 1 {
                    return Err(Error::DimensionMismatch { expected: n + 1, found: phantoms.len() });
                }
                Inner::GenMedian(phantoms.clone())
            }
        };
        Ok(PreparedMechanism { spec: self.clone(), inner, xs: public.xs_flat().to_vec(), dim: d, n })
    }

    /// One-shot fit (prepares and fits).
    pub fn fit(&self, data: &DataSet) -> Result<Hyperplane> {
        self.prepare(data)?.fit(data)
    }
}

#[derive(Debug, Clone)]
enum Inner {
    Ols,
    L1(L1Config),
    Quantile(QuantileConfig),
    Crm(CrmConfig),
    Grh(GrhMechanism),
    Impartial(ImpartialConfig),
    GenMedian(Vec<ExtReal>),
}

/// A mechanism bound to fixed public data, callable with any reports.
#[derive(Debug, Clone)]
pub struct PreparedMechanism {
    spec: MechanismSpec,
    inner: Inner,
    xs: Vec<f64>,
    dim: usize,
    n: usize,
}

impl PreparedMechanism {
    pub fn spec(&self) -> &MechanismSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn traversal_flag(&self) -> bool {
        self.spec.traversal_flag()
    }

    pub fn is_impartial(&self) -> bool {
        matches!(self.inner, Inner::Impartial(_))
    }

    /// The partition a GRH-type mechanism resolved to.
    pub fn partition(&self) -> Option<&AgentPartition> {
        match &self.inner {
            Inner::Grh(g) => Some(g.partition()),
            _ => None,
        }
    }

    pub fn fit(&self, data: &DataSet) -> Result<Hyperplane> {
        if data.n() != self.n || data.dim() != self.dim || data.xs_flat() != self.xs.as_slice() {
            return Err(Error::InvalidInput("reports must come with the public data the mechanism was prepared for".into()));
        }
        self.fit_unchecked(data)
    }

    pub(crate) fn fit_unchecked(&self, data: &DataSet) -> Result<Hyperplane> {
        match &self.inner {
            Inner::Ols => Ok(fit_ols(data)),
            Inner::L1(c) => fit_l1erm(data, c),
            Inner::Quantile(c) => fit_quantile(data, c),
            Inner::Crm(c) => fit_crm(data, c),
            Inner::Grh(g) => Ok(g.fit(data)?.hyperplane),
            Inner::Impartial(c) => fit_impartial(data, c),
            Inner::GenMedian(ph) => match generalized_median(data.ys(), ph)? {
                ExtReal::Finite(v) => Ok(Hyperplane::constant(0, v)),
                other => Err(Error::InvalidInput(format!("generalized median is {other}"))),
            },
        }
    }

    /// Agent `i`'s outcome when reports are `ys`.
    pub fn outcome_for(&self, data: &DataSet, i: usize) -> Result<f64> {
        Ok(self.fit_unchecked(data)?.eval(data.x(i)))
    }
}
