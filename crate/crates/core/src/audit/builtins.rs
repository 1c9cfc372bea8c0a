//! The manipulation counterexamples as ready-made instances.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Mechanism, MechanismSpec};
use crate::crm::CrmConfig;
use crate::erm::QuantileConfig;
use crate::error::Error;
use crate::model::DataSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinInstance {
    /// CRM with disjoint `S`, `S′`: six points, the agent at `x = 4` gains by
    /// reporting 1.8.
    CrmDisjoint,
    /// CRM with `S ⊆ S′`: ten points, the agent at `(12, 11)` gains by
    /// reporting 0.
    CrmSubset,
    /// Quantile regression at `q = 0.4` on twenty points; the agent at
    /// `(13.9, 7.4)` is claimed to gain by reporting 2000.
    Quantile04,
}

impl BuiltinInstance {
    pub const ALL: [BuiltinInstance; 3] = [BuiltinInstance::CrmDisjoint, BuiltinInstance::CrmSubset, BuiltinInstance::Quantile04];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinInstance::CrmDisjoint => "crm-disjoint",
            BuiltinInstance::CrmSubset => "crm-subset",
            BuiltinInstance::Quantile04 => "quantile04",
        }
    }

    /// The manipulating agent and her misreport.
    pub fn manipulation(self) -> (usize, f64) {
        match self {
            BuiltinInstance::CrmDisjoint => (5, 1.8),
            BuiltinInstance::CrmSubset => (9, 0.0),
            BuiltinInstance::Quantile04 => (10, 2000.0),
        }
    }
}

impl fmt::Display for BuiltinInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown builtin `{s}` (expected crm-disjoint, crm-subset or quantile04)")))
    }
}

const CRM_DISJOINT: [(f64, f64); 6] = [(1.0, 0.0), (3.0, 1.0), (5.0, 1.9), (0.0, 1.0), (2.0, 2.0), (4.0, 3.0)];

const CRM_SUBSET: [(f64, f64); 10] = [
    (3.0, 12.0),
    (9.0, 9.5),
    (11.0, 9.0),
    (13.0, 4.5),
    (14.0, 11.0),
    (4.0, 8.0),
    (4.3, 12.0),
    (7.0, 6.5),
    (8.0, 7.5),
    (12.0, 11.0),
];

const QUANTILE: [(f64, f64); 20] = [
    (-79.3, -45.8),
    (-77.3, 89.5),
    (-74.8, -87.4),
    (-58.5, 14.3),
    (-33.2, -28.4),
    (-31.5, 5.2),
    (-8.0, -73.1),
    (-1.7, -52.8),
    (10.0, 88.6),
    (13.0, 13.3),
    (13.9, 7.4),
    (15.4, 39.4),
    (18.5, -2.0),
    (23.0, 6.6),
    (23.8, -33.0),
    (24.2, -60.3),
    (26.0, 49.5),
    (39.5, 49.5),
    (45.3, 88.9),
    (71.2, 33.2),
];

/// The instance's truthful data and mechanism.
pub fn builtin_instance(which: BuiltinInstance) -> (DataSet, MechanismSpec) {
    let (points, mech): (&[(f64, f64)], Mechanism) = match which {
        BuiltinInstance::CrmDisjoint => (&CRM_DISJOINT, Mechanism::Crm(CrmConfig::new(vec![0, 1, 2], vec![3, 4, 5]))),
        BuiltinInstance::CrmSubset => (&CRM_SUBSET, Mechanism::Crm(CrmConfig::new((0..5).collect(), (0..10).collect()))),
        BuiltinInstance::Quantile04 => (&QUANTILE, Mechanism::Quantile(QuantileConfig { q: 0.4 })),
    };
    (DataSet::from_points(points).expect("builtin data is finite"), MechanismSpec::new(mech))
}
