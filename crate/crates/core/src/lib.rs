//! Strategyproof linear regression mechanisms and tools to audit them.
//!
//! Mechanisms take public `x`'s and private reports `y` and return a
//! hyperplane. The [`audit`] module searches for profitable misreports,
//! computes influence bounds and compares risk with OLS.
//!
//! ```
//! use spreg::{DataSet, Mechanism, MechanismSpec};
//!
//! let data = DataSet::from_points(&[(0.0, 1.0), (1.0, 3.0), (2.0, 2.0), (3.0, 5.0)])?;
//! let spec = MechanismSpec::new(Mechanism::BrownMood { side: Default::default() });
//! let fit = spec.prepare(&data)?.fit(&data)?;
//! assert_eq!(fit.dim(), 1);
//! # Ok::<(), spreg::Error>(())
//! ```

pub mod audit;
pub mod cli;
pub mod crm;
pub mod erm;
pub mod error;
pub mod grh;
pub mod impartial;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod plot;
pub mod reproduce;
pub mod separability;

pub use audit::{Mechanism, MechanismSpec, PreparedMechanism};
pub use error::{Error, Result};
pub use model::{median_with_side, order_statistic, outcomes, predict, rss, DataSet, ExtReal, Hyperplane, MedianSide, OutcomeRecord};
