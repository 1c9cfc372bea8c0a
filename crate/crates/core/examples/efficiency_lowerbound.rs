//! Risk relative to OLS, and the instance where any strategyproof mechanism
//! pays a factor of two.

use spreg::audit::{efficiency_ratio, lowerbound_instance};
use spreg::erm::L1Config;
use spreg::{Mechanism, MechanismSpec, MedianSide};

fn main() -> spreg::Result<()> {
    for n in [3, 5, 10, 50] {
        let (data, d) = lowerbound_instance(n)?;
        println!("n = {n}: X = {:.6}, T = {:.12}, f0 = {:.9}, f1 = {:.9}, f1/f0 = {:.9}", d.x, d.t, d.f0, d.f1, d.ratio);
        for spec in [
            MechanismSpec::new(Mechanism::L1Erm(L1Config::default())),
            MechanismSpec::new(Mechanism::BrownMood { side: MedianSide::Left }),
        ] {
            println!("  {:>10}: ratio {}", spec.mechanism.name(), efficiency_ratio(&spec, &data)?);
        }
    }
    Ok(())
}
