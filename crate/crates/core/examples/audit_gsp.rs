//! Coalition audits of several mechanisms on one random instance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spreg::audit::random::admissible_line;
use spreg::audit::{audit_gsp_with, GspOptions};
use spreg::crm::CrmConfig;
use spreg::erm::{L1Config, QuantileConfig};
use spreg::{Mechanism, MechanismSpec, MedianSide};

fn main() -> spreg::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let data = admissible_line(&mut rng, 7);
    let specs = [
        Mechanism::Ols,
        Mechanism::L1Erm(L1Config::default()),
        Mechanism::Quantile(QuantileConfig { q: 0.3 }),
        Mechanism::Crm(CrmConfig::full(7)),
        Mechanism::BrownMood { side: MedianSide::Left },
        Mechanism::Tukey { side: MedianSide::Left },
    ];
    let opts = GspOptions::new(2, 6, 1);
    for m in specs {
        let spec = MechanismSpec::new(m);
        let found = audit_gsp_with(&spec.prepare(&data)?, &data, &opts)?;
        match found {
            Some(c) => println!("{:>10}: coalition {:?} gains with {:?}", spec.mechanism.name(), c.coalition, c.misreports),
            None => println!("{:>10}: nothing found", spec.mechanism.name()),
        }
    }
    Ok(())
}
