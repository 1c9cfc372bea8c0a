//! Impartial mechanisms: an agent's own report never moves her outcome, yet
//! two agents can still gain together.

use spreg::audit::{audit_gsp, audit_sp, default_candidates};
use spreg::{DataSet, Mechanism, MechanismSpec};

fn main() -> spreg::Result<()> {
    let data = DataSet::from_points(&[(0.0, 1.0), (2.0, 5.0)])?;
    let spec = MechanismSpec::new(Mechanism::ImpartialSwap);
    let h = spec.fit(&data)?;
    println!("truthful {h}: outcomes {} and {}", h.eval(&[0.0]), h.eval(&[2.0]));
    for agent in 0..2 {
        let found = audit_sp(&spec, &data, agent, &default_candidates(&data, agent)?)?;
        println!("agent {agent} alone: {}", if found.is_some() { "gains" } else { "cannot gain" });
    }
    if let Some(c) = audit_gsp(&spec, &data, 2, 40, 7)? {
        println!("coalition {:?} reports {:?}: |residuals| {:?} -> {:?}", c.coalition, c.misreports, c.before, c.after);
    }
    Ok(())
}
