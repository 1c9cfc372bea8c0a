//! The two CRM manipulations: one agent misreports and ends up closer to
//! her true value.

use spreg::audit::{audit_sp, builtin_instance, BuiltinInstance};

fn main() -> spreg::Result<()> {
    for which in [BuiltinInstance::CrmDisjoint, BuiltinInstance::CrmSubset] {
        let (data, spec) = builtin_instance(which);
        let (agent, report) = which.manipulation();
        let truthful = spec.fit(&data)?;
        let lied = spec.fit(&data.with_report(agent, report)?)?;
        println!("{which}");
        println!("  truthful:  {truthful}");
        println!("  agent {agent} reports {report}: {lied}");
        match audit_sp(&spec, &data, agent, &[report])? {
            Some(c) => println!("  |residual| {:.4} -> {:.4}", c.before[0], c.after[0]),
            None => println!("  no gain"),
        }
    }
    Ok(())
}
