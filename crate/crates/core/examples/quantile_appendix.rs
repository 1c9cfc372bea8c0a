//! Quantile regression at q = 0.4 on the twenty-point instance, and what a
//! report of 2000 does to the fit.

use spreg::audit::{builtin_instance, BuiltinInstance};
use spreg::erm::{quantile_risk, solve_quantile, QuantileConfig};

fn main() -> spreg::Result<()> {
    let (data, _) = builtin_instance(BuiltinInstance::Quantile04);
    let cfg = QuantileConfig::new(0.4)?;
    let (agent, report) = BuiltinInstance::Quantile04.manipulation();
    let truthful = solve_quantile(&data, &cfg)?;
    println!("truthful {} (risk {:.4})", truthful.hyperplane, truthful.objective);
    let lied = solve_quantile(&data.with_report(agent, report)?, &cfg)?;
    println!("agent {agent} reports {report}: {}", lied.hyperplane);
    let x = data.x(agent);
    println!(
        "|residual| {:.6} -> {:.6}",
        (data.y(agent) - truthful.hyperplane.eval(x)).abs(),
        (data.y(agent) - lied.hyperplane.eval(x)).abs()
    );
    println!("risk of the new line on true data {:.4}", quantile_risk(&data, &cfg, &lied.hyperplane)?);
    Ok(())
}
