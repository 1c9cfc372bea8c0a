//! Influence bounds of Tukey's resistant line, checked against a sweep of
//! one agent's report.

use spreg::audit::influence_bounds;
use spreg::{DataSet, Mechanism, MechanismSpec, MedianSide};

fn main() -> spreg::Result<()> {
    let data = DataSet::from_points(&[(0.0, 1.0), (1.0, 3.0), (2.0, 2.0), (4.0, 5.0), (5.0, 7.0), (6.0, 4.0), (8.0, 9.0), (9.0, 8.5), (10.0, 11.0)])?;
    let spec = MechanismSpec::new(Mechanism::Tukey { side: MedianSide::Left });
    let prepared = spec.prepare(&data)?;
    for agent in 0..data.n() {
        let b = influence_bounds(&spec, &data, agent)?;
        let mut worst: f64 = 0.0;
        for k in 0..=200 {
            let y = -30.0 + 0.3 * k as f64;
            let out = prepared.outcome_for(&data.with_report(agent, y)?, agent)?;
            worst = worst.max((out - b.outcome(y)).abs());
        }
        println!("agent {agent}: [{}, {}]  sweep error {worst:.1e}", b.lower, b.upper);
    }
    Ok(())
}
