//! A resistant plane in R^2 over three clusters, and the Brown-Mood line.

use spreg::grh::fit_grh;
use spreg::separability::{is_publicly_separable, AgentPartition};
use spreg::{DataSet, Mechanism, MechanismSpec, MedianSide};

fn main() -> spreg::Result<()> {
    let xs = vec![
        vec![0.0, 0.3],
        vec![0.5, -0.2],
        vec![-0.4, 0.1],
        vec![10.2, 0.4],
        vec![9.7, -0.5],
        vec![0.2, 10.1],
        vec![-0.3, 9.6],
        vec![0.6, 10.4],
    ];
    let ys = vec![1.0, 1.5, 0.2, 6.0, 4.1, -3.0, -2.2, -4.5];
    let data = DataSet::new(xs, ys)?;
    let part = AgentPartition::with_median_ranks(vec![vec![0, 1, 2], vec![3, 4], vec![5, 6, 7]], MedianSide::Left)?;
    println!("publicly separable: {}", is_publicly_separable(&data, &part)?);
    let res = fit_grh(&data, &part)?;
    println!("plane {} through agents {:?} ({} candidates)", res.hyperplane, res.transversal, res.candidates_examined);

    let line = DataSet::from_points(&[(0.0, 1.0), (1.0, 3.0), (2.0, 2.0), (5.0, 7.0), (6.0, 4.0), (7.0, 9.0)])?;
    let bm = MechanismSpec::new(Mechanism::BrownMood { side: MedianSide::Left });
    println!("brown-mood {}", bm.fit(&line)?);
    Ok(())
}
