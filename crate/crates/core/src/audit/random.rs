//! Random instance generators for audits and experiments.

use rand::Rng;

use crate::impartial::{ImpartialConfig, ImpartialFn};
use crate::model::DataSet;
use crate::separability::AgentPartition;

/// `n` agents on a line with pairwise distinct `x` in `[-10, 10]` (at least
/// 0.05 apart) and `y` in `[-10, 10]`.
pub fn admissible_line<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DataSet {
    let mut xs: Vec<f64> = Vec::with_capacity(n);
    while xs.len() < n {
        let x = rng.gen_range(-10.0..10.0);
        if xs.iter().all(|v: &f64| (v - x).abs() >= 0.05) {
            xs.push(x);
        }
    }
    let pts: Vec<(f64, f64)> = xs.into_iter().map(|x| (x, rng.gen_range(-10.0..10.0))).collect();
    DataSet::from_points(&pts).expect("finite")
}

/// Clusters of the given sizes around the vertices `0, 10·e_1, …, 10·e_d` of
/// a simplex, each point within 1 of its vertex per coordinate, so the
/// clusters are well separable for `d ≤ 3`. Set `t` holds cluster `t`'s agents
/// (agents are listed cluster by cluster); ranks are uniform in `1..=|S_t|`.
pub fn clustered_partition<R: Rng + ?Sized>(rng: &mut R, d: usize, sizes: &[usize]) -> (DataSet, AgentPartition) {
    assert_eq!(sizes.len(), d + 1, "one cluster per simplex vertex");
    let mut xs = Vec::new();
    let mut sets = Vec::new();
    for (t, &size) in sizes.iter().enumerate() {
        let mut set = Vec::new();
        for _ in 0..size {
            let mut x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if t > 0 {
                x[t - 1] += 10.0;
            }
            set.push(xs.len());
            xs.push(x);
        }
        sets.push(set);
    }
    let ys = (0..xs.len()).map(|_| rng.gen_range(-10.0..10.0)).collect();
    let ranks = sizes.iter().map(|&s| rng.gen_range(1..=s)).collect();
    (DataSet::new(xs, ys).expect("finite"), AgentPartition::new(sets, ranks).expect("valid partition"))
}

/// An affine impartial configuration with coefficients in `[-2, 2]`.
pub fn affine_impartial<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> ImpartialConfig {
    let g = (0..n)
        .map(|_| ImpartialFn::Affine {
            a: (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            b: (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        })
        .collect();
    ImpartialConfig { g, c: rng.gen_range(-5.0..5.0) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separability::{find_collision, is_publicly_separable};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_meet_their_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            assert!(find_collision(&admissible_line(&mut rng, 9)).unwrap().is_none());
        }
        for d in 1..=3 {
            for _ in 0..10 {
                let sizes: Vec<usize> = (0..=d).map(|_| rng.gen_range(1..=4)).collect();
                let (data, part) = clustered_partition(&mut rng, d, &sizes);
                assert!(is_publicly_separable(&data, &part).unwrap());
            }
        }
    }
}
