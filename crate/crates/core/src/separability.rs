//! Admissibility, strict linear separation, well separability of point
//! families, and the hyperplane comparison scan used to argue GRH uniqueness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{Cmp, LinearProgram};
use crate::model::{DataSet, Hyperplane, MedianSide};

/// Optimal margins at or below this are treated as "not strictly separable".
pub const SEPARATION_MARGIN: f64 = 1e-9;

/// An ordered family of disjoint agent sets with one rank per set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentPartition {
    pub sets: Vec<Vec<usize>>,
    pub ranks: Vec<usize>,
}

impl AgentPartition {
    pub fn new(sets: Vec<Vec<usize>>, ranks: Vec<usize>) -> Result<Self> {
        let p = Self { sets, ranks };
        p.validate_shape()?;
        Ok(p)
    }

    /// Each set gets the side-resolved median rank.
    pub fn with_median_ranks(sets: Vec<Vec<usize>>, side: MedianSide) -> Result<Self> {
        let ranks = sets.iter().map(|s| side.rank(s.len().max(1))).collect();
        Self::new(sets, ranks)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    fn validate_shape(&self) -> Result<()> {
        if self.sets.len() != self.ranks.len() {
            return Err(Error::DimensionMismatch { expected: self.sets.len(), found: self.ranks.len() });
        }
        if self.sets.is_empty() {
            return Err(Error::InvalidInput("partition has no sets".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (t, s) in self.sets.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidInput(format!("set {t} is empty")));
            }
            let k = self.ranks[t];
            if k == 0 || k > s.len() {
                return Err(Error::InvalidInput(format!("rank {k} of set {t} outside 1..={}", s.len())));
            }
            for &i in s {
                if !seen.insert(i) {
                    return Err(Error::InvalidInput(format!("agent {i} appears in more than one set")));
                }
            }
        }
        Ok(())
    }

    /// Checks shape and that every index is below `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        self.validate_shape()?;
        for s in &self.sets {
            for &i in s {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, len: n });
                }
            }
        }
        Ok(())
    }

    /// The x-vectors of each set.
    pub fn project(&self, data: &DataSet) -> Result<Vec<Vec<Vec<f64>>>> {
        self.validate(data.n())?;
        Ok(self.sets.iter().map(|s| s.iter().map(|&i| data.x(i).to_vec()).collect()).collect())
    }

    /// Sorts agents by their single coordinate and cuts consecutive blocks of
    /// the given sizes (agents beyond the total are left out). Ranks are
    /// median ranks with `side`.
    pub fn contiguous_blocks(data: &DataSet, sizes: &[usize], side: MedianSide) -> Result<Self> {
        data.require_dim(1)?;
        let total: usize = sizes.iter().sum();
        if total > data.n() {
            return Err(Error::InvalidInput(format!("block sizes sum to {total} > n = {}", data.n())));
        }
        let order = sorted_by_x(data);
        let mut sets = Vec::with_capacity(sizes.len());
        let mut at = 0;
        for &s in sizes {
            sets.push(order[at..at + s].to_vec());
            at += s;
        }
        Self::with_median_ranks(sets, side)
    }

    /// Assigns every agent to its nearest anchor (Euclidean; ties go to the
    /// lower anchor index). Only a constructor: validate with
    /// [`is_publicly_separable`].
    pub fn nearest_anchor(data: &DataSet, anchors: &[Vec<f64>], side: MedianSide) -> Result<Self> {
        let mut sets = vec![Vec::new(); anchors.len()];
        for a in anchors {
            data.require_dim(a.len())?;
        }
        for i in 0..data.n() {
            let x = data.x(i);
            let best = (0..anchors.len())
                .min_by(|&a, &b| dist2(x, &anchors[a]).total_cmp(&dist2(x, &anchors[b])).then(a.cmp(&b)))
                .ok_or_else(|| Error::InvalidInput("no anchors".into()))?;
            sets[best].push(i);
        }
        Self::with_median_ranks(sets, side)
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

pub(crate) fn sorted_by_x(data: &DataSet) -> Vec<usize> {
    let mut order: Vec<usize> = (0..data.n()).collect();
    order.sort_by(|&a, &b| data.x(a)[0].total_cmp(&data.x(b)[0]).then(a.cmp(&b)));
    order
}

/// A hyperplane `{x : normal·x = offset}` with `A` strictly on the positive side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatorWitness {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl SeparatorWitness {
    pub fn side(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - self.offset
    }
}

/// Returns the first pair of agents sharing an x-coordinate, if any.
pub fn find_collision(data: &DataSet) -> Result<Option<(usize, usize)>> {
    data.require_dim(1)?;
    let order = sorted_by_x(data);
    Ok(order
        .windows(2)
        .find(|w| data.x(w[0])[0] == data.x(w[1])[0])
        .map(|w| (w[0].min(w[1]), w[0].max(w[1]))))
}

pub fn is_admissible(data: &DataSet) -> Result<bool> {
    Ok(find_collision(data)?.is_none())
}

pub(crate) fn require_admissible(data: &DataSet) -> Result<()> {
    match find_collision(data)? {
        Some((i, j)) => Err(Error::Inadmissible(i, j)),
        None => Ok(()),
    }
}

/// Maximizes the margin `m` of `a·x ≥ b + m` on `A`, `a·x ≤ b − m` on `B`
/// with `‖a‖∞ ≤ 1` and `m ≤ 1`; a witness exists iff the optimum exceeds
/// [`SEPARATION_MARGIN`].
pub fn strictly_separates(a: &[Vec<f64>], b: &[Vec<f64>]) -> Option<SeparatorWitness> {
    let k = a.first().or(b.first()).map_or(0, |p| p.len());
    // variables: normal (k), offset, margin; all free
    let nv = k + 2;
    let mut obj = vec![0.0; nv];
    obj[k + 1] = -1.0;
    let mut lp = LinearProgram::new(obj);
    for j in 0..nv {
        lp.set_free(j);
    }
    for x in a {
        let mut row = x.clone();
        row.push(-1.0);
        row.push(-1.0);
        lp.add_row(row, Cmp::Ge, 0.0);
    }
    for x in b {
        let mut row = x.clone();
        row.push(-1.0);
        row.push(1.0);
        lp.add_row(row, Cmp::Le, 0.0);
    }
    for j in 0..k {
        lp.add_sparse_row(&[(j, 1.0)], Cmp::Le, 1.0);
        lp.add_sparse_row(&[(j, 1.0)], Cmp::Ge, -1.0);
    }
    lp.add_sparse_row(&[(k + 1, 1.0)], Cmp::Le, 1.0);
    let sol = lp.minimize().ok()?;
    if sol.x[k + 1] > SEPARATION_MARGIN {
        Some(SeparatorWitness { normal: sol.x[..k].to_vec(), offset: sol.x[k] })
    } else {
        None
    }
}

/// Every pair of disjoint nonempty index groups `I, J` of the family must be
/// strictly separable. Costs at most `3^t` separation programs.
pub fn is_well_separable(sets: &[Vec<Vec<f64>>]) -> Result<bool> {
    let t = sets.len();
    if t == 0 || sets.iter().any(|s| s.is_empty()) {
        return Err(Error::InvalidInput("well separability needs nonempty sets".into()));
    }
    let k = sets[0][0].len();
    if sets.iter().flatten().any(|p| p.len() != k) {
        return Err(Error::DimensionMismatch { expected: k, found: sets.iter().flatten().find(|p| p.len() != k).unwrap().len() });
    }
    if t > k + 1 {
        return Err(Error::TooManySets { sets: t, dim: k });
    }
    // Assignment digit per set: 0 = unused, 1 = I, 2 = J. Separation is
    // symmetric, so require the first used set to be in I.
    let total = 3usize.pow(t as u32);
    for code in 0..total {
        let mut c = code;
        let mut first: Option<u8> = None;
        let (mut ia, mut jb) = (Vec::new(), Vec::new());
        for s in sets {
            let digit = (c % 3) as u8;
            c /= 3;
            if digit != 0 && first.is_none() {
                first = Some(digit);
            }
            match digit {
                1 => ia.extend(s.iter().cloned()),
                2 => jb.extend(s.iter().cloned()),
                _ => {}
            }
        }
        if first != Some(1) || jb.is_empty() {
            continue;
        }
        if strictly_separates(&ia, &jb).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_publicly_separable(data: &DataSet, part: &AgentPartition) -> Result<bool> {
    is_well_separable(&part.project(data)?)
}

pub(crate) fn require_publicly_separable(data: &DataSet, part: &AgentPartition) -> Result<()> {
    if is_publicly_separable(data, part)? {
        Ok(())
    } else {
        Err(Error::NotPubliclySeparable)
    }
}

/// `k` sets in `R^k`: every transversal spans a `(k−1)`-flat that contains
/// no other point of the union.
pub fn has_weak_general_position(sets: &[Vec<Vec<f64>>]) -> bool {
    let k = sets.len();
    if sets.iter().any(|s| s.is_empty()) {
        return false;
    }
    let all: Vec<(usize, usize, &Vec<f64>)> = sets
        .iter()
        .enumerate()
        .flat_map(|(t, s)| s.iter().enumerate().map(move |(j, p)| (t, j, p)))
        .collect();
    let aug = |p: &Vec<f64>| {
        let mut v = p.clone();
        v.push(1.0);
        v
    };
    for pick in transversals(&sets.iter().map(|s| s.len()).collect::<Vec<_>>()) {
        let rows: Vec<Vec<f64>> = pick.iter().enumerate().map(|(t, &j)| aug(&sets[t][j])).collect();
        if linalg::rank(&rows) < k {
            return false;
        }
        for &(t, j, p) in &all {
            if pick[t] == j {
                continue;
            }
            let mut with = rows.clone();
            with.push(aug(p));
            if linalg::rank(&with) < k + 1 {
                return false;
            }
        }
    }
    true
}

/// All index tuples `(j_1, …, j_t)` with `j_s < sizes[s]`, lexicographic.
pub fn transversals(sizes: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = sizes.iter().product();
    (0..total).map(move |mut code| {
        let mut v = vec![0; sizes.len()];
        for s in (0..sizes.len()).rev() {
            v[s] = code % sizes[s];
            code /= sizes[s];
        }
        v
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HyperplaneOrder {
    /// `h1` is strictly below `h2` at every member of the set.
    AllBelow,
    AllAbove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub set: usize,
    pub order: HyperplaneOrder,
}

/// Smallest set index on which `h1` lies uniformly strictly below or above `h2`.
pub fn compare_hyperplanes(data: &DataSet, part: &AgentPartition, h1: &Hyperplane, h2: &Hyperplane) -> Result<Comparison> {
    data.require_dim(h1.dim())?;
    data.require_dim(h2.dim())?;
    if h1.approx_eq(h2, 1e-12) {
        return Err(Error::EqualHyperplanes);
    }
    require_publicly_separable(data, part)?;
    scan_comparison(data, part, h1, h2).ok_or(Error::ComparisonFailed)
}

pub(crate) fn scan_comparison(data: &DataSet, part: &AgentPartition, h1: &Hyperplane, h2: &Hyperplane) -> Option<Comparison> {
    part.sets.iter().enumerate().find_map(|(t, s)| {
        let diffs: Vec<f64> = s.iter().map(|&i| h1.eval(data.x(i)) - h2.eval(data.x(i))).collect();
        if diffs.iter().all(|d| *d < 0.0) {
            Some(Comparison { set: t, order: HyperplaneOrder::AllBelow })
        } else if diffs.iter().all(|d| *d > 0.0) {
            Some(Comparison { set: t, order: HyperplaneOrder::AllAbove })
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|x| vec![*x]).collect()
    }

    #[test]
    fn admissibility() {
        let d = DataSet::from_points(&[(1.0, 0.0), (3.0, 1.0), (5.0, 1.9), (0.0, 1.0), (2.0, 2.0), (4.0, 3.0)]).unwrap();
        assert!(is_admissible(&d).unwrap());
        let d = DataSet::from_points(&[(1.0, 0.0), (1.0, 2.0)]).unwrap();
        assert!(!is_admissible(&d).unwrap());
        assert_eq!(require_admissible(&d), Err(Error::Inadmissible(0, 1)));
        assert!(is_admissible(&DataSet::from_points(&[(7.0, 0.0)]).unwrap()).unwrap());
        assert!(is_admissible(&DataSet::scalar(vec![1.0]).unwrap()).is_err());
    }

    #[test]
    fn strict_separation_examples() {
        let w = strictly_separates(&pts(&[0.0]), &pts(&[1.0])).unwrap();
        assert!(w.side(&[0.0]) > 0.0 && w.side(&[1.0]) < 0.0);
        assert!(strictly_separates(&pts(&[0.0, 2.0]), &pts(&[1.0])).is_none());
        assert!(strictly_separates(&pts(&[1.0, 3.0, 5.0]), &pts(&[0.0, 2.0, 4.0])).is_none());
        // touching sets are not strictly separable
        assert!(strictly_separates(&pts(&[0.0, 1.0]), &pts(&[1.0, 2.0])).is_none());
    }

    #[test]
    fn well_separable_examples() {
        assert!(is_well_separable(&[pts(&[0.0]), pts(&[1.0])]).unwrap());
        assert!(!is_well_separable(&[pts(&[0.0, 2.0]), pts(&[1.0])]).unwrap());
        let o = vec![vec![0.0, 0.0]];
        let three = [
            vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            vec![vec![0.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.0, 0.0], vec![1.0, 1.0]],
        ];
        assert!(!is_well_separable(&three).unwrap());
        assert_eq!(is_well_separable(&[o.clone(), o.clone(), o.clone(), o]), Err(Error::TooManySets { sets: 4, dim: 2 }));
    }

    #[test]
    fn public_separability_examples() {
        let d = DataSet::from_points(&[(0.0, 1.0), (1.0, 2.0), (3.0, 0.0), (4.0, 5.0)]).unwrap();
        let p = AgentPartition::new(vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap();
        assert!(is_publicly_separable(&d, &p).unwrap());
        let fig = DataSet::from_points(&[(1.0, 0.0), (3.0, 1.0), (5.0, 1.9), (0.0, 1.0), (2.0, 2.0), (4.0, 3.0)]).unwrap();
        let p = AgentPartition::new(vec![vec![0, 1, 2], vec![3, 4, 5]], vec![2, 2]).unwrap();
        assert!(!is_publicly_separable(&fig, &p).unwrap());
    }

    #[test]
    fn three_clusters_in_the_plane() {
        let centers = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
        let offsets = [(0.1, 0.0), (-0.05, 0.08), (0.0, -0.1), (0.07, 0.07)];
        let mut xs = Vec::new();
        for c in centers {
            for o in offsets {
                xs.push(vec![c.0 + o.0, c.1 + o.1]);
            }
        }
        let d = DataSet::new(xs, vec![0.0; 12]).unwrap();
        let anchors = centers.iter().map(|c| vec![c.0, c.1]).collect::<Vec<_>>();
        let p = AgentPartition::nearest_anchor(&d, &anchors, MedianSide::Left).unwrap();
        assert_eq!(p.sets, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![8, 9, 10, 11]]);
        assert!(is_publicly_separable(&d, &p).unwrap());
    }

    #[test]
    fn weak_general_position_examples() {
        assert!(has_weak_general_position(&[vec![vec![0.0, 0.0]], vec![vec![1.0, 2.0]]]));
        assert!(!has_weak_general_position(&[vec![vec![0.0, 0.0], vec![2.0, 2.0]], vec![vec![1.0, 1.0]]]));
    }

    #[test]
    fn weak_general_position_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let sets: Vec<Vec<Vec<f64>>> =
                (0..2).map(|_| (0..3).map(|_| vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)]).collect()).collect();
            assert!(has_weak_general_position(&sets));
        }
    }

    #[test]
    fn comparison_examples() {
        let d = DataSet::from_points(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0), (4.0, 0.0)]).unwrap();
        let p = AgentPartition::new(vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap();
        let c = compare_hyperplanes(&d, &p, &Hyperplane::line(1.0, 0.0), &Hyperplane::line(1.0, 1.0)).unwrap();
        assert_eq!(c, Comparison { set: 0, order: HyperplaneOrder::AllBelow });
        // crossing at x = 2
        let c = compare_hyperplanes(&d, &p, &Hyperplane::line(1.0, -2.0), &Hyperplane::line(-1.0, 2.0)).unwrap();
        assert_eq!(c, Comparison { set: 0, order: HyperplaneOrder::AllBelow });
        assert_eq!(
            compare_hyperplanes(&d, &p, &Hyperplane::line(1.0, 0.0), &Hyperplane::line(1.0, 0.0)),
            Err(Error::EqualHyperplanes)
        );
        let bad = AgentPartition::new(vec![vec![0, 2], vec![1, 3]], vec![1, 1]).unwrap();
        assert_eq!(
            compare_hyperplanes(&d, &bad, &Hyperplane::line(1.0, 0.0), &Hyperplane::line(0.0, 0.0)),
            Err(Error::NotPubliclySeparable)
        );
    }

    #[test]
    fn partition_validation() {
        assert!(AgentPartition::new(vec![vec![0], vec![0]], vec![1, 1]).is_err());
        assert!(AgentPartition::new(vec![vec![0, 1]], vec![3]).is_err());
        assert!(AgentPartition::new(vec![vec![]], vec![1]).is_err());
        let p = AgentPartition::new(vec![vec![0, 5]], vec![1]).unwrap();
        assert_eq!(p.validate(3), Err(Error::IndexOutOfRange { index: 5, len: 3 }));
    }

    #[test]
    fn contiguous_blocks_sorted_by_x() {
        let d = DataSet::from_points(&[(3.0, 0.0), (0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (4.0, 0.0)]).unwrap();
        let p = AgentPartition::contiguous_blocks(&d, &[2, 3], MedianSide::Left).unwrap();
        assert_eq!(p.sets, vec![vec![1, 3], vec![2, 0, 4]]);
        assert_eq!(p.ranks, vec![1, 2]);
    }

    #[test]
    fn simplex_clusters_separate_despite_roundoff() {
        // Once tripped a tiny negative reduced cost with no blocking row.
        let origin = vec![
            vec![0.1353652477327687, 0.10552116225337826, -0.637239372713069],
            vec![0.9117736823499456, -0.5916503358613658, -0.13325033221655014],
            vec![0.4681939153533361, 0.16542948915001343, -0.2398749363015047],
        ];
        let e1 = vec![vec![9.720477649043751, -0.32940498187570455, -0.9224349745326705]];
        let e2 = vec![
            vec![-0.9100147488359003, 9.949071436218034, 0.9129383489134884],
            vec![-0.572587483784992, 10.299953703979327, -0.9316576981924709],
            vec![0.4150465431393524, 9.79960775837776, 0.816991587470167],
        ];
        let e3 = vec![
            vec![0.07356376733868375, -0.465733008846577, 10.686121168330962],
            vec![0.5578845169705855, -0.8531270532116704, 10.470404628766909],
        ];
        let a: Vec<Vec<f64>> = origin.iter().chain(&e3).cloned().collect();
        let b: Vec<Vec<f64>> = e1.iter().chain(&e2).cloned().collect();
        assert!(strictly_separates(&a, &b).is_some());
        assert!(is_well_separable(&[origin, e1, e2, e3]).unwrap());
    }

    fn points_1d() -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(-50.0f64..50.0, 1..5).prop_map(|v| v.into_iter().map(|x| vec![x]).collect())
    }

    fn points_2d() -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..4).prop_map(|v| v.into_iter().map(|(a, b)| vec![a, b]).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn separation_symmetric(a in points_2d(), b in points_2d()) {
            let ab = strictly_separates(&a, &b);
            let ba = strictly_separates(&b, &a);
            prop_assert_eq!(ab.is_some(), ba.is_some());
            if let Some(w) = ab {
                let neg = SeparatorWitness { normal: w.normal.iter().map(|v| -v).collect(), offset: -w.offset };
                prop_assert!(b.iter().all(|x| neg.side(x) > 0.0));
                prop_assert!(a.iter().all(|x| neg.side(x) < 0.0));
            }
        }

        #[test]
        fn line_separability_matches_interval_rule(a in points_1d(), b in points_1d()) {
            let amax = a.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            let amin = a.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let bmax = b.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            let bmin = b.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let gap = (bmin - amax).max(amin - bmax);
            prop_assume!(gap.abs() > 1e-6);
            prop_assert_eq!(is_well_separable(&[a, b]).unwrap(), gap > 0.0);
        }

        #[test]
        fn well_separable_invariant_under_permutation_and_affine_maps(
            sets in prop::collection::vec(points_2d(), 1..4),
            m in prop::array::uniform4(-2.0f64..2.0),
            shift in prop::array::uniform2(-3.0f64..3.0),
        ) {
            let det = m[0] * m[3] - m[1] * m[2];
            prop_assume!(det.abs() > 0.2);
            let base = is_well_separable(&sets).unwrap();
            let mut rev = sets.clone();
            rev.reverse();
            prop_assert_eq!(is_well_separable(&rev).unwrap(), base);
            let mapped: Vec<Vec<Vec<f64>>> = sets.iter().map(|s| s.iter().map(|p| vec![
                m[0] * p[0] + m[1] * p[1] + shift[0],
                m[2] * p[0] + m[3] * p[1] + shift[1],
            ]).collect()).collect();
            prop_assert_eq!(is_well_separable(&mapped).unwrap(), base);
        }
    }
}
