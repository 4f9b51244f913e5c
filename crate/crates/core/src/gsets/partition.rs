use std::collections::BTreeMap;

use serde::Serialize;

use super::action::GAction;
use crate::error::{Error, Result};

/// A partition of `0..n` into nonempty disjoint blocks.
///
/// Blocks are kept sorted internally and ordered by least element, so two
/// equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionOfSet {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl PartitionOfSet {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &y in b {
                if y >= n {
                    return Err(Error::InvalidPartition(format!("point {y} outside 0..{n}")));
                }
                if std::mem::replace(&mut seen[y], true) {
                    return Err(Error::InvalidPartition(format!("point {y} in two blocks")));
                }
            }
        }
        if let Some(y) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("point {y} not covered")));
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_by_key(|b| b[0]);
        Ok(PartitionOfSet { n, blocks })
    }

    pub fn discrete(n: usize) -> Self {
        PartitionOfSet {
            n,
            blocks: (0..n).map(|y| vec![y]).collect(),
        }
    }

    pub fn indiscrete(n: usize) -> Self {
        PartitionOfSet {
            n,
            blocks: if n == 0 { vec![] } else { vec![(0..n).collect()] },
        }
    }

    /// Groups points by an arbitrary key.
    pub fn from_labels<K: Ord>(labels: &[K]) -> Self {
        let mut by_key: BTreeMap<&K, Vec<usize>> = BTreeMap::new();
        for (y, k) in labels.iter().enumerate() {
            by_key.entry(k).or_default().push(y);
        }
        let mut blocks: Vec<Vec<usize>> = by_key.into_values().collect();
        blocks.sort_by_key(|b| b[0]);
        PartitionOfSet {
            n: labels.len(),
            blocks,
        }
    }

    pub fn base_size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (i, b) in self.blocks.iter().enumerate() {
            for &y in b {
                out[y] = i;
            }
        }
        out
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &PartitionOfSet) -> bool {
        let owner = coarser.block_of();
        self.n == coarser.n && self.blocks.iter().all(|b| b.iter().all(|&y| owner[y] == owner[b[0]]))
    }
}

/// True iff every generator maps every block onto a block.
pub fn is_stable(action: &GAction, part: &PartitionOfSet) -> bool {
    let owner = part.block_of();
    action.generator_perms().iter().all(|perm| {
        part.blocks().iter().all(|b| {
            let target = owner[perm[b[0]]];
            b.iter().all(|&y| owner[perm[y]] == target) && part.blocks()[target].len() == b.len()
        })
    })
}

/// The stable refinement `{g_1 P_1 ∩ ... ∩ g_k P_k} \ {∅}`, where `H` is the
/// subgroup fixing every block setwise and `g_1, ..., g_k` are the least
/// representatives of the left cosets of `H`.
pub fn stable_refinement(action: &GAction, part: &PartitionOfSet) -> Result<PartitionOfSet> {
    if part.base_size() != action.num_points() {
        return Err(Error::InvalidPartition(format!(
            "partition of {} points for an action on {}",
            part.base_size(),
            action.num_points()
        )));
    }
    let group = action.group();
    let owner = part.block_of();
    let n = action.num_points();
    let kernel: Vec<usize> = (0..group.order())
        .filter(|&g| (0..n).all(|y| owner[action.act(g, y)] == owner[y]))
        .collect();
    let mut covered = vec![false; group.order()];
    let mut reps = Vec::new();
    for g in 0..group.order() {
        if covered[g] {
            continue;
        }
        reps.push(g);
        for &h in &kernel {
            covered[group.mul(g, h)] = true;
        }
    }
    // y lies in g_i P exactly when g_i^{-1} y lies in P.
    let signatures: Vec<Vec<usize>> = (0..n)
        .map(|y| reps.iter().map(|&g| owner[action.act(group.inv(g), y)]).collect())
        .collect();
    Ok(PartitionOfSet::from_labels(&signatures))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::gsets::catalog;
    use crate::gsets::group::Elem;
    use crate::gsets::Validation;

    fn s3_on_three_points() -> GAction {
        let s3 = Arc::new(catalog::symmetric(3).unwrap());
        let points = (0..3).map(|i| Elem(vec![i])).collect();
        let g = s3.clone();
        GAction::new(s3, points, move |a, y| g.element(a).0[y] as usize, Validation::Full).unwrap()
    }

    #[test]
    fn rejects_bad_partitions() {
        assert!(PartitionOfSet::new(3, vec![vec![0], vec![1]]).is_err());
        assert!(PartitionOfSet::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(PartitionOfSet::new(3, vec![vec![0, 1, 2], vec![]]).is_err());
    }

    #[test]
    fn s3_refines_to_discrete() {
        let a = s3_on_three_points();
        let part = PartitionOfSet::new(3, vec![vec![0], vec![1, 2]]).unwrap();
        assert!(!is_stable(&a, &part));
        let q = stable_refinement(&a, &part).unwrap();
        assert_eq!(q, PartitionOfSet::discrete(3));
    }

    #[test]
    fn swap_of_two_points_keeps_singletons() {
        let g = Arc::new(catalog::cyclic(2).unwrap());
        let points = vec![Elem(vec![0]), Elem(vec![1])];
        let a = GAction::new(g, points, |g, y| if g == 0 { y } else { 1 - y }, Validation::Full).unwrap();
        let part = PartitionOfSet::discrete(2);
        assert!(is_stable(&a, &part));
        assert_eq!(stable_refinement(&a, &part).unwrap(), part);
    }

    #[test]
    fn orbit_partition_is_a_fixed_point() {
        let h = Arc::new(catalog::heisenberg(2, 1).unwrap());
        let a = GAction::conjugation(h).unwrap();
        let orbits = a.orbit_partition();
        let part = PartitionOfSet::new(a.num_points(), orbits.orbits().to_vec()).unwrap();
        assert!(is_stable(&a, &part));
        assert!(is_stable(&a, &PartitionOfSet::discrete(a.num_points())));
        assert_eq!(stable_refinement(&a, &part).unwrap(), part);
    }
}
