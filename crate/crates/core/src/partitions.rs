//! Partitions of the pole set into zero-sum parts.

use std::collections::BTreeMap;
use std::fmt;

use crate::profile::VanishingStructure;
use crate::subset::{full_mask, IndexSubset};

/// A partition of `{1..n}` into parts that each have vanishing residue sum.
/// Parts are ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZeroSumPartition {
    parts: Vec<IndexSubset>,
}

impl ZeroSumPartition {
    pub fn new(mut parts: Vec<IndexSubset>) -> Self {
        parts.sort_by_key(|p| p.first());
        Self { parts }
    }

    pub fn parts(&self) -> &[IndexSubset] {
        &self.parts
    }

    /// Number of parts.
    pub fn s(&self) -> usize {
        self.parts.len()
    }
}

impl fmt::Display for ZeroSumPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Zero-sum partitions grouped by part count, each list sorted lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartitionTable {
    by_s: BTreeMap<usize, Vec<ZeroSumPartition>>,
}

impl PartitionTable {
    /// `S`, the largest part count present.
    pub fn max_s(&self) -> usize {
        self.by_s.keys().next_back().copied().unwrap_or(0)
    }

    pub fn with_s(&self, s: usize) -> &[ZeroSumPartition] {
        self.by_s.get(&s).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[ZeroSumPartition])> {
        self.by_s.iter().map(|(&s, v)| (s, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.by_s.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Every partition of `{1..n}` into parts that are zero-sum under `v`.
///
/// The part holding the smallest uncovered index is chosen among the
/// zero-sum subsets of what remains, recursively.
pub fn enumerate_partitions(v: &VanishingStructure) -> PartitionTable {
    let mut by_s: BTreeMap<usize, Vec<ZeroSumPartition>> = BTreeMap::new();
    for_each_partition(full_mask(v.n()), |part| v.is_zero_sum(part), |parts| {
        by_s.entry(parts.len())
            .or_default()
            .push(ZeroSumPartition { parts: parts.to_vec() });
    });
    for list in by_s.values_mut() {
        list.sort();
    }
    PartitionTable { by_s }
}

/// Visit every set partition of `mask` whose parts all satisfy `accept`.
/// Parts are produced in increasing order of their smallest element.
pub fn for_each_partition<A, V>(mask: u64, accept: A, mut visit: V)
where
    A: Fn(IndexSubset) -> bool,
    V: FnMut(&[IndexSubset]),
{
    let mut stack = Vec::new();
    walk(mask, &accept, &mut visit, &mut stack);
}

fn walk<A, V>(remaining: u64, accept: &A, visit: &mut V, stack: &mut Vec<IndexSubset>)
where
    A: Fn(IndexSubset) -> bool,
    V: FnMut(&[IndexSubset]),
{
    if remaining == 0 {
        visit(stack);
        return;
    }
    let pivot = remaining & remaining.wrapping_neg();
    let rest = remaining ^ pivot;
    // Submasks of `rest`, largest first, ending with the empty set.
    let mut sub = rest;
    loop {
        let part = IndexSubset::from_mask(pivot | sub);
        if accept(part) {
            stack.push(part);
            walk(remaining ^ part.mask(), accept, visit, stack);
            stack.pop();
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
}

/// All set partitions of `{1..n}` into at least `min_parts` blocks.
pub fn set_partitions(n: usize, min_parts: usize) -> Vec<Vec<IndexSubset>> {
    let mut out = Vec::new();
    for_each_partition(full_mask(n), |_| true, |parts| {
        if parts.len() >= min_parts {
            out.push(parts.to_vec());
        }
    });
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ResidueTuple;
    use std::collections::BTreeSet;

    fn s(idx: &[usize]) -> IndexSubset {
        IndexSubset::from_indices(idx.iter().copied()).unwrap()
    }

    /// Stirling numbers of the second kind by the standard recurrence.
    fn stirling2(n: usize, k: usize) -> u64 {
        let mut t = vec![vec![0u64; n + 1]; n + 1];
        t[0][0] = 1;
        for i in 1..=n {
            for j in 1..=i {
                t[i][j] = j as u64 * t[i - 1][j] + t[i - 1][j - 1];
            }
        }
        t[n][k]
    }

    /// All set partitions via restricted growth strings, filtered afterwards.
    fn brute_force(v: &VanishingStructure) -> BTreeSet<Vec<IndexSubset>> {
        let n = v.n();
        let mut out = BTreeSet::new();
        let mut code = vec![0usize; n];
        loop {
            let blocks = code.iter().max().unwrap() + 1;
            let mut parts = vec![0u64; blocks];
            for (i, &c) in code.iter().enumerate() {
                parts[c] |= 1 << i;
            }
            let parts: Vec<IndexSubset> = parts.into_iter().map(IndexSubset::from_mask).collect();
            if parts.iter().all(|&p| v.is_zero_sum(p)) {
                out.insert(parts);
            }
            // next restricted growth string
            let mut i = n - 1;
            loop {
                if i == 0 {
                    return out;
                }
                let prefix_max = code[..i].iter().max().copied().unwrap();
                if code[i] <= prefix_max {
                    code[i] += 1;
                    code[i + 1..].iter_mut().for_each(|c| *c = 0);
                    break;
                }
                i -= 1;
            }
        }
    }

    #[test]
    fn trivial_structure_has_only_the_whole_set() {
        for n in 2..8 {
            let t = enumerate_partitions(&VanishingStructure::trivial(n).unwrap());
            assert_eq!(t.max_s(), 1);
            assert_eq!(t.with_s(1), &[ZeroSumPartition::new(vec![IndexSubset::full(n)])]);
        }
    }

    #[test]
    fn one_pair_forces_its_complement() {
        let v = VanishingStructure::from_generators(4, &[s(&[1, 2])]).unwrap();
        let t = enumerate_partitions(&v);
        assert_eq!(t.max_s(), 2);
        assert_eq!(t.with_s(1).len(), 1);
        assert_eq!(t.with_s(2), &[ZeroSumPartition::new(vec![s(&[1, 2]), s(&[3, 4])])]);
        assert_eq!(t.with_s(2)[0].to_string(), "{1,2}|{3,4}");
    }

    #[test]
    fn zero_structure_on_three_poles() {
        let t = enumerate_partitions(&VanishingStructure::identically_zero(3).unwrap());
        let counts: Vec<usize> = (1..=3).map(|s| t.with_s(s).len()).collect();
        assert_eq!(counts, vec![1, 3, 1]);
        assert_eq!(t.len(), 5);
        assert_eq!(t.max_s(), 3);
    }

    #[test]
    fn zero_structure_counts_are_stirling_numbers() {
        for n in 2..=7 {
            let t = enumerate_partitions(&VanishingStructure::identically_zero(n).unwrap());
            for k in 1..=n {
                assert_eq!(t.with_s(k).len() as u64, stirling2(n, k), "S({n},{k})");
            }
        }
    }

    #[test]
    fn pivot_enumeration_matches_brute_force() {
        // A spread of structures, including every realized 2- and 3-generator one on n = 5.
        let mut structures = vec![];
        for n in 2..=7 {
            structures.push(VanishingStructure::trivial(n).unwrap());
            structures.push(VanishingStructure::identically_zero(n).unwrap());
        }
        let cands: Vec<u64> = (1..31u64).step_by(2).collect();
        for &g1 in &cands {
            for &g2 in &cands {
                let gens = [IndexSubset::from_mask(g1), IndexSubset::from_mask(g2)];
                structures.push(VanishingStructure::from_generators(5, &gens).unwrap());
            }
        }
        structures.push(VanishingStructure::from_generators(7, &[s(&[1, 2]), s(&[3, 4]), s(&[5, 6, 7])]).unwrap());
        structures.push(VanishingStructure::from_generators(6, &[s(&[1]), s(&[2, 3])]).unwrap());
        for v in &structures {
            let t = enumerate_partitions(v);
            let mut seen = BTreeSet::new();
            for (_, list) in t.iter() {
                for p in list {
                    assert!(seen.insert(p.parts().to_vec()), "duplicate {p}");
                }
            }
            assert_eq!(seen, brute_force(v), "structure {v}");
        }
    }

    #[test]
    fn parts_vanish_on_a_realized_tuple() {
        let v = VanishingStructure::from_generators(6, &[s(&[1, 2]), s(&[3, 4])]).unwrap();
        let rho: ResidueTuple = v.realize(11).unwrap();
        for (_, list) in enumerate_partitions(&v).iter() {
            for p in list {
                for part in p.parts() {
                    let sum: crate::arith::GaussianRational = part.indices().map(|i| &rho.values()[i - 1]).sum();
                    assert!(num_traits::Zero::is_zero(&sum));
                }
            }
        }
    }

    #[test]
    fn output_is_sorted() {
        let t = enumerate_partitions(&VanishingStructure::identically_zero(4).unwrap());
        for (_, list) in t.iter() {
            assert!(list.windows(2).all(|w| w[0] < w[1]));
            for p in list {
                assert!(p.parts().windows(2).all(|w| w[0].first() < w[1].first()));
            }
        }
    }

    #[test]
    fn set_partitions_counts_bell_numbers() {
        let bell = [1usize, 1, 2, 5, 15, 52, 203];
        for (n, &count) in bell.iter().enumerate().skip(1) {
            assert_eq!(set_partitions(n, 1).len(), count);
            assert_eq!(set_partitions(n, 2).len(), count - 1);
        }
    }
}
