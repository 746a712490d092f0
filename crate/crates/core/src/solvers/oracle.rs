//! Exhaustive enumeration over every non-empty proper attacker set.
//!
//! Subsets are visited by ascending size, then lexicographically, so the first
//! hit for any criterion has minimum cardinality. Exponential in `n`; refused
//! above a configurable guard.

use std::collections::BTreeMap;

use super::{Eq1Solution, GeqSolution, KoptSolution};
use crate::anonymity::{partition_by_representation, AttackerSet};
use crate::error::{Error, Result};
use crate::graph::DistanceMatrix;

pub const DEFAULT_GUARD: usize = 16;

#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    guard: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { guard: DEFAULT_GUARD }
    }
}

/// Calls `visit` on each subset of `0..n` with `1 <= size < n` in
/// (size, lexicographic) order until it returns `true`.
fn for_each_subset(n: usize, mut visit: impl FnMut(&[usize]) -> Result<bool>) -> Result<()> {
    for size in 1..n {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if visit(&idx)? {
                return Ok(());
            }
            // Advance to the next combination.
            let mut i = size;
            while i > 0 && idx[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(())
}

impl Oracle {
    pub fn with_guard(guard: usize) -> Self {
        Oracle { guard }
    }

    fn admit(&self, d: &DistanceMatrix) -> Result<usize> {
        let n = d.n();
        if n > self.guard {
            return Err(Error::OracleGuard { n, guard: self.guard });
        }
        if n < 2 {
            return Err(Error::domain(format!("need at least two nodes, graph has {n}")));
        }
        Ok(n)
    }

    fn set(n: usize, members: &[usize]) -> Result<AttackerSet> {
        AttackerSet::new(members.iter().copied(), n)
    }

    /// First subset with `mu >= k`.
    pub fn geq(&self, d: &DistanceMatrix, k: usize) -> Result<GeqSolution> {
        let n = self.admit(d)?;
        if k == 0 {
            return Err(Error::domain("k must be at least 1"));
        }
        let mut witness = None;
        for_each_subset(n, |m| {
            let s = Self::set(n, m)?;
            if partition_by_representation(d, &s)?.mu() >= k {
                witness = Some(s);
                return Ok(true);
            }
            Ok(false)
        })?;
        Ok(GeqSolution { k, witness })
    }

    /// Maximum `mu` over all subsets, with the first subset attaining it.
    pub fn kopt(&self, d: &DistanceMatrix) -> Result<KoptSolution> {
        let n = self.admit(d)?;
        let mut best: Option<(usize, AttackerSet)> = None;
        for_each_subset(n, |m| {
            let s = Self::set(n, m)?;
            let mu = partition_by_representation(d, &s)?.mu();
            if best.as_ref().is_none_or(|(b, _)| mu > *b) {
                best = Some((mu, s));
            }
            Ok(false)
        })?;
        let (k_opt, witness) = best.expect("n >= 2 yields at least one subset");
        Ok(KoptSolution { k_opt, witness })
    }

    /// First subset leaving some node in a singleton class.
    pub fn eq1(&self, d: &DistanceMatrix) -> Result<Eq1Solution> {
        let n = self.admit(d)?;
        let mut found = None;
        for_each_subset(n, |m| {
            let s = Self::set(n, m)?;
            let p = partition_by_representation(d, &s)?;
            if p.mu() == 1 {
                let isolated = p.classes().iter().find(|c| c.len() == 1).map(|c| c[0]).unwrap_or(0);
                found = Some(Eq1Solution { witness: s, isolated });
                return Ok(true);
            }
            Ok(false)
        })?;
        found.ok_or_else(|| Error::Contract("no subset isolates a node".into()))
    }

    /// Every attainable `mu`, each with its first witness in enumeration order.
    pub fn spectrum(&self, d: &DistanceMatrix) -> Result<BTreeMap<usize, AttackerSet>> {
        let n = self.admit(d)?;
        let mut out = BTreeMap::new();
        for_each_subset(n, |m| {
            let s = Self::set(n, m)?;
            let mu = partition_by_representation(d, &s)?.mu();
            out.entry(mu).or_insert(s);
            Ok(false)
        })?;
        Ok(out)
    }

    /// Visits every subset with its measure; used for exhaustive property checks.
    pub fn for_each_measure(
        &self,
        d: &DistanceMatrix,
        mut visit: impl FnMut(&AttackerSet, usize),
    ) -> Result<()> {
        let n = self.admit(d)?;
        for_each_subset(n, |m| {
            let s = Self::set(n, m)?;
            visit(&s, partition_by_representation(d, &s)?.mu());
            Ok(false)
        })
    }
}

pub fn oracle_brute_force_geq(d: &DistanceMatrix, k: usize) -> Result<GeqSolution> {
    Oracle::default().geq(d, k)
}

pub fn oracle_kopt(d: &DistanceMatrix) -> Result<KoptSolution> {
    Oracle::default().kopt(d)
}

pub fn oracle_eq1(d: &DistanceMatrix) -> Result<Eq1Solution> {
    Oracle::default().eq1(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::graph::{all_pairs_shortest_paths, Graph};

    fn dm(g: &Graph) -> DistanceMatrix {
        all_pairs_shortest_paths(g).unwrap()
    }

    #[test]
    fn subset_order() {
        let mut seen = Vec::new();
        for_each_subset(4, |m| {
            seen.push(m.to_vec());
            Ok(false)
        })
        .unwrap();
        assert_eq!(seen.len(), 14);
        assert_eq!(&seen[..5], &[vec![0], vec![1], vec![2], vec![3], vec![0, 1]]);
        assert_eq!(seen.last().unwrap(), &vec![1, 2, 3]);
    }

    #[test]
    fn geq_examples() {
        let d = dm(&Graph::from_edges(6, [(0, 1), (1, 3), (1, 5), (3, 2), (3, 4), (2, 4)]));
        let s = oracle_brute_force_geq(&d, 1).unwrap();
        assert_eq!(s.witness.unwrap().members(), &[0]);

        assert_eq!(oracle_brute_force_geq(&dm(&families::complete(4)), 3).unwrap().cardinality(), Some(1));

        let s = oracle_brute_force_geq(&dm(&families::star(5)), 5).unwrap();
        assert_eq!(s.witness.unwrap().members(), &[0]);
    }

    #[test]
    fn kopt_examples() {
        assert_eq!(oracle_kopt(&dm(&families::complete(5))).unwrap().k_opt, 4);
        assert_eq!(oracle_kopt(&dm(&families::star(5))).unwrap().k_opt, 5);
        // P5 = 0-1-2-3-4: {2} splits the rest into {1,3} and {0,4}.
        let p5 = oracle_kopt(&dm(&families::path(5))).unwrap();
        assert_eq!(p5.k_opt, 2);
        assert_eq!(p5.witness.members(), &[2]);
    }

    #[test]
    fn eq1_examples() {
        assert_eq!(oracle_eq1(&dm(&families::path(4))).unwrap().cardinality(), 1);
        assert_eq!(oracle_eq1(&dm(&families::cycle(5))).unwrap().cardinality(), 2);
        assert_eq!(oracle_eq1(&dm(&families::cycle(4))).unwrap().cardinality(), 1);
    }

    #[test]
    fn guard_refuses_large_graphs() {
        let d = dm(&families::path(17));
        assert!(matches!(oracle_kopt(&d), Err(Error::OracleGuard { n: 17, guard: 16 })));
        assert!(Oracle::with_guard(17).geq(&d, 1).is_ok());
    }
}
