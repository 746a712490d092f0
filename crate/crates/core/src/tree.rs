//! `k`-antiresolving sets for every `k <= k_opt` on trees.
//!
//! In a tree, an attacker set `S` with measure at least 2 induces a connected
//! subtree. The nodes outside it then hang off boundary nodes `v` of `S`, and
//! every node of a branch at `v` sees `S` only through `v`: its metric vector is
//! fixed by its depth below `v`. The classes are therefore exactly the depth
//! levels `A_j` of each boundary node's branches, and absorbing whole branches
//! at `v` shrinks the levels of `v` while leaving every other class alone.
//!
//! [`descend_one`] uses that to turn a set of measure `k'` into one of measure
//! `k' - 1`; [`antiresolving_chain`] repeats it down to any target.

use std::collections::VecDeque;

use log::warn;

use crate::anonymity::{measure, partition_by_representation, AttackerSet};
use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Graph};
use crate::solvers::{adim_eq1, adim_geq_k, adim_kopt};

/// Most branches at one boundary node for which every branch subset is tried.
const SUBSET_SEARCH_LIMIT: usize = 16;

/// One subtree hanging off the root: the root's neighbour `child` outside `S`
/// and all of its descendants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub child: usize,
    /// Branch nodes without the root, ascending.
    pub nodes: Vec<usize>,
    /// Largest depth below the root inside this branch.
    pub eccentricity: usize,
    /// `level_sizes[j - 1]` = number of branch nodes at depth `j`.
    pub level_sizes: Vec<usize>,
}

/// A boundary node of `S` with its outside branches and their depth levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedView {
    pub root: usize,
    pub branches: Vec<Branch>,
    /// `levels[j - 1]` = all branch nodes at depth `j` (the level `A_j`).
    pub levels: Vec<Vec<usize>>,
}

impl RootedView {
    /// Branches of `root` through its neighbours outside `in_set`, in
    /// ascending neighbour order.
    pub fn new(tree: &Graph, in_set: &[bool], root: usize) -> Self {
        let mut branches = Vec::new();
        let mut levels: Vec<Vec<usize>> = Vec::new();
        let mut depth = vec![usize::MAX; tree.n()];
        depth[root] = 0;
        for &child in tree.neighbors(root).iter().filter(|&&c| !in_set[c]) {
            let mut nodes = Vec::new();
            let mut level_sizes = Vec::new();
            let mut queue = VecDeque::from([child]);
            depth[child] = 1;
            while let Some(u) = queue.pop_front() {
                let du = depth[u];
                nodes.push(u);
                if level_sizes.len() < du {
                    level_sizes.resize(du, 0);
                }
                level_sizes[du - 1] += 1;
                if levels.len() < du {
                    levels.resize(du, Vec::new());
                }
                levels[du - 1].push(u);
                for &w in tree.neighbors(u) {
                    if depth[w] == usize::MAX {
                        depth[w] = du + 1;
                        queue.push_back(w);
                    }
                }
            }
            nodes.sort_unstable();
            branches.push(Branch { child, nodes, eccentricity: level_sizes.len(), level_sizes });
        }
        for level in &mut levels {
            level.sort_unstable();
        }
        RootedView { root, branches, levels }
    }

    pub fn all_eccentricities_equal(&self) -> bool {
        self.branches.windows(2).all(|w| w[0].eccentricity == w[1].eccentricity)
    }

    fn absorb(&self, s: &AttackerSet, chosen: impl IntoIterator<Item = usize>) -> Result<AttackerSet> {
        let mut members = s.members().to_vec();
        for b in chosen {
            members.extend_from_slice(&self.branches[b].nodes);
        }
        AttackerSet::new(members, s.graph_n())
    }
}

/// Whether `members` induces a connected subgraph of `g`.
pub fn induces_connected(g: &Graph, members: &[usize]) -> bool {
    if members.is_empty() {
        return true;
    }
    let mut inside = vec![false; g.n()];
    members.iter().for_each(|&v| inside[v] = true);
    let mut seen = vec![false; g.n()];
    let mut stack = vec![members[0]];
    seen[members[0]] = true;
    let mut count = 0;
    while let Some(u) = stack.pop() {
        count += 1;
        for &w in g.neighbors(u) {
            if inside[w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    count == members.len()
}

fn tree_of(d: &DistanceMatrix) -> Result<Graph> {
    let g = d.to_graph();
    if !g.is_tree() {
        return Err(Error::domain(format!(
            "input is not a tree ({} nodes, {} edges)",
            g.n(),
            g.edge_count()
        )));
    }
    Ok(g)
}

/// Given `s` with measure exactly `k_prime >= 2`, returns a superset of `s`
/// with measure exactly `k_prime - 1`.
///
/// Boundary nodes of `s` are tried in ascending order, skipping those without
/// a level of size exactly `k_prime`. At each:
/// 1. all branch eccentricities equal: absorb a single branch owning exactly
///    one node of some level (lowest branch first);
/// 2. otherwise absorb branches in ascending eccentricity until the measure
///    drops to `k_prime - 1`;
/// 3. failing both, search subsets of branches (up to
///    16 branches).
///
/// If no boundary node yields a set, small trees fall back to enumerating
/// supersets; larger ones report [`Error::ProofGap`].
pub fn descend_one(d: &DistanceMatrix, s: &AttackerSet, k_prime: usize) -> Result<AttackerSet> {
    let tree = tree_of(d)?;
    descend_in(&tree, d, s, k_prime)
}

fn descend_in(tree: &Graph, d: &DistanceMatrix, s: &AttackerSet, k_prime: usize) -> Result<AttackerSet> {
    if k_prime < 2 {
        return Err(Error::domain(format!("cannot descend below k = 1 (got k' = {k_prime})")));
    }
    let partition = partition_by_representation(d, s)?;
    if partition.mu() != k_prime {
        return Err(Error::Contract(format!(
            "attacker set has measure {}, expected {k_prime}",
            partition.mu()
        )));
    }
    let target = k_prime - 1;
    let accept = |cand: &AttackerSet| -> Result<bool> { Ok(measure(d, cand)? == target) };

    let mut in_set = vec![false; tree.n()];
    s.members().iter().for_each(|&v| in_set[v] = true);
    let boundary = s.members().iter().copied().filter(|&v| tree.neighbors(v).iter().any(|&w| !in_set[w]));

    let mut fallback_roots = Vec::new();
    for v in boundary {
        let view = RootedView::new(tree, &in_set, v);
        if !view.levels.iter().any(|l| l.len() == k_prime) {
            continue;
        }
        if view.all_eccentricities_equal() {
            for (b, branch) in view.branches.iter().enumerate() {
                if branch.level_sizes.contains(&1) {
                    let cand = view.absorb(s, [b])?;
                    if accept(&cand)? {
                        return Ok(cand);
                    }
                }
            }
        } else {
            let mut order: Vec<usize> = (0..view.branches.len()).collect();
            order.sort_by_key(|&b| (view.branches[b].eccentricity, b));
            for t in 1..order.len() {
                let cand = view.absorb(s, order[..t].iter().copied())?;
                let mu = measure(d, &cand)?;
                if mu == target {
                    return Ok(cand);
                }
                if mu < target {
                    break;
                }
            }
        }
        fallback_roots.push(view);
    }

    for view in &fallback_roots {
        if let Some(cand) = search_branch_subsets(d, s, view, &partition, target)? {
            warn!(
                "tree descent from k' = {k_prime}: branch-by-branch absorption stalled at every \
                 boundary node; found a branch subset at node {}",
                view.root
            );
            return Ok(cand);
        }
    }

    if tree.n() <= crate::solvers::oracle::DEFAULT_GUARD {
        warn!("tree descent from k' = {k_prime}: falling back to superset enumeration");
        if let Some(cand) = enumerate_supersets(d, s, target)? {
            return Ok(cand);
        }
    }
    Err(Error::ProofGap(format!(
        "no (k'-1)-antiresolving superset found for k' = {k_prime} at any boundary node"
    )))
}

/// Tries every non-empty proper subset of branches at `view.root`, scoring it by
/// level arithmetic and confirming hits with a full partition.
fn search_branch_subsets(
    d: &DistanceMatrix,
    s: &AttackerSet,
    view: &RootedView,
    partition: &crate::anonymity::ClassPartition,
    target: usize,
) -> Result<Option<AttackerSet>> {
    let r = view.branches.len();
    if r > SUBSET_SEARCH_LIMIT {
        return Ok(None);
    }
    // Smallest class not made of this root's levels; unaffected by absorption.
    let others = partition
        .classes()
        .iter()
        .filter(|c| !view.levels.iter().any(|l| l == *c))
        .map(Vec::len)
        .min()
        .unwrap_or(usize::MAX);
    if others < target {
        return Ok(None);
    }
    let mut masks: Vec<u32> = (1..(1u32 << r)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let mut mu = others;
        for (j, level) in view.levels.iter().enumerate() {
            let removed: usize = (0..r)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| view.branches[b].level_sizes.get(j).copied().unwrap_or(0))
                .sum();
            let left = level.len() - removed;
            if left > 0 {
                mu = mu.min(left);
            }
        }
        if mu != target {
            continue;
        }
        let cand = view.absorb(s, (0..r).filter(|b| mask & (1 << b) != 0))?;
        if cand.len() < s.graph_n() && measure(d, &cand)? == target {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

fn enumerate_supersets(d: &DistanceMatrix, s: &AttackerSet, target: usize) -> Result<Option<AttackerSet>> {
    let outside = s.complement();
    let m = outside.len();
    let mut masks: Vec<u64> = (1..(1u64 << m) - 1).collect();
    masks.sort_by_key(|x| (x.count_ones(), *x));
    for mask in masks {
        let extra = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| outside[i]);
        let cand = AttackerSet::new(s.members().iter().copied().chain(extra), s.graph_n())?;
        if measure(d, &cand)? == target {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

/// A verified `k_target`-antiresolving set of a tree, for any `k_target` in
/// `1..=k'` where `k'` is the tree's `k_opt`.
///
/// `k'` comes straight from the `k_opt` witness and `1` from the `mu = 1`
/// solver. In between, the `k_opt` witness is descended one level at a time;
/// before each descent the current set is swapped for a minimum-cardinality
/// one when the `mu >= level` solver returns a set of measure exactly `level`.
pub fn antiresolving_chain(d: &DistanceMatrix, k_target: usize) -> Result<AttackerSet> {
    let tree = tree_of(d)?;
    let kopt = adim_kopt(d)?;
    let k_prime = kopt.k_opt;
    if k_target == 0 || k_target > k_prime {
        return Err(Error::domain(format!("k = {k_target} outside 1..={k_prime}")));
    }
    let set = if k_target == k_prime {
        kopt.witness
    } else if k_target == 1 {
        adim_eq1(d)?.witness
    } else {
        let mut current = kopt.witness;
        for level in (k_target + 1..=k_prime).rev() {
            current = descend_in(&tree, d, &reminimise(d, current, level)?, level)?;
        }
        current
    };
    confirm(d, set, k_target)
}

/// Witnesses for every `k` in `1..=k'`, index `k - 1`.
pub fn antiresolving_chain_all(d: &DistanceMatrix) -> Result<Vec<AttackerSet>> {
    let tree = tree_of(d)?;
    let kopt = adim_kopt(d)?;
    let k_prime = kopt.k_opt;
    let mut by_level = vec![None; k_prime];
    let mut current = kopt.witness;
    by_level[k_prime - 1] = Some(current.clone());
    for level in (3..=k_prime).rev() {
        current = descend_in(&tree, d, &reminimise(d, current, level)?, level)?;
        by_level[level - 2] = Some(current.clone());
    }
    by_level[0] = Some(adim_eq1(d)?.witness);
    by_level.into_iter().enumerate().map(|(i, s)| confirm(d, s.expect("every level filled"), i + 1)).collect()
}

fn reminimise(d: &DistanceMatrix, current: AttackerSet, level: usize) -> Result<AttackerSet> {
    if let Some(w) = adim_geq_k(d, level)?.witness {
        if w.len() < current.len() && measure(d, &w)? == level {
            return Ok(w);
        }
    }
    Ok(current)
}

fn confirm(d: &DistanceMatrix, set: AttackerSet, k: usize) -> Result<AttackerSet> {
    let mu = measure(d, &set)?;
    if mu != k {
        return Err(Error::Contract(format!("chain produced measure {mu} for k = {k}")));
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::graph::all_pairs_shortest_paths;

    fn set(m: &[usize], n: usize) -> AttackerSet {
        AttackerSet::new(m.iter().copied(), n).unwrap()
    }

    /// Root 0 with four branches, each a path of three nodes below it.
    /// `{0}` has levels of size 4 at depths 1, 2 and 3.
    fn spider() -> Graph {
        let mut edges = Vec::new();
        for b in 0..4 {
            let base = 1 + 3 * b;
            edges.extend([(0, base), (base, base + 1), (base + 1, base + 2)]);
        }
        Graph::from_edges(13, edges)
    }

    #[test]
    fn rooted_view_of_spider() {
        let g = spider();
        let mut in_set = vec![false; 13];
        in_set[0] = true;
        let view = RootedView::new(&g, &in_set, 0);
        assert_eq!(view.branches.len(), 4);
        assert!(view.all_eccentricities_equal());
        assert_eq!(view.levels.iter().map(Vec::len).collect::<Vec<_>>(), vec![4, 4, 4]);
        assert_eq!(view.branches[0].nodes, vec![1, 2, 3]);
        assert_eq!(view.branches[0].level_sizes, vec![1, 1, 1]);
    }

    #[test]
    fn equal_eccentricities_absorb_one_branch() {
        let g = spider();
        let d = all_pairs_shortest_paths(&g).unwrap();
        let s = set(&[0], 13);
        assert_eq!(measure(&d, &s).unwrap(), 4);
        let next = descend_one(&d, &s, 4).unwrap();
        assert_eq!(next.members(), &[0, 1, 2, 3]);
        assert_eq!(measure(&d, &next).unwrap(), 3);
    }

    /// Root 0 with branches of eccentricity 1, 2, 3 and 3 (two paths of
    /// three plus a path of two and a single leaf), levels (4, 3, 2).
    #[test]
    fn unequal_eccentricities() {
        let edges = [(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6), (0, 7), (7, 8), (8, 9)];
        let g = Graph::from_edges(10, edges);
        let d = all_pairs_shortest_paths(&g).unwrap();
        let s = set(&[0], 10);
        let mu = measure(&d, &s).unwrap();
        assert_eq!(mu, 2);
        let next = descend_one(&d, &s, 2).unwrap();
        assert!(next.members().contains(&0));
        assert_eq!(measure(&d, &next).unwrap(), 1);
    }

    #[test]
    fn two_stage_unequal_absorption() {
        // Levels at root 0: branch a = 1 (e=1), branch b = 2-3 (e=2), branches
        // c, d, e = paths of 3. Level sizes (5, 4, 3). k' = 3.
        let mut edges = vec![(0, 1), (0, 2), (2, 3)];
        for b in 0..3 {
            let base = 4 + 3 * b;
            edges.extend([(0, base), (base, base + 1), (base + 1, base + 2)]);
        }
        let g = Graph::from_edges(13, edges);
        let d = all_pairs_shortest_paths(&g).unwrap();
        let s = set(&[0], 13);
        assert_eq!(measure(&d, &s).unwrap(), 3);
        let next = descend_one(&d, &s, 3).unwrap();
        assert_eq!(measure(&d, &next).unwrap(), 2);
        assert!(next.members().starts_with(&[0, 1, 2, 3]));
    }

    #[test]
    fn star_descends_by_one_leaf() {
        let d = all_pairs_shortest_paths(&families::star(5)).unwrap();
        let next = descend_one(&d, &set(&[0], 6), 5).unwrap();
        assert_eq!(next.members(), &[0, 1]);
        assert_eq!(measure(&d, &next).unwrap(), 4);
    }

    #[test]
    fn descend_errors() {
        let d = all_pairs_shortest_paths(&families::star(5)).unwrap();
        assert!(matches!(descend_one(&d, &set(&[0], 6), 4), Err(Error::Contract(_))));
        assert!(matches!(descend_one(&d, &set(&[1], 6), 1), Err(Error::Domain(_))));
        let c = all_pairs_shortest_paths(&families::cycle(5)).unwrap();
        assert!(matches!(descend_one(&c, &set(&[0], 5), 2), Err(Error::Domain(_))));
    }

    #[test]
    fn chain_on_star_and_path() {
        let d = all_pairs_shortest_paths(&families::star(5)).unwrap();
        for k in 1..=5 {
            let s = antiresolving_chain(&d, k).unwrap();
            assert_eq!(measure(&d, &s).unwrap(), k);
        }
        assert!(antiresolving_chain(&d, 6).is_err());
        assert!(antiresolving_chain(&d, 0).is_err());
        let all = antiresolving_chain_all(&d).unwrap();
        assert_eq!(all.len(), 5);

        let p = all_pairs_shortest_paths(&families::path(5)).unwrap();
        let s = antiresolving_chain(&p, 2).unwrap();
        assert_eq!(s.members(), &[2]);
    }

    #[test]
    fn fallbacks_find_the_same_level() {
        let g = spider();
        let d = all_pairs_shortest_paths(&g).unwrap();
        let s = set(&[0], 13);
        let mut in_set = vec![false; 13];
        in_set[0] = true;
        let view = RootedView::new(&g, &in_set, 0);
        let partition = partition_by_representation(&d, &s).unwrap();
        let hit = search_branch_subsets(&d, &s, &view, &partition, 3).unwrap().unwrap();
        assert_eq!(hit.members(), &[0, 1, 2, 3]);
        assert!(search_branch_subsets(&d, &s, &view, &partition, 7).unwrap().is_none());

        let star = all_pairs_shortest_paths(&families::star(5)).unwrap();
        let hit = enumerate_supersets(&star, &set(&[0], 6), 4).unwrap().unwrap();
        assert_eq!(hit.members(), &[0, 1]);
    }

    #[test]
    fn connectivity_helper() {
        let g = families::path(5);
        assert!(induces_connected(&g, &[1, 2, 3]));
        assert!(!induces_connected(&g, &[0, 2]));
        assert!(induces_connected(&g, &[]));
    }
}
