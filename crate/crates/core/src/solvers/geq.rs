use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use super::walk::Walk;
use super::{GeqSolution, KoptSolution};
use crate::anonymity::AttackerSet;
use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::graph::DistanceMatrix;

fn require_pair(d: &DistanceMatrix) -> Result<usize> {
    let n = d.n();
    if n < 2 {
        return Err(Error::domain(format!("need at least two nodes, graph has {n}")));
    }
    Ok(n)
}

/// Minimum-cardinality attacker set with `mu >= k`.
///
/// Every node is tried as a start. From `V' = {start}` the loop repeatedly
/// checks the measure of `V \ V'`: once it reaches `k` the start is done,
/// otherwise all classes of minimum size are absorbed into `V'`. The smallest
/// `V'` over all starts wins; equal sizes keep the lowest start id.
///
/// Starts run in parallel. A start is abandoned once its `V'` is larger than
/// the best size found so far, which cannot change the result.
pub fn adim_geq_k(d: &DistanceMatrix, k: usize) -> Result<GeqSolution> {
    adim_geq_k_within(d, k, &Deadline::none())
}

pub fn adim_geq_k_within(d: &DistanceMatrix, k: usize, deadline: &Deadline) -> Result<GeqSolution> {
    let n = require_pair(d)?;
    if k == 0 || k >= n {
        return Err(Error::domain(format!("k = {k} outside 1..={}", n - 1)));
    }
    let best = AtomicUsize::new(usize::MAX);
    let found = (0..n)
        .into_par_iter()
        .map(|start| -> Result<Option<(usize, usize, AttackerSet)>> {
            let mut walk = Walk::new(d, start);
            loop {
                deadline.check()?;
                if walk.size() > best.load(Ordering::Relaxed) {
                    return Ok(None);
                }
                if walk.mu() >= k {
                    best.fetch_min(walk.size(), Ordering::Relaxed);
                    return Ok(Some((walk.size(), start, walk.attacker_set())));
                }
                walk.absorb_minimum();
                if walk.is_exhausted() {
                    return Ok(None);
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let witness =
        found.into_iter().flatten().min_by_key(|(size, start, _)| (*size, *start)).map(|(_, _, set)| set);
    Ok(GeqSolution { k, witness })
}

/// Largest `k` for which [`adim_geq_k`] is feasible, found by binary search
/// over `1..n`. Feasibility is downward closed in `k`, since a set with
/// `mu >= k` also has `mu >= k'` for every `k' <= k`.
pub fn adim_kopt(d: &DistanceMatrix) -> Result<KoptSolution> {
    adim_kopt_within(d, &Deadline::none())
}

pub fn adim_kopt_within(d: &DistanceMatrix, deadline: &Deadline) -> Result<KoptSolution> {
    let n = require_pair(d)?;
    let (mut lo, mut hi) = (1usize, n - 1);
    let mut at_lo: Option<AttackerSet> = None;
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        match adim_geq_k_within(d, mid, deadline)?.witness {
            Some(w) => {
                lo = mid;
                at_lo = Some(w);
            }
            None => hi = mid - 1,
        }
    }
    let witness = match at_lo {
        Some(w) => w,
        None => adim_geq_k_within(d, lo, deadline)?
            .witness
            .ok_or_else(|| Error::Contract("k = 1 must always be feasible".into()))?,
    };
    Ok(KoptSolution { k_opt: lo, witness })
}

/// Minimum cardinality for every `k` at once.
///
/// The absorption sequence from a start node does not depend on `k`; only the
/// stopping point does. Walking every start to exhaustion and recording where
/// its running maximum of `mu` increases gives, for each `k`, the first (and
/// therefore smallest) `V'` that start reaches with `mu >= k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeqProfile {
    n: usize,
    /// `best[k - 1]` = (cardinality, start) for `k` in `1..n`.
    best: Vec<Option<(usize, usize)>>,
}

pub fn geq_profile(d: &DistanceMatrix, deadline: &Deadline) -> Result<GeqProfile> {
    let n = require_pair(d)?;
    let steps = (0..n)
        .into_par_iter()
        .map(|start| -> Result<Vec<(usize, usize)>> {
            let mut walk = Walk::new(d, start);
            let mut seen = 0usize;
            let mut rises = Vec::new();
            while !walk.is_exhausted() {
                deadline.check()?;
                let mu = walk.mu();
                if mu > seen {
                    rises.push((mu, walk.size()));
                    seen = mu;
                }
                walk.absorb_minimum();
            }
            Ok(rises)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best: Vec<Option<(usize, usize)>> = vec![None; n - 1];
    for (start, rises) in steps.iter().enumerate() {
        let mut covered = 0usize;
        for &(mu, size) in rises {
            for slot in &mut best[covered..mu.min(n - 1)] {
                if slot.is_none_or(|(s, _)| size < s) {
                    *slot = Some((size, start));
                }
            }
            covered = mu;
        }
    }
    Ok(GeqProfile { n, best })
}

impl GeqProfile {
    /// `L` for `mu >= k`, or `None` if infeasible.
    pub fn cardinality(&self, k: usize) -> Option<usize> {
        self.entry(k).map(|(size, _)| size)
    }

    fn entry(&self, k: usize) -> Option<(usize, usize)> {
        if k == 0 {
            return None;
        }
        self.best.get(k - 1).copied().flatten()
    }

    pub fn k_opt(&self) -> usize {
        self.best.iter().rposition(Option::is_some).map_or(0, |i| i + 1)
    }

    /// Replays the winning start to recover the witness for `k`.
    pub fn solution(&self, d: &DistanceMatrix, k: usize) -> Result<GeqSolution> {
        if d.n() != self.n {
            return Err(Error::domain("profile belongs to a different graph"));
        }
        let Some((size, start)) = self.entry(k) else {
            return Ok(GeqSolution { k, witness: None });
        };
        let mut walk = Walk::new(d, start);
        while walk.mu() < k && !walk.is_exhausted() {
            walk.absorb_minimum();
        }
        if walk.size() != size || walk.mu() < k {
            return Err(Error::Contract(format!("profile replay for k = {k} diverged")));
        }
        Ok(GeqSolution { k, witness: Some(walk.attacker_set()) })
    }
}
