use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::Eq1Solution;
use crate::anonymity::AttackerSet;
use crate::bitset::BitSet;
use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::graph::DistanceMatrix;

/// Set-cover instance over elements `0..universe.capacity()`.
#[derive(Clone, Debug)]
pub struct SetCoverInstance {
    pub universe: BitSet,
    /// `(label, elements)`; greedy ties go to the earlier entry.
    pub sets: Vec<(usize, BitSet)>,
}

/// Johnson's greedy cover: repeatedly take the set covering the most
/// still-uncovered elements. Returns the chosen labels in pick order, or
/// `None` when the sets do not cover the universe.
pub fn greedy_set_cover(instance: &SetCoverInstance) -> Option<Vec<usize>> {
    let mut union = BitSet::new(instance.universe.capacity());
    for (_, s) in &instance.sets {
        union.union_with(s);
    }
    if !union.is_superset(&instance.universe) {
        return None;
    }
    let mut uncovered = instance.universe.clone();
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let (mut best, mut gain) = (0usize, 0usize);
        for (i, (_, s)) in instance.sets.iter().enumerate() {
            let g = s.intersection_count(&uncovered);
            if g > gain {
                best = i;
                gain = g;
            }
        }
        let (label, set) = &instance.sets[best];
        chosen.push(*label);
        uncovered.difference_with(set);
    }
    Some(chosen)
}

/// Cover instance for isolating `target`: elements are the other nodes, and
/// choosing attacker `j` covers `j` itself plus every node whose distance to
/// `j` differs from the target's.
pub fn eq1_instance(d: &DistanceMatrix, target: usize) -> SetCoverInstance {
    let n = d.n();
    let mut universe = BitSet::full(n);
    universe.remove(target);
    let sets = (0..n)
        .filter(|&j| j != target)
        .map(|j| {
            let row = d.row(j);
            let here = row[target];
            let mut s = BitSet::new(n);
            s.insert(j);
            for (l, &dl) in row.iter().enumerate() {
                if dl != here {
                    s.insert(l);
                }
            }
            (j, s)
        })
        .collect();
    SetCoverInstance { universe, sets }
}

/// Reference route: builds [`eq1_instance`] for every target and keeps the
/// smallest greedy cover (lowest target id on ties). Quadratic memory per
/// target; meant for cross-checking [`adim_eq1`].
pub fn adim_eq1_explicit(d: &DistanceMatrix) -> Result<Eq1Solution> {
    let n = check(d)?;
    let mut best: Option<(Vec<usize>, usize)> = None;
    for target in 0..n {
        if let Some(cover) = greedy_set_cover(&eq1_instance(d, target)) {
            if best.as_ref().is_none_or(|(b, _)| cover.len() < b.len()) {
                best = Some((cover, target));
            }
        }
    }
    finish(d, best)
}

fn check(d: &DistanceMatrix) -> Result<usize> {
    let n = d.n();
    if n < 2 {
        return Err(Error::domain(format!("need at least two nodes, graph has {n}")));
    }
    Ok(n)
}

fn finish(d: &DistanceMatrix, best: Option<(Vec<usize>, usize)>) -> Result<Eq1Solution> {
    let (cover, isolated) = best.ok_or_else(|| {
        Error::Contract("no target admits a cover, yet a mu = 1 attacker set always exists".into())
    })?;
    Ok(Eq1Solution { witness: AttackerSet::new(cover, d.n())?, isolated })
}

/// Approximate minimum attacker set leaving some node in a class of its own.
///
/// For each target node the greedy cover of [`eq1_instance`] is computed; the
/// smallest cover over all targets is returned (ties: lowest target id). The
/// result is within a factor `ln(n - 1) + 1` of optimal.
///
/// This evaluates the same greedy choices as [`greedy_set_cover`] without
/// materialising the sets: a candidate's gain is the number of still-uncovered
/// nodes whose distance to it differs from the target's, the first step is read
/// off per-row distance histograms, and the uncovered set after the first pick
/// is just the target's class, which is usually tiny.
pub fn adim_eq1(d: &DistanceMatrix) -> Result<Eq1Solution> {
    adim_eq1_within(d, &Deadline::none())
}

pub fn adim_eq1_within(d: &DistanceMatrix, deadline: &Deadline) -> Result<Eq1Solution> {
    let n = check(d)?;
    let diameter = usize::from(d.diameter());
    // histogram[j * (diameter + 1) + h] = #nodes at distance h from j
    let width = diameter + 1;
    let mut histogram = vec![0u32; n * width];
    histogram.par_chunks_mut(width).enumerate().for_each(|(j, hist)| {
        for &h in d.row(j) {
            hist[usize::from(h)] += 1;
        }
    });

    let pack = |size: usize, target: usize| ((size as u64) << 32) | target as u64;
    let best = AtomicU64::new(u64::MAX);
    let covers = (0..n)
        .into_par_iter()
        .map(|target| -> Result<Option<(Vec<usize>, usize)>> {
            deadline.check()?;
            let bound = |size: usize| pack(size, target) > best.load(Ordering::Relaxed);
            if bound(1) {
                return Ok(None);
            }
            let trow = d.row(target);
            let mut first = usize::MAX;
            let mut gain = 0usize;
            for j in (0..n).filter(|&j| j != target) {
                let g = n - histogram[j * width + usize::from(trow[j])] as usize;
                if g > gain {
                    first = j;
                    gain = g;
                }
            }
            let mut chosen = vec![first];
            let frow = d.row(first);
            let mut uncovered: Vec<usize> =
                (0..n).filter(|&l| l != target && frow[l] == frow[target]).collect();
            while !uncovered.is_empty() {
                if bound(chosen.len() + 1) {
                    return Ok(None);
                }
                let (mut pick, mut gain) = (usize::MAX, 0usize);
                for j in (0..n).filter(|&j| j != target) {
                    let row = d.row(j);
                    let here = row[target];
                    let g = uncovered.iter().filter(|&&l| row[l] != here).count();
                    if g > gain {
                        pick = j;
                        gain = g;
                    }
                }
                let row = d.row(pick);
                uncovered.retain(|&l| row[l] == row[target]);
                chosen.push(pick);
            }
            best.fetch_min(pack(chosen.len(), target), Ordering::Relaxed);
            Ok(Some((chosen, target)))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = covers.into_iter().flatten().min_by_key(|(c, t)| (c.len(), *t));
    finish(d, best)
}
