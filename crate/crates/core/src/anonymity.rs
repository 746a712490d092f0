//! Metric representations with respect to an attacker set, the partition of
//! the remaining nodes into indistinguishable classes, and the measure `mu`.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::DistanceMatrix;

/// Non-empty proper subset of the nodes, kept in strictly ascending order.
///
/// The order fixes the coordinate order of every [`MetricVector`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AttackerSet {
    members: Vec<usize>,
    #[serde(skip)]
    graph_n: usize,
}

impl AttackerSet {
    /// Sorts and deduplicates `members`; rejects empty, full, or out-of-range sets.
    pub fn new(members: impl IntoIterator<Item = usize>, graph_n: usize) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::InvalidAttackerSet("attacker set is empty".into()));
        }
        if members.len() >= graph_n {
            return Err(Error::InvalidAttackerSet(format!(
                "attacker set of size {} leaves no node outside it (n = {graph_n})",
                members.len()
            )));
        }
        if let Some(&bad) = members.iter().find(|&&v| v >= graph_n) {
            return Err(Error::InvalidAttackerSet(format!("node {bad} out of range for n = {graph_n}")));
        }
        Ok(AttackerSet { members, graph_n })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn graph_n(&self) -> usize {
        self.graph_n
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Nodes outside the set, ascending.
    pub fn complement(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.graph_n - self.members.len());
        let mut it = self.members.iter().peekable();
        for v in 0..self.graph_n {
            if it.peek() == Some(&&v) {
                it.next();
            } else {
                out.push(v);
            }
        }
        out
    }
}

/// Hop distances from one node to each attacker-set member, in member order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MetricVector(Vec<u16>);

impl MetricVector {
    pub fn coords(&self) -> &[u16] {
        &self.0
    }
}

impl fmt::Display for MetricVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

fn check_fits(d: &DistanceMatrix, s: &AttackerSet) -> Result<()> {
    if s.graph_n() != d.n() {
        return Err(Error::InvalidAttackerSet(format!(
            "attacker set indexes a graph of {} nodes, distance matrix has {}",
            s.graph_n(),
            d.n()
        )));
    }
    Ok(())
}

pub fn metric_representation(d: &DistanceMatrix, v: usize, s: &AttackerSet) -> Result<MetricVector> {
    check_fits(d, s)?;
    if v >= d.n() {
        return Err(Error::domain(format!("node {v} out of range for n = {}", d.n())));
    }
    if s.contains(v) {
        return Err(Error::NodeInAttackerSet(v));
    }
    let row = d.row(v);
    Ok(MetricVector(s.members().iter().map(|&a| row[a]).collect()))
}

/// Partition of the nodes outside an attacker set by equal metric vectors.
///
/// Classes are listed in lexicographic order of their vectors; each class is
/// ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassPartition {
    classes: Vec<Vec<usize>>,
    vectors: Vec<MetricVector>,
    mu: usize,
    attacker: AttackerSet,
}

impl ClassPartition {
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Defining vector of each class, parallel to [`Self::classes`].
    pub fn vectors(&self) -> &[MetricVector] {
        &self.vectors
    }

    /// Size of the smallest class.
    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn attacker(&self) -> &AttackerSet {
        &self.attacker
    }

    /// Index of the class holding `v`, or `None` for attacker-set members.
    pub fn class_of(&self, v: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.binary_search(&v).is_ok())
    }
}

/// One `repr=(a,b,...) -> [u, v, ...]` line per class.
impl fmt::Display for ClassPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (vector, class) in self.vectors.iter().zip(&self.classes) {
            write!(f, "repr={vector} -> [")?;
            for (i, v) in class.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("]\n")?;
        }
        Ok(())
    }
}

pub fn partition_by_representation(d: &DistanceMatrix, s: &AttackerSet) -> Result<ClassPartition> {
    check_fits(d, s)?;
    let t = s.len();
    let outside = s.complement();
    // One flat buffer; the map keys borrow slices of it.
    let mut coords = Vec::with_capacity(outside.len() * t);
    for &v in &outside {
        let row = d.row(v);
        coords.extend(s.members().iter().map(|&a| row[a]));
    }
    let mut groups: HashMap<&[u16], Vec<usize>> = HashMap::new();
    for (i, &v) in outside.iter().enumerate() {
        groups.entry(&coords[i * t..(i + 1) * t]).or_default().push(v);
    }
    let mut keyed: Vec<(&[u16], Vec<usize>)> = groups.into_iter().collect();
    keyed.sort_unstable_by(|a, b| a.0.cmp(b.0));
    let mu = keyed.iter().map(|(_, c)| c.len()).min().unwrap_or(0);
    let (vectors, classes) =
        keyed.into_iter().map(|(key, class)| (MetricVector(key.to_vec()), class)).unzip();
    Ok(ClassPartition { classes, vectors, mu, attacker: s.clone() })
}

/// `mu` of the partition induced by `s`.
pub fn measure(d: &DistanceMatrix, s: &AttackerSet) -> Result<usize> {
    Ok(partition_by_representation(d, s)?.mu())
}

/// True exactly when `s` is a `k`-antiresolving set, i.e. its measure is `k`.
pub fn verify_k_antiresolving(d: &DistanceMatrix, s: &AttackerSet, k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    Ok(measure(d, s)? == k)
}
