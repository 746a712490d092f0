//! Solvers for the three attacker-set problems.
//!
//! * [`adim_geq_k`]: minimum attacker set with `mu >= k` (greedy class
//!   absorption from every start node).
//! * [`adim_kopt`]: the largest feasible `k`, by binary search over
//!   [`adim_geq_k`]; [`geq_profile`] gets every `k` in one pass.
//! * [`adim_eq1`]: approximate minimum attacker set isolating one node, via
//!   greedy set cover per target node.
//! * [`oracle`]: exhaustive enumeration for small graphs.

mod eq1;
mod geq;
pub mod oracle;
mod walk;

use serde::{Deserialize, Serialize};

use crate::anonymity::AttackerSet;

pub use eq1::{
    adim_eq1, adim_eq1_explicit, adim_eq1_within, eq1_instance, greedy_set_cover, SetCoverInstance,
};
pub use geq::{adim_geq_k, adim_geq_k_within, adim_kopt, adim_kopt_within, geq_profile, GeqProfile};
pub use oracle::{oracle_brute_force_geq, oracle_eq1, oracle_kopt, Oracle};

/// Answer to "smallest attacker set with `mu >= k`". `witness` is `None` when
/// no attacker set reaches `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeqSolution {
    pub k: usize,
    pub witness: Option<AttackerSet>,
}

impl GeqSolution {
    pub fn feasible(&self) -> bool {
        self.witness.is_some()
    }

    pub fn cardinality(&self) -> Option<usize> {
        self.witness.as_ref().map(AttackerSet::len)
    }

    pub fn record(&self, label: impl Fn(usize) -> String) -> SolutionRecord {
        SolutionRecord {
            problem: Problem::Geq,
            k: self.k,
            feasible: self.feasible(),
            cardinality: self.cardinality(),
            witness: labels(self.witness.as_ref(), label),
            p: 1.0 / self.k as f64,
        }
    }
}

/// Largest `k` reachable by any attacker set, with a minimum-size witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KoptSolution {
    pub k_opt: usize,
    pub witness: AttackerSet,
}

impl KoptSolution {
    pub fn cardinality(&self) -> usize {
        self.witness.len()
    }

    /// Best re-identification probability bound, `1 / k_opt`.
    pub fn p_opt(&self) -> f64 {
        1.0 / self.k_opt as f64
    }

    /// `k_opt / n`.
    pub fn fraction(&self) -> f64 {
        self.k_opt as f64 / self.witness.graph_n() as f64
    }

    pub fn record(&self, label: impl Fn(usize) -> String) -> SolutionRecord {
        SolutionRecord {
            problem: Problem::Kopt,
            k: self.k_opt,
            feasible: true,
            cardinality: Some(self.cardinality()),
            witness: labels(Some(&self.witness), label),
            p: self.p_opt(),
        }
    }
}

/// Attacker set under which at least one node (`isolated`) has a unique
/// metric vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eq1Solution {
    pub witness: AttackerSet,
    pub isolated: usize,
}

impl Eq1Solution {
    pub fn cardinality(&self) -> usize {
        self.witness.len()
    }

    pub fn record(&self, label: impl Fn(usize) -> String) -> SolutionRecord {
        SolutionRecord {
            problem: Problem::Eq1,
            k: 1,
            feasible: true,
            cardinality: Some(self.cardinality()),
            witness: labels(Some(&self.witness), label),
            p: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Kopt,
    Geq,
    Eq1,
    TreeChain,
}

impl Problem {
    /// Whether a witness with measure `mu` satisfies this problem at `k`.
    pub fn accepts(self, k: usize, mu: usize) -> bool {
        match self {
            Problem::Geq => mu >= k,
            Problem::Kopt | Problem::TreeChain => mu == k,
            Problem::Eq1 => k == 1 && mu == 1,
        }
    }
}

/// Stable serialized form of any solution. Witness entries are node labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub problem: Problem,
    pub k: usize,
    pub feasible: bool,
    pub cardinality: Option<usize>,
    pub witness: Vec<String>,
    pub p: f64,
}

fn labels(set: Option<&AttackerSet>, label: impl Fn(usize) -> String) -> Vec<String> {
    set.map(|s| s.members().iter().map(|&v| label(v)).collect()).unwrap_or_default()
}
