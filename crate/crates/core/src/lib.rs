//! Active-attack privacy measures for undirected graphs.
//!
//! An attacker controlling a node set `S` observes, for every other node, the
//! vector of hop distances to the members of `S`. Nodes sharing that vector are
//! indistinguishable to the attacker. This crate computes how small the
//! indistinguishable groups can be made, and with how many attacker nodes:
//!
//! * [`anonymity`]: metric representations, equivalence-class partitions and
//!   the measure `mu` (size of the smallest class).
//! * [`solvers`]: minimum attacker sets reaching `mu >= k`, the largest
//!   reachable `k` (`k_opt`), a set-cover approximation for `mu = 1`, and
//!   exhaustive oracles for small graphs.
//! * [`tree`]: constructive descent producing a `k`-antiresolving set for every
//!   `k` up to `k_opt` on trees.
//! * [`generators`]: seeded Erdős–Rényi, Barabási–Albert and uniform-tree
//!   generators.
//! * [`harness`]: per-network summaries, ensemble statistics and their
//!   CSV/JSON output.

pub mod anonymity;
pub mod bitset;
pub mod deadline;
pub mod error;
pub mod families;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod solvers;
pub mod tree;

pub use anonymity::{AttackerSet, ClassPartition, MetricVector};
pub use deadline::Deadline;
pub use error::{Error, Result};
pub use graph::{DistanceMatrix, Graph};
