//! Seeded random graph models.
//!
//! Every sample draws from its own ChaCha8 stream keyed by
//! `(seed, sample index, attempt)`, so samples are reproducible individually
//! and can be generated in any order or in parallel.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Attempts before giving up on `require_connected`.
const MAX_ATTEMPTS: u32 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Erdős–Rényi `G(n, p)`.
    Er,
    /// Barabási–Albert preferential attachment `G(n, q)`.
    Ba,
    /// Uniform labelled tree.
    Tree,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Er => "er",
            Model::Ba => "ba",
            Model::Tree => "tree",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "er" => Ok(Model::Er),
            "ba" => Ok(Model::Ba),
            "tree" => Ok(Model::Tree),
            other => Err(Error::domain(format!("unknown model `{other}` (expected er, ba or tree)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub model: Model,
    pub n: usize,
    /// Edge probability for `er`.
    #[serde(default)]
    pub p: f64,
    /// Edges per new node for `ba`.
    #[serde(default)]
    pub q: usize,
    pub seed: u64,
    #[serde(default)]
    pub require_connected: bool,
}

impl GenConfig {
    pub fn er(n: usize, p: f64, seed: u64) -> Self {
        GenConfig { model: Model::Er, n, p, q: 0, seed, require_connected: false }
    }

    pub fn ba(n: usize, q: usize, seed: u64) -> Self {
        GenConfig { model: Model::Ba, n, p: 0.0, q, seed, require_connected: false }
    }

    pub fn tree(n: usize, seed: u64) -> Self {
        GenConfig { model: Model::Tree, n, p: 0.0, q: 0, seed, require_connected: false }
    }

    pub fn connected(mut self) -> Self {
        self.require_connected = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.model {
            Model::Er => {
                if !(0.0..=1.0).contains(&self.p) {
                    return Err(Error::domain(format!("p = {} outside [0, 1]", self.p)));
                }
                if self.n as f64 * self.p < 2.5 {
                    warn!(
                        "n*p = {:.3} is below 2.5; sparse ER samples rarely have large connected cores",
                        self.n as f64 * self.p
                    );
                }
            }
            Model::Ba => {
                if self.q == 0 || self.q >= self.n {
                    return Err(Error::domain(format!(
                        "BA needs 1 <= q < n, got q = {}, n = {}",
                        self.q, self.n
                    )));
                }
            }
            Model::Tree => {
                if self.n == 0 {
                    return Err(Error::domain("a tree needs at least one node"));
                }
            }
        }
        Ok(())
    }

    /// Model parameter as it appears in file names (`p` for er, `q` for ba).
    pub fn param_tag(&self) -> String {
        match self.model {
            Model::Er => format!("{}", self.p),
            Model::Ba => format!("{}", self.q),
            Model::Tree => "0".into(),
        }
    }

    /// `model_n_param_seed_index.txt`
    pub fn file_name(&self, index: u64) -> String {
        format!("{}_{}_{}_{}_{}.txt", self.model, self.n, self.param_tag(), self.seed, index)
    }
}

/// RNG for one attempt of one sample.
pub fn sample_rng(seed: u64, index: u64, attempt: u32) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    key[16..20].copy_from_slice(&attempt.to_le_bytes());
    key[20..].copy_from_slice(b"adim-sample\0");
    ChaCha8Rng::from_seed(key)
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub graph: Graph,
    /// Rejected attempts before the returned graph (only with `require_connected`).
    pub retries: u32,
}

/// Draws sample `index` of the ensemble described by `cfg`.
pub fn generate(cfg: &GenConfig, index: u64) -> Result<Generated> {
    cfg.validate()?;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = sample_rng(cfg.seed, index, attempt);
        let graph = match cfg.model {
            Model::Er => gen_erdos_renyi(cfg.n, cfg.p, &mut rng),
            Model::Ba => gen_barabasi_albert(cfg.n, cfg.q, &mut rng),
            Model::Tree => gen_random_tree(cfg.n, &mut rng),
        };
        if !cfg.require_connected || graph.is_connected() {
            return Ok(Generated { graph, retries: attempt });
        }
    }
    Err(Error::domain(format!(
        "no connected sample after {MAX_ATTEMPTS} attempts for {} n={} p={} q={}",
        cfg.model, cfg.n, cfg.p, cfg.q
    )))
}

/// Each pair `i < j`, visited in row order, is an edge with probability `p`.
pub fn gen_erdos_renyi(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Preferential attachment with a list of repeated nodes.
///
/// Starts from `q` isolated seed nodes, each listed once. Every new node picks
/// `q` distinct targets by drawing uniformly from the list (a node appears
/// once per incident edge plus once on arrival), rejecting repeats within the
/// batch, then the new node and its targets are appended to the list.
pub fn gen_barabasi_albert(n: usize, q: usize, rng: &mut impl Rng) -> Graph {
    assert!(q >= 1 && q < n, "BA needs 1 <= q < n");
    let mut repeated: Vec<usize> = (0..q).collect();
    let mut edges = Vec::with_capacity(q * (n - q));
    let mut picked = Vec::with_capacity(q);
    for w in q..n {
        picked.clear();
        while picked.len() < q {
            let u = repeated[rng.gen_range(0..repeated.len())];
            if !picked.contains(&u) {
                picked.push(u);
            }
        }
        for &u in &picked {
            edges.push((u, w));
        }
        repeated.push(w);
        repeated.extend_from_slice(&picked);
    }
    Graph::from_edges(n, edges)
}

/// Uniform labelled tree from a random Prüfer sequence.
pub fn gen_random_tree(n: usize, rng: &mut impl Rng) -> Graph {
    match n {
        0 | 1 => Graph::empty(n),
        2 => Graph::from_edges(2, [(0, 1)]),
        _ => {
            let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
            Graph::from_edges(n, prufer_decode(n, &code))
        }
    }
}

/// Edges of the tree on `0..n` with Prüfer code `code` (length `n - 2`).
pub fn prufer_decode(n: usize, code: &[usize]) -> Vec<(usize, usize)> {
    assert_eq!(code.len() + 2, n, "Prüfer code must have length n - 2");
    let mut degree = vec![1usize; n];
    for &c in code {
        degree[c] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in code {
        let Reverse(leaf) = leaves.pop().expect("a tree always has a leaf");
        edges.push((leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.push(Reverse(c));
        }
    }
    let Reverse(a) = leaves.pop().expect("two nodes remain");
    let Reverse(b) = leaves.pop().expect("two nodes remain");
    edges.push((a, b));
    edges
}
