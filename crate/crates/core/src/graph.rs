//! Simple undirected graphs, edge-list ingestion, component extraction and
//! BFS all-pairs shortest paths.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::io::BufRead;

use log::info;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Hop count marking "not reached" during BFS. Real distances stay below it.
const UNREACHED: u16 = u16::MAX;

/// Simple undirected graph on nodes `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

/// Counts of raw input edges removed while building a simple graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Cleaning {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adjacency: vec![Vec::new(); n], edge_count: 0 }
    }

    /// Builds a simple graph, silently dropping self-loops and repeated edges
    /// (in either orientation).
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self::from_edges_counting(n, edges).0
    }

    pub fn from_edges_counting(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> (Self, Cleaning) {
        let mut adjacency = vec![Vec::new(); n];
        let mut cleaning = Cleaning::default();
        let mut raw = 0usize;
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for n = {n}");
            if u == v {
                cleaning.self_loops += 1;
                continue;
            }
            raw += 1;
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut ends = 0usize;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            ends += list.len();
        }
        let edge_count = ends / 2;
        cleaning.duplicates = raw - edge_count;
        (Graph { adjacency, edge_count }, cleaning)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v` in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Canonical edge list: one `u v` line per edge, `u < v`, ascending.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.edge_count * 8);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Connected components as ascending node lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            queue.push_back(root);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components().len() == 1
    }

    pub fn is_tree(&self) -> bool {
        self.n() >= 1 && self.edge_count + 1 == self.n() && self.is_connected()
    }

    /// Subgraph induced by `nodes` (ascending), relabelled `0..nodes.len()` in
    /// the same order.
    pub fn induced(&self, nodes: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (new, &old) in nodes.iter().enumerate() {
            index[old] = new;
        }
        let edges = nodes.iter().flat_map(|&u| {
            let index = &index;
            self.adjacency[u]
                .iter()
                .filter(move |&&w| index[w] != usize::MAX && u < w)
                .map(move |&w| (index[u], index[w]))
        });
        Graph::from_edges(nodes.len(), edges.collect::<Vec<_>>())
    }
}

/// Graph read from an edge list together with the label of every node id.
#[derive(Clone, Debug)]
pub struct ParsedGraph {
    pub graph: Graph,
    /// `labels[id]` is the text token the node had in the input.
    pub labels: Vec<String>,
    pub cleaning: Cleaning,
}

impl ParsedGraph {
    /// Two-column `label id` sidecar, one line per node in id order.
    pub fn label_map(&self) -> String {
        let mut out = String::new();
        for (id, label) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "{label} {id}");
        }
        out
    }
}

/// Reads a whitespace-separated edge list.
///
/// Blank lines and lines starting with `#` or `%` are skipped. Node ids are
/// assigned in order of first appearance. Direction is ignored; self-loops and
/// repeated edges are dropped and counted.
pub fn parse_edge_list(input: impl BufRead) -> Result<ParsedGraph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse { line: i + 1, found: tokens.len() });
        }
        let mut id_of = |tok: &str| {
            if let Some(&id) = ids.get(tok) {
                return id;
            }
            let id = labels.len();
            labels.push(tok.to_owned());
            ids.insert(tok.to_owned(), id);
            id
        };
        let u = id_of(tokens[0]);
        let v = id_of(tokens[1]);
        edges.push((u, v));
    }
    let (graph, cleaning) = Graph::from_edges_counting(labels.len(), edges);
    if cleaning.self_loops + cleaning.duplicates > 0 {
        info!(
            "edge list cleaned: dropped {} self-loops and {} repeated edges",
            cleaning.self_loops, cleaning.duplicates
        );
    }
    Ok(ParsedGraph { graph, labels, cleaning })
}

pub fn parse_edge_list_str(text: &str) -> Result<ParsedGraph> {
    parse_edge_list(text.as_bytes())
}

/// Largest connected component and the original id of each of its nodes.
#[derive(Clone, Debug)]
pub struct Component {
    pub graph: Graph,
    pub original_ids: Vec<usize>,
}

/// Induced subgraph on the largest component. Ties go to the component whose
/// smallest original id is smallest; relabelling preserves relative order.
pub fn largest_connected_component(g: &Graph) -> Component {
    let mut best: Option<Vec<usize>> = None;
    for comp in g.components() {
        if best.as_ref().is_none_or(|b| comp.len() > b.len()) {
            best = Some(comp);
        }
    }
    let nodes = best.unwrap_or_default();
    Component { graph: g.induced(&nodes), original_ids: nodes }
}

/// Dense `n x n` hop-count matrix of a connected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u16>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u16 {
        self.dist[u * self.n + v]
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u16] {
        &self.dist[u * self.n..(u + 1) * self.n]
    }

    pub fn diameter(&self) -> u16 {
        self.dist.iter().copied().max().unwrap_or(0)
    }

    /// Rebuilds the graph whose edges are the pairs at distance one.
    pub fn to_graph(&self) -> Graph {
        let edges = (0..self.n)
            .flat_map(|u| (u + 1..self.n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.get(u, v) == 1);
        Graph::from_edges(self.n, edges.collect::<Vec<_>>())
    }

    /// Wraps a precomputed row-major matrix. Only checks the shape.
    pub fn from_raw(n: usize, dist: Vec<u16>) -> Result<Self> {
        if dist.len() != n * n {
            return Err(Error::domain(format!(
                "distance buffer has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        Ok(DistanceMatrix { n, dist })
    }
}

/// All-pairs hop distances by one breadth-first search per source.
///
/// Rows are filled in parallel; each BFS writes only its own row.
pub fn all_pairs_shortest_paths(g: &Graph) -> Result<DistanceMatrix> {
    let n = g.n();
    if n == 0 {
        return Err(Error::domain("distance matrix of an empty graph"));
    }
    let mut dist = vec![UNREACHED; n * n];
    dist.par_chunks_mut(n).enumerate().try_for_each(|(src, row)| bfs_row(g, src, row))?;
    Ok(DistanceMatrix { n, dist })
}

fn bfs_row(g: &Graph, src: usize, row: &mut [u16]) -> Result<()> {
    let mut queue = VecDeque::with_capacity(row.len());
    row[src] = 0;
    queue.push_back(src);
    let mut reached = 1usize;
    while let Some(u) = queue.pop_front() {
        let next = row[u] + 1;
        if next == UNREACHED {
            return Err(Error::DiameterOverflow);
        }
        for &w in g.neighbors(u) {
            if row[w] == UNREACHED {
                row[w] = next;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    if reached < row.len() {
        let lost = row.iter().position(|&d| d == UNREACHED).unwrap_or(src);
        return Err(Error::Disconnected(src, lost));
    }
    Ok(())
}
