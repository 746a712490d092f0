//! Small named graph families used as fixtures and sanity checks.

use crate::graph::Graph;

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect::<Vec<_>>())
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least three nodes");
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
}

/// Star `K_{1,leaves}`: centre `0`, leaves `1..=leaves`.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i)).collect::<Vec<_>>())
}

/// Wheel `W_{1,rim}`: rim cycle on `0..rim`, hub `rim` adjacent to all of it.
pub fn wheel(rim: usize) -> Graph {
    assert!(rim >= 3, "wheel rim needs at least three nodes");
    let edges = (0..rim).flat_map(|i| [(i, (i + 1) % rim), (i, rim)]);
    Graph::from_edges(rim + 1, edges.collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(complete(5).edge_count(), 10);
        assert_eq!(path(5).edge_count(), 4);
        assert_eq!(cycle(5).edge_count(), 5);
        assert_eq!(star(5).edge_count(), 5);
        let w = wheel(16);
        assert_eq!((w.n(), w.edge_count()), (17, 32));
        assert_eq!(w.degree(16), 16);
    }
}
