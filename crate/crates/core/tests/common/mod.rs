#![allow(dead_code)]

use adim_core::generators::{generate, GenConfig};
use adim_core::graph::all_pairs_shortest_paths;
use adim_core::{DistanceMatrix, Graph};

/// Seeded connected graphs with `5 <= n <= 9` and mixed densities.
pub fn small_connected_corpus(count: u64, seed: u64) -> Vec<(Graph, DistanceMatrix)> {
    const DENSITIES: [f64; 4] = [0.3, 0.45, 0.6, 0.8];
    (0..count)
        .map(|i| {
            let n = 5 + (i % 5) as usize;
            let p = DENSITIES[(i / 5 % 4) as usize];
            let g = generate(&GenConfig::er(n, p, seed).connected(), i).unwrap().graph;
            let d = all_pairs_shortest_paths(&g).unwrap();
            (g, d)
        })
        .collect()
}

/// Floyd–Warshall from the adjacency lists; `None` for unreachable pairs.
#[allow(clippy::needless_range_loop)]
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<u32>>> {
    let n = g.n();
    let mut d = vec![vec![None; n]; n];
    for u in 0..n {
        d[u][u] = Some(0);
        for &w in g.neighbors(u) {
            d[u][w] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}
