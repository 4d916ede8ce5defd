#![allow(dead_code)]

use circular_recolour::graph::Graph;

/// Every labelled graph on `n` vertices, in order of edge bitmask.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let m = pairs.len();
    (0u64..1 << m).map(move |mask| {
        let edges: Vec<_> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        Graph::new(n, edges).unwrap()
    })
}

pub fn connected_graphs(n: usize) -> impl Iterator<Item = Graph> {
    all_graphs(n).filter(|g| g.is_connected())
}
