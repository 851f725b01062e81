use crate::graphs::UndirectedGraph;

pub(crate) fn adjacency_masks(graph: &UndirectedGraph) -> Vec<u64> {
    debug_assert!(graph.n() <= 64);
    let mut adj = vec![0u64; graph.n()];
    for &(i, j) in graph.edges() {
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    adj
}

pub(crate) fn mask_to_vertices(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

/// Maximal cliques with at least one edge, as vertex bitmasks, in the order
/// Bron–Kerbosch with Tomita pivoting emits them. Requires `n <= 64`.
pub(crate) fn maximal_clique_masks(adj: &[u64]) -> Vec<u64> {
    let n = adj.len();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut out = Vec::new();
    bron_kerbosch(adj, 0, all, 0, &mut out);
    out.retain(|c| c.count_ones() >= 2);
    out
}

fn bron_kerbosch(adj: &[u64], r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let pivot = mask_to_vertices(p | x)
        .into_iter()
        .max_by_key(|&u| ((p & adj[u]).count_ones(), std::cmp::Reverse(u)))
        .expect("p is nonempty");
    let mut candidates = p & !adj[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        let bit = 1u64 << v;
        candidates &= !bit;
        bron_kerbosch(adj, r | bit, p & adj[v], x & adj[v], out);
        p &= !bit;
        x |= bit;
    }
}

/// Maximal cliques of `graph` (ignoring isolated vertices), each sorted,
/// listed in lexicographic order.
///
/// # Panics
/// If the graph has more than 64 vertices.
pub fn maximal_cliques(graph: &UndirectedGraph) -> Vec<Vec<usize>> {
    assert!(graph.n() <= 64, "maximal_cliques supports at most 64 vertices");
    let mut out: Vec<Vec<usize>> = maximal_clique_masks(&adjacency_masks(graph))
        .into_iter()
        .map(mask_to_vertices)
        .collect();
    out.sort();
    out
}
