use rand::seq::SliceRandom;

use super::{EccSolution, SolverKind};
use crate::graphs::{CliqueCover, UndirectedGraph};
use crate::rng;

/// Greedy edge clique cover.
///
/// Repeatedly takes the uncovered edge with the largest uncovered-degree sum,
/// grows it into a maximal clique preferring vertices that cover the most
/// uncovered edges, then drops cliques whose edges are all covered by the
/// rest. Ties are broken by a vertex priority shuffled from `seed`.
pub fn heuristic_ecc(graph: &UndirectedGraph, seed: u64) -> EccSolution {
    let n = graph.n();
    let mut priority: Vec<usize> = (0..n).collect();
    priority.shuffle(&mut rng::rng(seed));
    // rank[v] is v's position in the shuffled order; lower wins ties
    let mut rank = vec![0usize; n];
    for (pos, &v) in priority.iter().enumerate() {
        rank[v] = pos;
    }

    let mut uncovered = vec![false; n * n];
    let mut unc_deg = vec![0usize; n];
    for &(i, j) in graph.edges() {
        uncovered[i * n + j] = true;
        uncovered[j * n + i] = true;
        unc_deg[i] += 1;
        unc_deg[j] += 1;
    }
    let mut remaining = graph.edge_count();
    let mut cliques: Vec<Vec<usize>> = Vec::new();

    while remaining > 0 {
        let &(u, v) = graph
            .edges()
            .iter()
            .filter(|&&(i, j)| uncovered[i * n + j])
            .max_by_key(|&&(i, j)| {
                (
                    unc_deg[i] + unc_deg[j],
                    std::cmp::Reverse(rank[i].min(rank[j])),
                    std::cmp::Reverse(rank[i].max(rank[j])),
                )
            })
            .expect("remaining > 0");
        let mut clique = vec![u, v];
        let mut candidates: Vec<usize> = graph
            .neighbors(u)
            .filter(|&w| w != v && graph.has_edge(v, w))
            .collect();
        while !candidates.is_empty() {
            let &w = candidates
                .iter()
                .max_by_key(|&&w| {
                    let gain = clique.iter().filter(|&&c| uncovered[w * n + c]).count();
                    (gain, std::cmp::Reverse(rank[w]))
                })
                .expect("nonempty");
            clique.push(w);
            candidates.retain(|&x| x != w && graph.has_edge(w, x));
        }
        for (a, &x) in clique.iter().enumerate() {
            for &y in &clique[a + 1..] {
                if uncovered[x * n + y] {
                    uncovered[x * n + y] = false;
                    uncovered[y * n + x] = false;
                    unc_deg[x] -= 1;
                    unc_deg[y] -= 1;
                    remaining -= 1;
                }
            }
        }
        clique.sort_unstable();
        cliques.push(clique);
    }

    // Redundancy pass: drop any clique whose edges are all covered elsewhere.
    let mut count = vec![0u32; n * n];
    let pairs = |c: &[usize]| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, &x) in c.iter().enumerate() {
            for &y in &c[a + 1..] {
                out.push((x, y));
            }
        }
        out
    };
    for c in &cliques {
        for (x, y) in pairs(c) {
            count[x * n + y] += 1;
        }
    }
    let mut keep = vec![true; cliques.len()];
    for (idx, c) in cliques.iter().enumerate() {
        let ps = pairs(c);
        if ps.iter().all(|&(x, y)| count[x * n + y] >= 2) {
            keep[idx] = false;
            for (x, y) in ps {
                count[x * n + y] -= 1;
            }
        }
    }
    let cliques = cliques
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect();

    EccSolution {
        cover: CliqueCover::new(n, cliques).expect("cliques are valid by construction"),
        is_certified_minimum: false,
        minimum_covers_found: None,
        minimum_covers: None,
        solver: SolverKind::Heuristic,
        fallback: None,
        nodes_expanded: 0,
    }
}
