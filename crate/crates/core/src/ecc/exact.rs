use std::collections::BTreeSet;

use super::cliques::{adjacency_masks, mask_to_vertices, maximal_clique_masks};
use super::{heuristic_ecc, EccSolution, SolverKind, EXACT_HARD_LIMIT};
use crate::graphs::{CliqueCover, UndirectedGraph};
use crate::{NcfaError, Result};

/// Bitset over edge indices.
#[derive(Clone, PartialEq, Eq)]
struct EdgeSet(Vec<u64>);

impl EdgeSet {
    fn empty(len: usize) -> Self {
        EdgeSet(vec![0; len.div_ceil(64)])
    }

    fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for e in 0..len {
            s.insert(e);
        }
        s
    }

    fn insert(&mut self, e: usize) {
        self.0[e / 64] |= 1 << (e % 64);
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn remove_all(&mut self, other: &EdgeSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn union_with(&mut self, other: &EdgeSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            mask_to_vertices(w).into_iter().map(move |b| i * 64 + b)
        })
    }
}

struct Search {
    /// Edge set of each maximal clique.
    clique_edges: Vec<EdgeSet>,
    /// Maximal cliques containing each edge.
    cliques_of_edge: Vec<Vec<usize>>,
    /// Edges sharing some maximal clique with each edge (itself included).
    compatible: Vec<EdgeSet>,
    enumerate: bool,
    best: usize,
    first_best: Option<Vec<usize>>,
    all_best: BTreeSet<Vec<usize>>,
    nodes: u64,
}

impl Search {
    /// Greedy packing of uncovered edges no two of which fit in one clique.
    fn lower_bound(&self, uncovered: &EdgeSet) -> usize {
        let mut avail = uncovered.clone();
        let mut count = 0;
        while let Some(e) = avail.first() {
            count += 1;
            avail.remove_all(&self.compatible[e]);
        }
        count
    }

    fn run(&mut self, uncovered: &EdgeSet, chosen: &mut Vec<usize>) {
        self.nodes += 1;
        if uncovered.is_empty() {
            let size = chosen.len();
            if size < self.best {
                self.best = size;
                self.first_best = Some(chosen.clone());
                self.all_best.clear();
            }
            if self.enumerate && size == self.best {
                if self.first_best.is_none() {
                    self.first_best = Some(chosen.clone());
                }
                let mut key = chosen.clone();
                key.sort_unstable();
                self.all_best.insert(key);
            }
            return;
        }
        let bound = chosen.len() + self.lower_bound(uncovered);
        let pruned = if self.enumerate {
            bound > self.best
        } else {
            bound >= self.best
        };
        if pruned {
            return;
        }
        let edge = uncovered
            .iter()
            .min_by_key(|&e| self.cliques_of_edge[e].len())
            .expect("uncovered is nonempty");
        for c in self.cliques_of_edge[edge].clone() {
            let mut next = uncovered.clone();
            next.remove_all(&self.clique_edges[c]);
            chosen.push(c);
            self.run(&next, chosen);
            chosen.pop();
        }
    }
}

/// Minimum edge clique cover by branch and bound.
///
/// Branches on the uncovered edge contained in the fewest maximal cliques and
/// prunes with a packing bound. With `enumerate_all`, every minimum cover is
/// collected, including those that use non-maximal cliques (a clique of a
/// minimum cover may shrink as long as the edges only it covers stay
/// covered). Graphs with more than `cap` vertices are refused.
pub fn exact_min_ecc(
    graph: &UndirectedGraph,
    enumerate_all: bool,
    cap: usize,
) -> Result<EccSolution> {
    let n = graph.n();
    if n > cap.min(EXACT_HARD_LIMIT) {
        return Err(NcfaError::SolverRefused {
            n,
            cap: cap.min(EXACT_HARD_LIMIT),
        });
    }
    let edges = graph.edges();
    let m = edges.len();
    if m == 0 {
        return Ok(EccSolution {
            cover: CliqueCover::new(n, Vec::new())?,
            is_certified_minimum: true,
            minimum_covers_found: enumerate_all.then_some(1),
            minimum_covers: enumerate_all.then(|| vec![Vec::new()]),
            solver: SolverKind::Exact,
            fallback: None,
            nodes_expanded: 0,
        });
    }

    let adj = adjacency_masks(graph);
    let cliques = maximal_clique_masks(&adj);
    let mut edge_index = vec![usize::MAX; n * n];
    for (k, &(i, j)) in edges.iter().enumerate() {
        edge_index[i * n + j] = k;
    }
    let clique_edges: Vec<EdgeSet> = cliques
        .iter()
        .map(|&c| {
            let vs = mask_to_vertices(c);
            let mut s = EdgeSet::empty(m);
            for (a, &i) in vs.iter().enumerate() {
                for &j in &vs[a + 1..] {
                    s.insert(edge_index[i * n + j]);
                }
            }
            s
        })
        .collect();
    let mut cliques_of_edge = vec![Vec::new(); m];
    for (c, es) in clique_edges.iter().enumerate() {
        for e in es.iter() {
            cliques_of_edge[e].push(c);
        }
    }
    let compatible = cliques_of_edge
        .iter()
        .map(|cs| {
            let mut s = EdgeSet::empty(m);
            for &c in cs {
                s.union_with(&clique_edges[c]);
            }
            s
        })
        .collect();

    let upper = heuristic_ecc(graph, 0).cover.len();
    let mut search = Search {
        clique_edges,
        cliques_of_edge,
        compatible,
        enumerate: enumerate_all,
        best: if enumerate_all { upper } else { upper + 1 },
        first_best: None,
        all_best: BTreeSet::new(),
        nodes: 0,
    };
    search.run(&EdgeSet::full(m), &mut Vec::new());

    let first = search
        .first_best
        .clone()
        .expect("a cover no larger than the heuristic one exists");
    let cover = CliqueCover::new(
        n,
        first.iter().map(|&c| mask_to_vertices(cliques[c])).collect(),
    )?;

    let minimum_covers = enumerate_all.then(|| {
        let mut all = BTreeSet::new();
        for key in &search.all_best {
            let masks: Vec<u64> = key.iter().map(|&c| cliques[c]).collect();
            for variant in shrink_variants(&adj, &masks) {
                all.insert(variant);
            }
        }
        all.into_iter().collect::<Vec<_>>()
    });

    Ok(EccSolution {
        cover,
        is_certified_minimum: true,
        minimum_covers_found: minimum_covers.as_ref().map(Vec::len),
        minimum_covers,
        solver: SolverKind::Exact,
        fallback: None,
        nodes_expanded: search.nodes,
    })
}

fn edge_mask_pairs(clique: u64) -> Vec<(usize, usize)> {
    let vs = mask_to_vertices(clique);
    let mut out = Vec::new();
    for (a, &i) in vs.iter().enumerate() {
        for &j in &vs[a + 1..] {
            out.push((i, j));
        }
    }
    out
}

/// Every cover obtained from a minimum cover of maximal cliques by shrinking
/// cliques while all edges stay covered, in canonical form.
fn shrink_variants(adj: &[u64], cover: &[u64]) -> Vec<Vec<Vec<usize>>> {
    let n = adj.len();
    let mut count = vec![0u32; n * n];
    for &c in cover {
        for (i, j) in edge_mask_pairs(c) {
            count[i * n + j] += 1;
        }
    }
    // Vertices each clique must keep: endpoints of edges only it covers.
    let required: Vec<u64> = cover
        .iter()
        .map(|&c| {
            edge_mask_pairs(c)
                .into_iter()
                .filter(|&(i, j)| count[i * n + j] == 1)
                .fold(0u64, |acc, (i, j)| acc | (1 << i) | (1 << j))
        })
        .collect();
    let options: Vec<Vec<u64>> = cover
        .iter()
        .zip(&required)
        .map(|(&c, &r)| {
            let free = c & !r;
            // All submasks of `free`, each joined with the required part.
            let mut subs = Vec::new();
            let mut s = free;
            loop {
                subs.push(r | s);
                if s == 0 {
                    break;
                }
                s = (s - 1) & free;
            }
            subs
        })
        .collect();

    let shared: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| count[i * n + j] > 1)
        .collect();

    let mut out = BTreeSet::new();
    let mut pick = vec![0u64; cover.len()];
    fn recurse(
        idx: usize,
        options: &[Vec<u64>],
        shared: &[(usize, usize)],
        pick: &mut Vec<u64>,
        out: &mut BTreeSet<Vec<Vec<usize>>>,
    ) {
        if idx == options.len() {
            let ok = shared.iter().all(|&(i, j)| {
                let both = (1u64 << i) | (1u64 << j);
                pick.iter().any(|&c| c & both == both)
            });
            if ok {
                let mut canon: Vec<Vec<usize>> =
                    pick.iter().map(|&c| mask_to_vertices(c)).collect();
                canon.sort();
                out.insert(canon);
            }
            return;
        }
        for &o in &options[idx] {
            pick[idx] = o;
            recurse(idx + 1, options, shared, pick, out);
        }
    }
    recurse(0, &options, &shared, &mut pick, &mut out);
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecc::fixtures::*;

    #[test]
    fn octahedron_has_two_minimum_covers() {
        let sol = exact_min_ecc(&octahedron(), true, 14).unwrap();
        assert_eq!(sol.cover.len(), 4);
        assert_eq!(sol.minimum_covers_found, Some(2));
        let c1 = zero_based(&[&[1, 3, 4], &[1, 5, 6], &[2, 3, 6], &[2, 4, 5]]);
        let c2 = zero_based(&[&[1, 3, 6], &[1, 4, 5], &[2, 3, 4], &[2, 5, 6]]);
        let mut expected = vec![c1, c2];
        expected.sort();
        assert_eq!(sol.is_identifiable(), Some(false));
        assert_eq!(sol.minimum_covers.unwrap(), expected);
    }

    #[test]
    fn pendant_triangle_is_unique() {
        let sol = exact_min_ecc(&pendant_triangle(), true, 14).unwrap();
        assert_eq!(sol.minimum_covers_found, Some(1));
        assert_eq!(
            sol.cover.canonical(),
            zero_based(&[&[1, 4], &[2, 5], &[3, 6], &[4, 5, 6]])
        );
    }

    #[test]
    fn complete_graph_single_clique() {
        let sol = exact_min_ecc(&UndirectedGraph::complete(7), true, 14).unwrap();
        assert_eq!(sol.cover.cliques(), &[(0..7).collect::<Vec<_>>()]);
        assert_eq!(sol.minimum_covers_found, Some(1));
    }

    #[test]
    fn empty_graph_empty_cover() {
        let sol = exact_min_ecc(&UndirectedGraph::empty(5), true, 14).unwrap();
        assert!(sol.cover.is_empty());
        assert_eq!(sol.minimum_covers_found, Some(1));
    }

    #[test]
    fn non_maximal_variants_are_counted() {
        // Cliques {0,1,3}, {0,2,4} and {0,1,2}: edges 01 and 02 of the last
        // one are covered by the other two, so {1,2} also completes a
        // minimum cover.
        let g = UndirectedGraph::new(5, [(0, 1), (0, 3), (1, 3), (0, 2), (0, 4), (2, 4), (1, 2)])
            .unwrap();
        let sol = exact_min_ecc(&g, true, 14).unwrap();
        assert_eq!(sol.cover.len(), 3);
        assert_eq!(sol.minimum_covers_found, Some(2));
        let covers = sol.minimum_covers.unwrap();
        assert!(covers.contains(&vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 4]]));
        assert!(covers.contains(&vec![vec![0, 1, 3], vec![0, 2, 4], vec![1, 2]]));
    }

    #[test]
    fn refuses_over_cap() {
        assert!(matches!(
            exact_min_ecc(&UndirectedGraph::empty(9), false, 8),
            Err(NcfaError::SolverRefused { n: 9, cap: 8 })
        ));
    }
}
