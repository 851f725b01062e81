use super::{EccSolution, SolverKind};
use crate::graphs::{CliqueCover, UndirectedGraph};
use crate::{NcfaError, Result};

/// Exact cover for graphs in which every clique of the minimum cover owns a
/// pure child.
///
/// A pure child is simplicial: its closed neighbourhood is a clique. The
/// solver groups simplicial vertices by closed neighbourhood, keeps one per
/// group, greedily picks a maximal pairwise non-adjacent subset and proposes
/// their closed neighbourhoods as the cover. Selected vertices are pairwise
/// non-adjacent, so no clique contains edges of two of them and the proposal
/// is minimum whenever it covers every edge. Otherwise
/// [`NcfaError::PreconditionViolated`] tells the caller to fall back.
pub fn pure_child_ecc(graph: &UndirectedGraph) -> Result<EccSolution> {
    let n = graph.n();
    let closed = |v: usize| -> Vec<usize> {
        let mut nb: Vec<usize> = graph.neighbors(v).collect();
        nb.push(v);
        nb.sort_unstable();
        nb
    };

    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut representatives = Vec::new();
    for v in 0..n {
        if graph.degree(v) == 0 {
            continue;
        }
        let nb = closed(v);
        if graph.is_clique(&nb) && !seen.contains(&nb) {
            seen.push(nb);
            representatives.push(v);
        }
    }

    let mut selected: Vec<usize> = Vec::new();
    for &v in &representatives {
        if selected.iter().all(|&s| !graph.has_edge(s, v)) {
            selected.push(v);
        }
    }

    let cover = CliqueCover::new(n, selected.iter().map(|&v| closed(v)).collect())?;
    if !cover.covers(graph)? {
        return Err(NcfaError::PreconditionViolated(format!(
            "closed neighbourhoods of {} simplicial vertices leave edges uncovered",
            selected.len()
        )));
    }
    Ok(EccSolution {
        cover,
        is_certified_minimum: true,
        minimum_covers_found: None,
        minimum_covers: None,
        solver: SolverKind::PureChild,
        fallback: None,
        nodes_expanded: 0,
    })
}
