use ncfa::ecc::{exact_min_ecc, heuristic_ecc, pure_child_ecc, solve, EccConfig, SolveMode};
use ncfa::graphs::{udg_of_mcm, McmGraph, UndirectedGraph};
use ncfa::NcfaError;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn random_graph(n: usize, p: f64, seed: u64) -> UndirectedGraph {
    let mut r = ncfa::rng::rng(seed);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    UndirectedGraph::new(n, pairs.into_iter().filter(|_| r.random_bool(p))).unwrap()
}

/// MCM graph in which each latent owns a pure child; other vertices get a
/// random nonempty parent set.
fn pure_child_udg(seed: u64) -> UndirectedGraph {
    let mut r = ncfa::rng::rng(seed);
    let n = r.random_range(3..=10);
    let k = r.random_range(1..=n.min(5));
    let mut vertices: Vec<usize> = (0..n).collect();
    vertices.shuffle(&mut r);
    let mut rows = vec![vec![false; n]; k];
    for (l, row) in rows.iter_mut().enumerate() {
        row[vertices[l]] = true;
    }
    for &v in &vertices[k..] {
        let mut any = false;
        for row in rows.iter_mut() {
            if r.random_bool(0.4) {
                row[v] = true;
                any = true;
            }
        }
        if !any {
            rows[r.random_range(0..k)][v] = true;
        }
    }
    udg_of_mcm(&McmGraph::from_rows(n, rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_and_heuristic_give_valid_ordered_covers(n in 1usize..=9, p in 0.0f64..1.0, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        let exact = exact_min_ecc(&g, false, 14).unwrap();
        let heur = heuristic_ecc(&g, seed);
        prop_assert!(exact.cover.covers(&g).unwrap());
        prop_assert!(heur.cover.covers(&g).unwrap());
        prop_assert!(exact.is_certified_minimum);
        prop_assert!(exact.cover.len() <= heur.cover.len());
        prop_assert!(exact.cover.len() <= n * n / 4);
        for c in exact.cover.cliques() {
            prop_assert!(g.is_clique(c));
        }
    }

    #[test]
    fn minimum_size_is_label_invariant(n in 2usize..=8, p in 0.0f64..1.0, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ncfa::rng::rng(seed ^ 1));
        let h = g.permuted(&perm).unwrap();
        prop_assert_eq!(
            exact_min_ecc(&g, false, 14).unwrap().cover.len(),
            exact_min_ecc(&h, false, 14).unwrap().cover.len()
        );
    }

    #[test]
    fn enumerated_covers_are_all_minimum(n in 2usize..=7, p in 0.2f64..0.9, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        let sol = exact_min_ecc(&g, true, 14).unwrap();
        let all = sol.minimum_covers.clone().unwrap();
        prop_assert_eq!(all.len(), sol.minimum_covers_found.unwrap());
        for c in &all {
            prop_assert_eq!(c.len(), sol.cover.len());
            let cover = ncfa::graphs::CliqueCover::new(n, c.clone()).unwrap();
            prop_assert!(cover.covers(&g).unwrap());
        }
        prop_assert!(all.contains(&sol.cover.canonical()));
    }

    #[test]
    fn pure_child_matches_exact(seed in any::<u64>()) {
        let g = pure_child_udg(seed);
        let pc = pure_child_ecc(&g).unwrap();
        prop_assert!(pc.is_certified_minimum);
        prop_assert!(pc.cover.covers(&g).unwrap());
        prop_assert_eq!(pc.cover.len(), exact_min_ecc(&g, false, 14).unwrap().cover.len());
    }
}

#[test]
fn pure_child_fallback_on_octahedron() {
    let oct = UndirectedGraph::new(
        6,
        [(0, 1), (0, 2), (0, 4), (0, 5), (1, 2), (1, 3), (1, 5), (2, 3), (2, 4), (3, 4), (3, 5), (4, 5)],
    )
    .unwrap();
    assert!(matches!(pure_child_ecc(&oct), Err(NcfaError::PreconditionViolated(_))));
    let sol = solve(&oct, SolveMode::PureChild, 0, &EccConfig::default()).unwrap();
    assert!(sol.fallback.is_some());
    assert_eq!(sol.cover.len(), 4);
}

#[test]
fn auto_switches_to_heuristic_above_cap() {
    let g = random_graph(20, 0.3, 5);
    let sol = solve(&g, SolveMode::Auto, 1, &EccConfig::default()).unwrap();
    assert!(!sol.is_certified_minimum);
    assert!(sol.cover.covers(&g).unwrap());
    assert!(matches!(
        solve(&g, SolveMode::Exact, 1, &EccConfig::default()),
        Err(NcfaError::SolverRefused { n: 20, cap: 14 })
    ));
}
