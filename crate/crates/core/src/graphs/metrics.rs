use super::{McmGraph, NcfaGraph, UndirectedGraph};
use crate::{NcfaError, Result};

fn same_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(NcfaError::DimensionMismatch(format!(
            "graphs over {a} and {b} measurement variables"
        )));
    }
    Ok(())
}

/// Structural Frobenius distance ‖B1ᵀB1 − B2ᵀB2‖²_F. The latent counts of the
/// two graphs may differ.
pub fn sfd(b1: &McmGraph, b2: &McmGraph) -> Result<u64> {
    same_n(b1.n(), b2.n())?;
    Ok(b1
        .gram()
        .iter()
        .zip(b2.gram())
        .map(|(x, y)| (x - y).unsigned_abs().pow(2))
        .sum())
}

/// Structural Hamming distance: edges present in exactly one of the graphs.
pub fn shd(u1: &UndirectedGraph, u2: &UndirectedGraph) -> Result<usize> {
    same_n(u1.n(), u2.n())?;
    let n = u1.n();
    let mut count = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if u1.has_edge(i, j) != u2.has_edge(i, j) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Two MCM graphs are ECC-observationally equivalent when they induce the
/// same UDG.
pub fn ecc_equivalent(g1: &McmGraph, g2: &McmGraph) -> Result<bool> {
    same_n(g1.n(), g2.n())?;
    Ok(g1.udg() == g2.udg())
}

/// Upper bound 1 − (1−α)^a (1−β)^e on the probability that a UDG with `e`
/// edges and `a` absent edges is misestimated by tests with type-I rate α and
/// type-II rate β.
pub fn udg_error_bound(a: u64, e: u64, alpha: f64, beta: f64) -> Result<f64> {
    for (name, rate) in [("alpha", alpha), ("beta", beta)] {
        if !(0.0..=1.0).contains(&rate) {
            return Err(NcfaError::InvalidInput(format!(
                "{name} = {rate} is not in [0, 1]"
            )));
        }
    }
    let keep = (1.0 - alpha).powf(a as f64) * (1.0 - beta).powf(e as f64);
    Ok((1.0 - keep).clamp(0.0, 1.0))
}

/// ⌊n²/4⌋, the largest minimum edge clique cover a graph on n vertices can
/// need. Returns 0 for n = 1; callers clamp λ to at least K.
pub fn default_lambda(n: usize) -> usize {
    n * n / 4
}

/// Gives each clique one latent and deals the remaining λ − K round-robin in
/// clique order. λ below K is raised to K.
pub fn assign_latents(mcm: &McmGraph, lambda: usize) -> Result<NcfaGraph> {
    let k = mcm.k();
    if k == 0 {
        return Err(NcfaError::InvalidInput(
            "cannot assign latents to a graph without cliques".into(),
        ));
    }
    let lambda = lambda.max(k);
    let extra = lambda - k;
    let multiplicities = (0..k)
        .map(|i| 1 + extra / k + usize::from(i < extra % k))
        .collect();
    NcfaGraph::new(mcm.clone(), multiplicities)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sfd_examples() -> [McmGraph; 3] {
        [
            McmGraph::from_binary(4, &[&[1, 1, 1, 0], &[0, 1, 1, 1]]).unwrap(),
            McmGraph::from_binary(
                4,
                &[&[1, 1, 0, 0], &[1, 0, 1, 0], &[0, 1, 0, 1], &[0, 0, 1, 1]],
            )
            .unwrap(),
            McmGraph::from_binary(4, &[&[1, 1, 1, 0], &[0, 0, 1, 1]]).unwrap(),
        ]
    }

    #[test]
    fn sfd_table() {
        let [b1, b2, b3] = sfd_examples();
        assert_eq!(sfd(&b1, &b2).unwrap(), 10);
        assert_eq!(sfd(&b1, &b3).unwrap(), 5);
        assert_eq!(sfd(&b2, &b3).unwrap(), 7);
        assert_eq!(sfd(&b2, &b2).unwrap(), 0);
        let (u1, u2, u3) = (b1.udg(), b2.udg(), b3.udg());
        assert_eq!(shd(&u1, &u2).unwrap(), 1);
        assert_eq!(shd(&u1, &u3).unwrap(), 1);
        assert_eq!(shd(&u2, &u3).unwrap(), 2);
        assert_eq!(shd(&u1, &u1).unwrap(), 0);
    }

    #[test]
    fn shd_empty_vs_complete() {
        assert_eq!(
            shd(&UndirectedGraph::empty(4), &UndirectedGraph::complete(4)).unwrap(),
            6
        );
        assert!(shd(&UndirectedGraph::empty(4), &UndirectedGraph::empty(5)).is_err());
    }

    #[test]
    fn sfd_rejects_mismatch() {
        let a = McmGraph::from_binary(2, &[&[1, 1]]).unwrap();
        let b = McmGraph::from_binary(3, &[&[1, 1, 1]]).unwrap();
        assert!(sfd(&a, &b).is_err());
        assert!(ecc_equivalent(&a, &b).is_err());
    }

    #[test]
    fn octahedron_covers_are_equivalent() {
        let g = McmGraph::from_binary(
            6,
            &[
                &[1, 0, 1, 1, 0, 0],
                &[1, 0, 0, 0, 1, 1],
                &[0, 1, 1, 0, 0, 1],
                &[0, 1, 0, 1, 1, 0],
            ],
        )
        .unwrap();
        let h = McmGraph::from_binary(
            6,
            &[
                &[1, 0, 1, 0, 0, 1],
                &[1, 0, 0, 1, 1, 0],
                &[0, 1, 1, 1, 0, 0],
                &[0, 1, 0, 0, 1, 1],
            ],
        )
        .unwrap();
        assert!(ecc_equivalent(&g, &h).unwrap());
        assert!(ecc_equivalent(&g, &g).unwrap());
        // Both covers hit every edge once and every vertex twice, so the
        // Gram matrices coincide even though no latent is shared.
        assert_eq!(sfd(&g, &h).unwrap(), 0);

        let [b1, ..] = sfd_examples();
        let ident = McmGraph::from_binary(
            4,
            &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]],
        )
        .unwrap();
        assert!(!ecc_equivalent(&b1, &ident).unwrap());
    }

    #[test]
    fn error_bound_values() {
        assert!((udg_error_bound(1, 0, 0.05, 0.7).unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(udg_error_bound(0, 0, 0.3, 0.3).unwrap(), 0.0);
        let direct = udg_error_bound(36, 9, 0.05, 0.1).unwrap();
        let log_space = -f64::exp_m1(36.0 * (-0.05f64).ln_1p() + 9.0 * (-0.1f64).ln_1p());
        assert!((direct - log_space).abs() < 1e-12, "{direct} vs {log_space}");
        assert!(udg_error_bound(1, 1, 1.5, 0.0).is_err());
        assert!(udg_error_bound(1, 1, 0.0, -0.1).is_err());
    }

    #[test]
    fn lambda_defaults() {
        assert_eq!(default_lambda(10), 25);
        assert_eq!(default_lambda(784), 153_664);
        assert_eq!(default_lambda(1000), 250_000);
        assert_eq!(default_lambda(2), 1);
        assert_eq!(default_lambda(1), 0);
    }

    #[test]
    fn latent_assignment() {
        let two = McmGraph::from_binary(4, &[&[1, 1, 1, 0], &[0, 1, 1, 1]]).unwrap();
        assert_eq!(assign_latents(&two, 4).unwrap().multiplicities(), &[2, 2]);
        let three = McmGraph::from_binary(3, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]).unwrap();
        assert_eq!(assign_latents(&three, 3).unwrap().multiplicities(), &[1, 1, 1]);
        assert_eq!(assign_latents(&three, 5).unwrap().multiplicities(), &[2, 2, 1]);
        let clamped = assign_latents(&three, 1).unwrap();
        assert_eq!(clamped.lambda(), 3);
        assert_eq!(clamped.multiplicities(), &[1, 1, 1]);
    }
}
