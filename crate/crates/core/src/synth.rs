//! Synthetic ground truth: random dependence graphs with an exact edge count,
//! their minimum-cover MCM graphs, and linear factor model data
//! M = L·W + E with standard normal factors and errors.

use ndarray::Array2;
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ecc::{solve, EccConfig, SolveMode};
use crate::graphs::{pair_count, udg_of_mcm, McmGraph, UndirectedGraph};
use crate::indep::SampleMatrix;
use crate::{rng, NcfaError, Result};

/// Bounds on the magnitude of a nonzero factor loading.
pub const WEIGHT_RANGE: (f64, f64) = (0.5, 2.0);

/// Number of edges for density `p` on `n` vertices: p·C(n, 2) rounded half
/// to even. Products within 1e-9 of a half are treated as exact halves, so
/// 0.1·45 gives 4.
pub fn edge_count_for_density(n: usize, p: f64) -> usize {
    let x = p * pair_count(n) as f64;
    let floor = x.floor();
    if (x - floor - 0.5).abs() < 1e-9 {
        let f = floor as usize;
        if f.is_multiple_of(2) {
            f
        } else {
            f + 1
        }
    } else {
        x.round() as usize
    }
}

/// Uniform draw from the labelled graphs on `n` vertices with exactly
/// [`edge_count_for_density`] edges.
pub fn sample_er_udg(n: usize, p: f64, seed: u64) -> Result<UndirectedGraph> {
    if n < 2 {
        return Err(NcfaError::InvalidInput(format!("need n >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(NcfaError::InvalidInput(format!("density {p} is not in [0, 1]")));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let e = edge_count_for_density(n, p);
    let chosen = index::sample(&mut rng::rng(seed), pairs.len(), e);
    UndirectedGraph::new(n, chosen.into_iter().map(|k| pairs[k]))
}

/// Generating structure and parameters of a linear factor model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GroundTruthJson")]
pub struct GroundTruth {
    pub udg: UndirectedGraph,
    pub mcm: McmGraph,
    /// K×n loadings, nonzero exactly on the biadjacency.
    pub weights: Vec<Vec<f64>>,
    pub noise_variances: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroundTruthJson {
    udg: UndirectedGraph,
    mcm: McmGraph,
    weights: Vec<Vec<f64>>,
    noise_variances: Vec<f64>,
}

impl TryFrom<GroundTruthJson> for GroundTruth {
    type Error = NcfaError;

    fn try_from(v: GroundTruthJson) -> Result<Self> {
        let gt = GroundTruth {
            udg: v.udg,
            mcm: v.mcm,
            weights: v.weights,
            noise_variances: v.noise_variances,
        };
        gt.validate()?;
        Ok(gt)
    }
}

impl GroundTruth {
    pub fn n(&self) -> usize {
        self.udg.n()
    }

    pub fn k(&self) -> usize {
        self.mcm.k()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.mcm.n() != n || self.noise_variances.len() != n {
            return Err(NcfaError::DimensionMismatch(
                "ground truth parts disagree on n".into(),
            ));
        }
        if udg_of_mcm(&self.mcm) != self.udg {
            return Err(NcfaError::InvalidInput(
                "udg is not the dependence graph of mcm".into(),
            ));
        }
        if self.weights.len() != self.mcm.k() || self.weights.iter().any(|r| r.len() != n) {
            return Err(NcfaError::DimensionMismatch("weights must be K×n".into()));
        }
        for (w, b) in self.weights.iter().zip(self.mcm.rows()) {
            if w.iter().zip(b).any(|(&w, &b)| (w != 0.0) != b || !w.is_finite()) {
                return Err(NcfaError::InvalidInput(
                    "weights support differs from the biadjacency".into(),
                ));
            }
        }
        if self.noise_variances.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
            return Err(NcfaError::InvalidInput("noise variances must be nonnegative".into()));
        }
        Ok(())
    }

    /// Population covariance WᵀW + D, n×n.
    pub fn covariance(&self) -> Array2<f64> {
        let n = self.n();
        Array2::from_shape_fn((n, n), |(i, j)| {
            let shared: f64 = self.weights.iter().map(|w| w[i] * w[j]).sum();
            shared + if i == j { self.noise_variances[i] } else { 0.0 }
        })
    }
}

/// Builds a ground truth for `udg`: a minimum edge clique cover (plus
/// singleton cliques for isolated vertices) as the MCM graph, loadings with
/// magnitude uniform on [0.5, 2] and a fair-coin sign, unit error variances.
pub fn make_ground_truth(
    udg: &UndirectedGraph,
    seed: u64,
    mode: SolveMode,
    ecc: &EccConfig,
) -> Result<GroundTruth> {
    let sol = solve(udg, mode, rng::derive(seed, 0), ecc)?;
    let cover = sol.cover.with_isolated_singletons(udg);
    let mcm = McmGraph::from_cover(&cover)?;
    let mut r = rng::rng(rng::derive(seed, 1));
    let weights = mcm
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|&b| {
                    if !b {
                        return 0.0;
                    }
                    let mag = r.random_range(WEIGHT_RANGE.0..=WEIGHT_RANGE.1);
                    if r.random_bool(0.5) {
                        mag
                    } else {
                        -mag
                    }
                })
                .collect()
        })
        .collect();
    Ok(GroundTruth {
        udg: udg.clone(),
        mcm,
        weights,
        noise_variances: vec![1.0; udg.n()],
    })
}

/// Draws `s` rows of M = L·W + E with L ~ N(0, I_K) and
/// E ~ N(0, diag(noise_variances)).
pub fn sample_dataset(gt: &GroundTruth, s: usize, seed: u64) -> Result<SampleMatrix> {
    if s == 0 {
        return Err(NcfaError::InvalidInput("sample count must be positive".into()));
    }
    let (n, k) = (gt.n(), gt.k());
    let sd: Vec<f64> = gt.noise_variances.iter().map(|v| v.sqrt()).collect();
    let mut r = rng::rng(seed);
    let mut data = Array2::zeros((s, n));
    let mut l = vec![0.0; k];
    for mut row in data.rows_mut() {
        for v in l.iter_mut() {
            *v = StandardNormal.sample(&mut r);
        }
        for i in 0..n {
            let e: f64 = StandardNormal.sample(&mut r);
            row[i] = l.iter().zip(&gt.weights).map(|(l, w)| l * w[i]).sum::<f64>() + sd[i] * e;
        }
    }
    SampleMatrix::new(data)
}
