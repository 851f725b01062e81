//! Marginal independence testing and UDG estimation.
//!
//! Two tests with asymptotic p-values: distance covariance (conservative
//! normal-quadratic bound) and Chatterjee's xi, the latter run in both
//! directions with a Bonferroni factor of two. An edge i–j is kept when the
//! pair's p-value falls below α.

mod dcov;
mod sample;
mod xi;

pub use dcov::{dcov_pvalue, distance_covariance, distance_covariance_with, DcovStatistic};
pub use sample::SampleMatrix;
pub use xi::{xi_coefficient, xi_pvalue, xi_symmetric_pvalue, XiStatistic};

use serde::{Deserialize, Serialize};

use crate::graphs::UndirectedGraph;
use crate::{rng, Execution, NcfaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestMethod {
    #[default]
    Dcov,
    Xi,
}

impl std::str::FromStr for TestMethod {
    type Err = NcfaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dcov" => Ok(TestMethod::Dcov),
            "xi" => Ok(TestMethod::Xi),
            other => Err(NcfaError::InvalidInput(format!(
                "unknown test {other:?} (expected dcov or xi)"
            ))),
        }
    }
}

/// Statistic and p-value of one independence test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
    /// A constant input made the test uninformative; `p_value` is 1.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairTestResult {
    pub pair: (usize, usize),
    pub method: TestMethod,
    pub statistic: f64,
    pub p_value: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UdgEstimate {
    pub graph: UndirectedGraph,
    /// One entry per pair, in lexicographic pair order.
    pub tests: Vec<PairTestResult>,
    /// Columns with zero spread; they never receive edges.
    pub degenerate_columns: Vec<usize>,
}

/// Upper tail of the standard normal.
pub(crate) fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

pub const MIN_SAMPLES_FOR_UDG: usize = 20;

/// Tests every pair of columns for marginal independence and keeps an edge
/// wherever the p-value is below `alpha`.
///
/// Pair `k` (lexicographic order) uses the seed `derive(seed, k)`, so the
/// output does not depend on `exec`. Both statistics sort their input
/// canonically first, so permuting the rows of `sample` changes nothing.
pub fn estimate_udg(
    sample: &SampleMatrix,
    alpha: f64,
    method: TestMethod,
    seed: u64,
    exec: Execution,
) -> Result<UdgEstimate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(NcfaError::InvalidInput(format!(
            "alpha = {alpha} is not in (0, 1)"
        )));
    }
    let (s, n) = (sample.n_samples(), sample.n_vars());
    if s < MIN_SAMPLES_FOR_UDG {
        return Err(NcfaError::InvalidInput(format!(
            "need at least {MIN_SAMPLES_FOR_UDG} samples to estimate a UDG, got {s}"
        )));
    }
    let columns: Vec<Vec<f64>> = (0..n).map(|j| sample.column(j)).collect();
    let degenerate_columns: Vec<usize> = (0..n)
        .filter(|&j| columns[j].iter().all(|&v| v == columns[j][0]))
        .collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();

    let tests: Vec<PairTestResult> = exec
        .map_range(pairs.len(), |k| {
            let (i, j) = pairs[k];
            let pair_seed = rng::derive(seed, k as u64);
            let outcome = match method {
                TestMethod::Dcov => dcov_pvalue(&columns[i], &columns[j]),
                TestMethod::Xi => xi_symmetric_pvalue(&columns[i], &columns[j], pair_seed),
            };
            outcome.map(|o| PairTestResult {
                pair: (i, j),
                method,
                statistic: o.statistic,
                p_value: o.p_value,
                degenerate: o.degenerate,
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let graph = UndirectedGraph::new(
        n,
        tests
            .iter()
            .filter(|t| !t.degenerate && t.p_value < alpha)
            .map(|t| t.pair),
    )?;
    Ok(UdgEstimate {
        graph,
        tests,
        degenerate_columns,
    })
}
