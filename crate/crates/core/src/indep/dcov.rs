use super::{normal_sf, TestOutcome};
use crate::{Execution, NcfaError, Result};

/// Sample distance covariance V²ₛ and the mean pairwise distances that
/// normalise the asymptotic test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcovStatistic {
    pub v2: f64,
    pub mean_dist_x: f64,
    pub mean_dist_y: f64,
    /// One of the inputs is constant.
    pub degenerate: bool,
}

pub fn distance_covariance(x: &[f64], y: &[f64]) -> Result<DcovStatistic> {
    distance_covariance_with(x, y, Execution::Sequential)
}

/// V²ₛ = (1/s²) Σ A_kl B_kl over double-centred distance matrices, computed
/// without materialising them: with row means a_k, b_k and grand means ā, b̄,
/// V²ₛ = (1/s²) Σ |x_k−x_l||y_k−y_l| + ā b̄ − (2/s) Σ a_k b_k.
///
/// The pairs are sorted first so the result is exactly invariant to the
/// order of the observations. Rows may run in parallel; the final sums are
/// always taken in row order.
pub fn distance_covariance_with(x: &[f64], y: &[f64], exec: Execution) -> Result<DcovStatistic> {
    if x.len() != y.len() {
        return Err(NcfaError::DimensionMismatch(format!(
            "vectors of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    let s = x.len();
    if s < 2 {
        return Err(NcfaError::InvalidInput(format!(
            "distance covariance needs at least 2 observations, got {s}"
        )));
    }
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    // (a_k, b_k, Σ_l a_kl b_kl) for each row k
    let rows: Vec<(f64, f64, f64)> = exec.map_range(s, |k| {
        let (xk, yk) = pairs[k];
        let (mut sa, mut sb, mut sab) = (0.0, 0.0, 0.0);
        for &(xl, yl) in &pairs {
            let a = (xk - xl).abs();
            let b = (yk - yl).abs();
            sa += a;
            sb += b;
            sab += a * b;
        }
        (sa, sb, sab)
    });

    let sf = s as f64;
    let (mut total_a, mut total_b, mut total_ab, mut cross) = (0.0, 0.0, 0.0, 0.0);
    for &(sa, sb, sab) in &rows {
        total_a += sa;
        total_b += sb;
        total_ab += sab;
        cross += (sa / sf) * (sb / sf);
    }
    let mean_a = total_a / (sf * sf);
    let mean_b = total_b / (sf * sf);
    let degenerate = mean_a == 0.0 || mean_b == 0.0;
    let v2 = if degenerate {
        0.0
    } else {
        total_ab / (sf * sf) + mean_a * mean_b - 2.0 * cross / sf
    };
    Ok(DcovStatistic {
        v2,
        mean_dist_x: mean_a,
        mean_dist_y: mean_b,
        degenerate,
    })
}

/// Minimum sample size for the asymptotic distance covariance test.
pub const MIN_SAMPLES_DCOV: usize = 10;

/// Asymptotic distance covariance test.
///
/// Under independence s·V²ₛ/(ā b̄) converges to a quadratic form in normals
/// with unit mean, which is stochastically dominated in the tail by a single
/// χ²₁; p = P(χ²₁ ≥ T) = 2(1 − Φ(√T)) is therefore conservative.
pub fn dcov_pvalue(x: &[f64], y: &[f64]) -> Result<TestOutcome> {
    if x.len() < MIN_SAMPLES_DCOV {
        return Err(NcfaError::InvalidInput(format!(
            "distance covariance test needs at least {MIN_SAMPLES_DCOV} observations, got {}",
            x.len()
        )));
    }
    let stat = distance_covariance(x, y)?;
    if stat.degenerate {
        return Ok(TestOutcome {
            statistic: 0.0,
            p_value: 1.0,
            degenerate: true,
        });
    }
    let t = x.len() as f64 * stat.v2.max(0.0) / (stat.mean_dist_x * stat.mean_dist_y);
    Ok(TestOutcome {
        statistic: t,
        p_value: (2.0 * normal_sf(t.sqrt())).min(1.0),
        degenerate: false,
    })
}
