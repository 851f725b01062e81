use rand::seq::SliceRandom;

use super::{normal_sf, TestOutcome};
use crate::{rng, NcfaError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiStatistic {
    pub xi: f64,
    /// `y` is constant, so the statistic is undefined and reported as 0.
    pub degenerate: bool,
}

/// Chatterjee's rank correlation ξ(x → y).
///
/// Observations are sorted by (x, y); runs of tied x are then shuffled from
/// `seed`, which breaks x-ties uniformly at random while keeping the result
/// independent of the input order. With r_i = #{j : y_j ≤ y_(i)} and
/// l_i = #{j : y_j ≥ y_(i)},
/// ξ = 1 − s Σ|r_{i+1} − r_i| / (2 Σ l_i (s − l_i)),
/// which is 1 − 3 Σ|r_{i+1} − r_i| / (s² − 1) without ties.
pub fn xi_coefficient(x: &[f64], y: &[f64], seed: u64) -> Result<XiStatistic> {
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
            "xi needs at least 2 observations, got {s}"
        )));
    }
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut r = rng::rng(seed);
    let mut start = 0;
    while start < s {
        let mut end = start + 1;
        while end < s && pairs[end].0 == pairs[start].0 {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].shuffle(&mut r);
        }
        start = end;
    }

    let mut sorted_y: Vec<f64> = y.to_vec();
    sorted_y.sort_by(f64::total_cmp);
    let at_most = |v: f64| sorted_y.partition_point(|&w| w <= v);
    let below = |v: f64| sorted_y.partition_point(|&w| w < v);

    let ranks: Vec<usize> = pairs.iter().map(|&(_, yv)| at_most(yv)).collect();
    let numerator: f64 = ranks
        .windows(2)
        .map(|w| w[0].abs_diff(w[1]) as f64)
        .sum();
    let denominator: f64 = pairs
        .iter()
        .map(|&(_, yv)| {
            let l = (s - below(yv)) as f64;
            l * (s as f64 - l)
        })
        .sum();
    if denominator == 0.0 {
        return Ok(XiStatistic {
            xi: 0.0,
            degenerate: true,
        });
    }
    let xi = 1.0 - s as f64 * numerator / (2.0 * denominator);
    Ok(XiStatistic {
        xi: xi.clamp(-1.0, 1.0),
        degenerate: false,
    })
}

pub const MIN_SAMPLES_XI: usize = 20;

/// One-sided asymptotic test of ξ(x → y): under independence √s ξ is
/// approximately N(0, 2/5).
pub fn xi_pvalue(x: &[f64], y: &[f64], seed: u64) -> Result<TestOutcome> {
    if x.len() < MIN_SAMPLES_XI {
        return Err(NcfaError::InvalidInput(format!(
            "xi test needs at least {MIN_SAMPLES_XI} observations, got {}",
            x.len()
        )));
    }
    let stat = xi_coefficient(x, y, seed)?;
    if stat.degenerate {
        return Ok(TestOutcome {
            statistic: 0.0,
            p_value: 1.0,
            degenerate: true,
        });
    }
    let z = (x.len() as f64).sqrt() * stat.xi / 0.4f64.sqrt();
    Ok(TestOutcome {
        statistic: stat.xi,
        p_value: normal_sf(z),
        degenerate: false,
    })
}

/// Tests both directions and reports the smaller p-value doubled (capped at
/// 1), with the statistic of that direction.
pub fn xi_symmetric_pvalue(x: &[f64], y: &[f64], seed: u64) -> Result<TestOutcome> {
    let forward = xi_pvalue(x, y, rng::derive(seed, 0))?;
    let backward = xi_pvalue(y, x, rng::derive(seed, 1))?;
    if forward.degenerate || backward.degenerate {
        return Ok(TestOutcome {
            statistic: 0.0,
            p_value: 1.0,
            degenerate: true,
        });
    }
    let best = if backward.p_value < forward.p_value {
        backward
    } else {
        forward
    };
    Ok(TestOutcome {
        p_value: (2.0 * best.p_value).min(1.0),
        ..best
    })
}
