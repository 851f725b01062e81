use std::f64::consts::PI;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand_distr::{Distribution, StandardNormal};

use super::VaeParams;
use crate::{rng, NcfaError, Result};

/// Posterior mean and log-variance, each b×λ.
pub fn encode(params: &VaeParams, batch: ArrayView2<'_, f64>) -> (Array2<f64>, Array2<f64>) {
    let mu = batch.dot(&params.enc_weight.t()) + &params.enc_bias;
    let logvar = batch.dot(&params.enc_logvar_weight.t()) + &params.enc_logvar_bias;
    (mu, logvar)
}

/// Decoder mean, b×n. Measurement i sums only over its parent latents.
pub fn decode(params: &VaeParams, z: ArrayView2<'_, f64>) -> Array2<f64> {
    let (b, n) = (z.nrows(), params.n());
    let mut out = Array2::zeros((b, n));
    for r in 0..b {
        for i in 0..n {
            let mut acc = params.dec_bias[i];
            for &j in &params.parents()[i] {
                acc += params.dec_weight[(i, j)] * z[(r, j)];
            }
            out[(r, i)] = acc;
        }
    }
    out
}

/// Standard normal b×λ reparameterisation noise for `seed`.
pub(crate) fn noise(b: usize, lambda: usize, seed: u64) -> Array2<f64> {
    let mut r = rng::rng(seed);
    Array2::from_shape_fn((b, lambda), |_| StandardNormal.sample(&mut r))
}

/// Per-sample averages of the two ELBO terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElboTerms {
    /// Gaussian negative log-likelihood of the batch under the decoder.
    pub recon: f64,
    /// KL(q(z|x) ‖ N(0, I)) in closed form.
    pub kl: f64,
}

impl ElboTerms {
    pub fn loss(&self) -> f64 {
        self.recon + self.kl
    }
}

struct Forward {
    mu: Array2<f64>,
    logvar: Array2<f64>,
    eps: Array2<f64>,
    z: Array2<f64>,
    mean: Array2<f64>,
}

fn forward(params: &VaeParams, batch: ArrayView2<'_, f64>, seed: u64) -> Forward {
    let (mu, logvar) = encode(params, batch);
    let eps = noise(batch.nrows(), params.lambda(), seed);
    let z = &mu + &(logvar.mapv(|v| (0.5 * v).exp()) * &eps);
    let mean = decode(params, z.view());
    Forward {
        mu,
        logvar,
        eps,
        z,
        mean,
    }
}

fn terms(params: &VaeParams, batch: ArrayView2<'_, f64>, fw: &Forward) -> ElboTerms {
    let b = batch.nrows() as f64;
    let ln2pi = (2.0 * PI).ln();
    let mut recon = 0.0;
    for r in 0..batch.nrows() {
        for i in 0..params.n() {
            let s = params.obs_lognoise[i];
            let d = batch[(r, i)] - fw.mean[(r, i)];
            recon += 0.5 * (ln2pi + s + d * d * (-s).exp());
        }
    }
    let mut kl = 0.0;
    for (&m, &lv) in fw.mu.iter().zip(fw.logvar.iter()) {
        kl += 0.5 * (m * m + lv.exp() - 1.0 - lv);
    }
    ElboTerms {
        recon: recon / b,
        kl: kl / b,
    }
}

fn check_batch(params: &VaeParams, batch: ArrayView2<'_, f64>) -> Result<()> {
    if batch.nrows() == 0 {
        return Err(NcfaError::InvalidInput("empty batch".into()));
    }
    if batch.ncols() != params.n() {
        return Err(NcfaError::DimensionMismatch(format!(
            "batch has {} columns, model has {} measurements",
            batch.ncols(),
            params.n()
        )));
    }
    Ok(())
}

/// Reconstruction and KL terms with one reparameterised sample per row,
/// noise drawn from `seed`.
pub fn elbo_terms(params: &VaeParams, batch: ArrayView2<'_, f64>, seed: u64) -> Result<ElboTerms> {
    check_batch(params, batch)?;
    let fw = forward(params, batch, seed);
    Ok(terms(params, batch, &fw))
}

/// Negative ELBO averaged over the batch.
pub fn elbo_loss(params: &VaeParams, batch: ArrayView2<'_, f64>, seed: u64) -> Result<f64> {
    elbo_terms(params, batch, seed).map(|t| t.loss())
}

/// Loss and its gradient with respect to every parameter, for the same noise
/// draw as [`elbo_loss`] with `seed`. The gradient is returned as a
/// [`VaeParams`] with the same mask; masked decoder entries are exactly zero.
pub fn loss_and_grad(
    params: &VaeParams,
    batch: ArrayView2<'_, f64>,
    seed: u64,
) -> Result<(f64, VaeParams)> {
    check_batch(params, batch)?;
    let fw = forward(params, batch, seed);
    let loss = terms(params, batch, &fw).loss();
    let (b, n, lambda) = (batch.nrows(), params.n(), params.lambda());
    let inv_b = 1.0 / b as f64;

    let mut g = VaeParams::zeros(params.mask().clone());
    let inv_var: Array1<f64> = params.obs_lognoise.mapv(|s| (-s).exp());

    // d loss / d decoder mean, and the log-noise gradient
    let mut g_mean = Array2::zeros((b, n));
    for r in 0..b {
        for i in 0..n {
            let d = batch[(r, i)] - fw.mean[(r, i)];
            g_mean[(r, i)] = -d * inv_var[i] * inv_b;
            g.obs_lognoise[i] += 0.5 * (1.0 - d * d * inv_var[i]) * inv_b;
        }
    }
    g.dec_bias = g_mean.sum_axis(Axis(0));

    let mut g_z = Array2::<f64>::zeros((b, lambda));
    for r in 0..b {
        for i in 0..n {
            let gm = g_mean[(r, i)];
            for &j in &params.parents()[i] {
                g.dec_weight[(i, j)] += gm * fw.z[(r, j)];
                g_z[(r, j)] += gm * params.dec_weight[(i, j)];
            }
        }
    }

    let mut g_mu = g_z.clone();
    let mut g_lv = Array2::zeros((b, lambda));
    for r in 0..b {
        for j in 0..lambda {
            let lv = fw.logvar[(r, j)];
            let std = (0.5 * lv).exp();
            g_mu[(r, j)] += fw.mu[(r, j)] * inv_b;
            g_lv[(r, j)] = g_z[(r, j)] * 0.5 * std * fw.eps[(r, j)] + 0.5 * (lv.exp() - 1.0) * inv_b;
        }
    }
    g.enc_weight = g_mu.t().dot(&batch);
    g.enc_bias = g_mu.sum_axis(Axis(0));
    g.enc_logvar_weight = g_lv.t().dot(&batch);
    g.enc_logvar_bias = g_lv.sum_axis(Axis(0));
    Ok((loss, g))
}

/// Gradient of [`elbo_loss`].
pub fn grad(params: &VaeParams, batch: ArrayView2<'_, f64>, seed: u64) -> Result<VaeParams> {
    loss_and_grad(params, batch, seed).map(|(_, g)| g)
}
