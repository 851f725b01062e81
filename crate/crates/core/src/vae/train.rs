use std::io::Write;

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{elbo_loss, init_params, loss_and_grad, AdamW, AdamWConfig, VaeParams};
use crate::graphs::NcfaGraph;
use crate::indep::SampleMatrix;
use crate::{rng, NcfaError, Result};

/// Largest sample size trained full-batch when no batch size is given.
pub const FULL_BATCH_LIMIT: usize = 2048;
/// Minibatch size used above [`FULL_BATCH_LIMIT`].
pub const MINIBATCH_SIZE: usize = 256;
/// Smallest sample accepted by [`train`].
pub const MIN_TRAIN_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    /// `None` picks full-batch or [`MINIBATCH_SIZE`] from the sample size.
    pub batch_size: Option<usize>,
    /// Fraction of rows used for training; the rest is validation.
    pub split_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            learning_rate: 1e-5,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.01,
            batch_size: None,
            split_fraction: 0.7,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(NcfaError::InvalidInput("epochs must be at least 1".into()));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(NcfaError::InvalidInput(format!(
                "split fraction {} is not in (0, 1)",
                self.split_fraction
            )));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(NcfaError::InvalidInput("learning rate must be positive".into()));
        }
        if self.batch_size == Some(0) {
            return Err(NcfaError::InvalidInput("batch size must be positive".into()));
        }
        Ok(())
    }

    fn optimizer(&self) -> AdamWConfig {
        AdamWConfig {
            lr: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
            weight_decay: self.weight_decay,
        }
    }

    fn effective_batch(&self, s: usize, train_len: usize) -> usize {
        let b = self.batch_size.unwrap_or(if s <= FULL_BATCH_LIMIT {
            train_len
        } else {
            MINIBATCH_SIZE
        });
        b.min(train_len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

/// Mean negative ELBO per sample on the training and validation rows after
/// every epoch. All evaluations reuse one fixed noise draw per split, so the
/// curve reflects parameter changes only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    /// Losses of the initial parameters.
    pub initial_train_loss: f64,
    pub initial_val_loss: f64,
    pub rows: Vec<TraceRow>,
}

impl TrainTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn final_train_loss(&self) -> f64 {
        self.rows.last().map_or(self.initial_train_loss, |r| r.train_loss)
    }

    pub fn final_val_loss(&self) -> f64 {
        self.rows.last().map_or(self.initial_val_loss, |r| r.val_loss)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn split_rows(s: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..s).collect();
    idx.shuffle(&mut rng::rng(seed));
    let n_train = ((s as f64 * fraction).round() as usize).clamp(1, s - 1);
    let val = idx.split_off(n_train);
    (idx, val)
}

fn evaluate(params: &VaeParams, data: ArrayView2<'_, f64>, seed: u64, epoch: usize) -> Result<f64> {
    let loss = elbo_loss(params, data, seed)?;
    if loss.is_finite() {
        Ok(loss)
    } else {
        Err(NcfaError::NonFiniteLoss { epoch })
    }
}

/// Fits the masked VAE of `ncfa` to `sample`.
///
/// Rows are split by a seeded shuffle; each epoch is one pass over the
/// training rows (shuffled into minibatches when batching applies) with one
/// AdamW step per batch. Errors with [`NcfaError::NonFiniteLoss`] carrying
/// the 1-based epoch if a loss stops being finite.
pub fn train(
    ncfa: &NcfaGraph,
    sample: &SampleMatrix,
    config: &TrainConfig,
) -> Result<(VaeParams, TrainTrace)> {
    config.validate()?;
    let s = sample.n_samples();
    if s < MIN_TRAIN_SAMPLES {
        return Err(NcfaError::InvalidInput(format!(
            "training needs at least {MIN_TRAIN_SAMPLES} samples, got {s}"
        )));
    }
    if sample.n_vars() != ncfa.n() {
        return Err(NcfaError::DimensionMismatch(format!(
            "sample has {} variables, graph has {} measurements",
            sample.n_vars(),
            ncfa.n()
        )));
    }
    let seed = config.seed;
    let (train_idx, val_idx) = split_rows(s, config.split_fraction, rng::derive(seed, 0));
    let train_data = sample.select_rows(&train_idx);
    let val_data = sample.select_rows(&val_idx);
    let train_eval_seed = rng::derive(seed, 3);
    let val_eval_seed = rng::derive(seed, 4);

    let mut params = init_params(ncfa, rng::derive(seed, 1))?;
    let mut opt = AdamW::new(config.optimizer());
    let batch = config.effective_batch(s, train_idx.len());
    let full_batch = batch == train_idx.len();

    let initial_train_loss = evaluate(&params, train_data.view(), train_eval_seed, 0)?;
    let initial_val_loss = evaluate(&params, val_data.view(), val_eval_seed, 0)?;
    let mut rows = Vec::with_capacity(config.epochs);
    let mut order: Vec<usize> = (0..train_idx.len()).collect();
    for e in 0..config.epochs {
        let epoch = e + 1;
        let epoch_seed = rng::derive_path(seed, &[2, e as u64]);
        if full_batch {
            let (loss, g) = loss_and_grad(&params, train_data.view(), epoch_seed)?;
            if !loss.is_finite() {
                return Err(NcfaError::NonFiniteLoss { epoch });
            }
            opt.step(&mut params, &g);
        } else {
            order.shuffle(&mut rng::rng(rng::derive(epoch_seed, 0)));
            for (k, chunk) in order.chunks(batch).enumerate() {
                let x = train_data.select(Axis(0), chunk);
                let (loss, g) =
                    loss_and_grad(&params, x.view(), rng::derive_path(epoch_seed, &[1, k as u64]))?;
                if !loss.is_finite() {
                    return Err(NcfaError::NonFiniteLoss { epoch });
                }
                opt.step(&mut params, &g);
            }
        }
        if !params.is_finite() {
            return Err(NcfaError::NonFiniteLoss { epoch });
        }
        rows.push(TraceRow {
            epoch,
            train_loss: evaluate(&params, train_data.view(), train_eval_seed, epoch)?,
            val_loss: evaluate(&params, val_data.view(), val_eval_seed, epoch)?,
        });
    }
    let trace = TrainTrace {
        initial_train_loss,
        initial_val_loss,
        rows,
    };
    Ok((params, trace))
}

/// Fully connected VAE with λ latents: [`train`] on the all-ones mask.
pub fn baseline_vae(
    lambda: usize,
    sample: &SampleMatrix,
    config: &TrainConfig,
) -> Result<(VaeParams, TrainTrace)> {
    train(&NcfaGraph::complete(sample.n_vars(), lambda)?, sample, config)
}

/// Draws `count` rows from the generative model: z ~ N(0, I), decoder mean
/// plus Gaussian observation noise with variance exp(obs_lognoise).
pub fn sample_generative(params: &VaeParams, count: usize, seed: u64) -> Array2<f64> {
    let mut r = rng::rng(seed);
    let z = Array2::from_shape_fn((count, params.lambda()), |_| StandardNormal.sample(&mut r));
    let mut out = super::decode(params, z.view());
    let sd = params.obs_lognoise.mapv(|s| (0.5 * s).exp());
    for mut row in out.rows_mut() {
        for (v, &sd) in row.iter_mut().zip(sd.iter()) {
            let e: f64 = StandardNormal.sample(&mut r);
            *v += sd * e;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::McmGraph;
    use ndarray::Array2;

    fn two_clique_ncfa() -> NcfaGraph {
        let mcm = McmGraph::from_binary(4, &[&[1, 1, 1, 0], &[0, 1, 1, 1]]).unwrap();
        NcfaGraph::new(mcm, vec![2, 2]).unwrap()
    }

    /// M = L·W + E with the two-clique structure.
    fn two_clique_data(s: usize, seed: u64) -> SampleMatrix {
        let mut r = rng::rng(seed);
        let w = [[1.0, -1.5, 0.8, 0.0], [0.0, 0.7, -1.2, 1.9]];
        let data = Array2::from_shape_fn((s, 4), |_| 0.0);
        let mut data = data;
        for mut row in data.rows_mut() {
            let l: [f64; 2] = [StandardNormal.sample(&mut r), StandardNormal.sample(&mut r)];
            for i in 0..4 {
                let e: f64 = StandardNormal.sample(&mut r);
                row[i] = l[0] * w[0][i] + l[1] * w[1][i] + e;
            }
        }
        SampleMatrix::new(data).unwrap()
    }

    fn short(epochs: usize) -> TrainConfig {
        TrainConfig {
            epochs,
            seed: 11,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn epoch_count_rules() {
        let data = two_clique_data(50, 0);
        assert!(train(&two_clique_ncfa(), &data, &short(0)).is_err());
        let (_, trace) = train(&two_clique_ncfa(), &data, &short(1)).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.rows[0].epoch, 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let data = two_clique_data(9, 0);
        assert!(train(&two_clique_ncfa(), &data, &short(1)).is_err());
        let data = two_clique_data(50, 0);
        let mut cfg = short(1);
        cfg.split_fraction = 1.0;
        assert!(train(&two_clique_ncfa(), &data, &cfg).is_err());
        let wrong = NcfaGraph::complete(3, 2).unwrap();
        assert!(train(&wrong, &data, &short(1)).is_err());
    }

    #[test]
    fn deterministic() {
        let data = two_clique_data(120, 1);
        let a = train(&two_clique_ncfa(), &data, &short(5)).unwrap();
        let b = train(&two_clique_ncfa(), &data, &short(5)).unwrap();
        assert_eq!(a, b);
        let mut other = short(5);
        other.seed = 12;
        assert_ne!(a.1, train(&two_clique_ncfa(), &data, &other).unwrap().1);
    }

    #[test]
    fn split_sizes() {
        let (t, v) = split_rows(1000, 0.7, 3);
        assert_eq!((t.len(), v.len()), (700, 300));
        let mut all: Vec<usize> = t.iter().chain(&v).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..1000).collect::<Vec<_>>());
        let (t, v) = split_rows(10, 0.01, 3);
        assert_eq!((t.len(), v.len()), (1, 9));
    }

    #[test]
    fn loss_decreases_on_two_clique_data() {
        let data = two_clique_data(1000, 2);
        let (params, trace) = train(&two_clique_ncfa(), &data, &short(200)).unwrap();
        assert!(trace.final_train_loss() < trace.initial_train_loss);
        assert!(trace.rows.iter().all(|r| r.train_loss.is_finite() && r.val_loss.is_finite()));
        for ((i, z), &m) in params.mask().indexed_iter() {
            if !m {
                assert_eq!(params.dec_weight[(i, z)], 0.0);
            }
        }
    }

    #[test]
    fn baseline_equals_all_ones_ncfa() {
        let data = two_clique_data(100, 3);
        let single = NcfaGraph::new(McmGraph::from_binary(4, &[&[1, 1, 1, 1]]).unwrap(), vec![4]).unwrap();
        let a = train(&single, &data, &short(4)).unwrap();
        let b = baseline_vae(4, &data, &short(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn minibatches_when_large() {
        let data = two_clique_data(3000, 4);
        let cfg = short(2);
        assert_eq!(cfg.effective_batch(3000, 2100), MINIBATCH_SIZE);
        assert_eq!(cfg.effective_batch(2048, 1434), 1434);
        let (_, trace) = train(&two_clique_ncfa(), &data, &cfg).unwrap();
        assert_eq!(trace.len(), 2);
    }

    #[test]
    fn divergence_reports_epoch() {
        let data = two_clique_data(50, 5);
        let mut cfg = short(3);
        cfg.learning_rate = 1e300;
        match train(&two_clique_ncfa(), &data, &cfg) {
            Err(NcfaError::NonFiniteLoss { epoch }) => assert_eq!(epoch, 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn trace_csv_layout() {
        let trace = TrainTrace {
            initial_train_loss: 3.0,
            initial_val_loss: 3.5,
            rows: vec![
                TraceRow { epoch: 1, train_loss: 2.5, val_loss: 3.25 },
                TraceRow { epoch: 2, train_loss: 2.0, val_loss: 3.0 },
            ],
        };
        let mut out = Vec::new();
        trace.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "epoch,train_loss,val_loss\n1,2.5,3.25\n2,2.0,3.0\n"
        );
    }

    #[test]
    fn zero_decoder_samples_are_noise() {
        let mut p = VaeParams::zeros(VaeParams::mask_for(&two_clique_ncfa()));
        p.obs_lognoise = ndarray::array![0.0, (4.0f64).ln(), 0.0, (0.25f64).ln()];
        let x = sample_generative(&p, 20000, 9);
        let var = x.var_axis(Axis(0), 1.0);
        for (got, want) in var.iter().zip([1.0, 4.0, 1.0, 0.25]) {
            assert!((got / want - 1.0).abs() < 0.05, "{got} vs {want}");
        }
        assert_eq!(x, sample_generative(&p, 20000, 9));
    }

    #[test]
    fn no_shared_parent_means_uncorrelated() {
        let p = init_params(&two_clique_ncfa(), 6).unwrap();
        let x = sample_generative(&p, 10000, 1);
        let (a, b) = (x.column(0), x.column(3));
        let (ma, mb) = (a.mean().unwrap(), b.mean().unwrap());
        let cov = a.iter().zip(b.iter()).map(|(u, v)| (u - ma) * (v - mb)).sum::<f64>();
        let r = cov
            / (a.iter().map(|u| (u - ma).powi(2)).sum::<f64>()
                * b.iter().map(|v| (v - mb).powi(2)).sum::<f64>())
            .sqrt();
        assert!(r.abs() < 0.05, "r = {r}");
    }
}
