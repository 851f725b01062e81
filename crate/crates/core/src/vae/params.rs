use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::TrainConfig;
use crate::graphs::NcfaGraph;
use crate::{rng, NcfaError, Result};

/// Weights of the masked VAE for n measurements and λ latents.
#[derive(Debug, Clone, PartialEq)]
pub struct VaeParams {
    /// n×λ decoder mask; `mask[(i, z)]` is true when latent z is a parent of
    /// measurement i.
    mask: Array2<bool>,
    parents: Vec<Vec<usize>>,
    /// λ×n, posterior mean head.
    pub enc_weight: Array2<f64>,
    pub enc_bias: Array1<f64>,
    /// λ×n, posterior log-variance head.
    pub enc_logvar_weight: Array2<f64>,
    pub enc_logvar_bias: Array1<f64>,
    /// n×λ, zero wherever the mask is false.
    pub dec_weight: Array2<f64>,
    pub dec_bias: Array1<f64>,
    /// Per-measurement observation log-variance (the residual errors).
    pub obs_lognoise: Array1<f64>,
}

fn parents_of(mask: &Array2<bool>) -> Vec<Vec<usize>> {
    mask.rows()
        .into_iter()
        .map(|r| r.iter().enumerate().filter_map(|(z, &b)| b.then_some(z)).collect())
        .collect()
}

impl VaeParams {
    /// All-zero parameters for the given n×λ mask.
    pub fn zeros(mask: Array2<bool>) -> Self {
        let (n, lambda) = mask.dim();
        VaeParams {
            parents: parents_of(&mask),
            mask,
            enc_weight: Array2::zeros((lambda, n)),
            enc_bias: Array1::zeros(lambda),
            enc_logvar_weight: Array2::zeros((lambda, n)),
            enc_logvar_bias: Array1::zeros(lambda),
            dec_weight: Array2::zeros((n, lambda)),
            dec_bias: Array1::zeros(n),
            obs_lognoise: Array1::zeros(n),
        }
    }

    /// n×λ decoder mask of an NCFA graph.
    pub fn mask_for(ncfa: &NcfaGraph) -> Array2<bool> {
        let expanded = ncfa.expanded_biadjacency();
        Array2::from_shape_fn((ncfa.n(), ncfa.lambda()), |(i, z)| expanded[z][i])
    }

    pub fn n(&self) -> usize {
        self.mask.nrows()
    }

    pub fn lambda(&self) -> usize {
        self.mask.ncols()
    }

    pub fn mask(&self) -> &Array2<bool> {
        &self.mask
    }

    /// Latent parents of each measurement.
    pub fn parents(&self) -> &[Vec<usize>] {
        &self.parents
    }

    /// Zeroes every masked decoder weight.
    pub fn apply_mask(&mut self) {
        for (w, &m) in self.dec_weight.iter_mut().zip(self.mask.iter()) {
            if !m {
                *w = 0.0;
            }
        }
    }

    /// Parameter tensors in a fixed order: encoder mean weight and bias,
    /// encoder log-variance weight and bias, decoder weight and bias,
    /// observation log-noise.
    pub fn tensors(&self) -> [&[f64]; 7] {
        [
            self.enc_weight.as_slice().expect("standard layout"),
            self.enc_bias.as_slice().expect("standard layout"),
            self.enc_logvar_weight.as_slice().expect("standard layout"),
            self.enc_logvar_bias.as_slice().expect("standard layout"),
            self.dec_weight.as_slice().expect("standard layout"),
            self.dec_bias.as_slice().expect("standard layout"),
            self.obs_lognoise.as_slice().expect("standard layout"),
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 7] {
        [
            self.enc_weight.as_slice_mut().expect("standard layout"),
            self.enc_bias.as_slice_mut().expect("standard layout"),
            self.enc_logvar_weight.as_slice_mut().expect("standard layout"),
            self.enc_logvar_bias.as_slice_mut().expect("standard layout"),
            self.dec_weight.as_slice_mut().expect("standard layout"),
            self.dec_bias.as_slice_mut().expect("standard layout"),
            self.obs_lognoise.as_slice_mut().expect("standard layout"),
        ]
    }

    /// Index of the decoder weight tensor in [`Self::tensors`].
    pub const DEC_WEIGHT: usize = 4;

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    pub fn to_file(&self, config: &TrainConfig) -> ModelFile {
        let rows = |a: &Array2<f64>| a.rows().into_iter().map(|r| r.to_vec()).collect();
        ModelFile {
            mask: self
                .mask
                .rows()
                .into_iter()
                .map(|r| r.iter().map(|&b| u8::from(b)).collect())
                .collect(),
            enc_weight: rows(&self.enc_weight),
            enc_bias: self.enc_bias.to_vec(),
            enc_logvar_weight: rows(&self.enc_logvar_weight),
            enc_logvar_bias: self.enc_logvar_bias.to_vec(),
            dec_weight: rows(&self.dec_weight),
            dec_bias: self.dec_bias.to_vec(),
            obs_lognoise: self.obs_lognoise.to_vec(),
            config: config.clone(),
        }
    }
}

/// JSON form of a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub mask: Vec<Vec<u8>>,
    pub enc_weight: Vec<Vec<f64>>,
    pub enc_bias: Vec<f64>,
    pub enc_logvar_weight: Vec<Vec<f64>>,
    pub enc_logvar_bias: Vec<f64>,
    pub dec_weight: Vec<Vec<f64>>,
    pub dec_bias: Vec<f64>,
    pub obs_lognoise: Vec<f64>,
    pub config: TrainConfig,
}

fn matrix(rows: &[Vec<f64>], shape: (usize, usize), name: &str) -> Result<Array2<f64>> {
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(NcfaError::DimensionMismatch(format!(
            "{name} should be {}×{}",
            shape.0, shape.1
        )));
    }
    Ok(Array2::from_shape_vec(shape, flat).expect("checked shape"))
}

fn vector(v: &[f64], len: usize, name: &str) -> Result<Array1<f64>> {
    if v.len() != len {
        return Err(NcfaError::DimensionMismatch(format!(
            "{name} should have length {len}"
        )));
    }
    Ok(Array1::from(v.to_vec()))
}

impl ModelFile {
    pub fn to_params(&self) -> Result<VaeParams> {
        let n = self.mask.len();
        let lambda = self.mask.first().map_or(0, Vec::len);
        if self.mask.iter().any(|r| r.len() != lambda || r.iter().any(|&b| b > 1)) {
            return Err(NcfaError::InvalidInput("mask must be a 0/1 matrix".into()));
        }
        let mask = Array2::from_shape_fn((n, lambda), |(i, z)| self.mask[i][z] == 1);
        let mut p = VaeParams::zeros(mask);
        p.enc_weight = matrix(&self.enc_weight, (lambda, n), "enc_weight")?;
        p.enc_bias = vector(&self.enc_bias, lambda, "enc_bias")?;
        p.enc_logvar_weight = matrix(&self.enc_logvar_weight, (lambda, n), "enc_logvar_weight")?;
        p.enc_logvar_bias = vector(&self.enc_logvar_bias, lambda, "enc_logvar_bias")?;
        p.dec_weight = matrix(&self.dec_weight, (n, lambda), "dec_weight")?;
        p.dec_bias = vector(&self.dec_bias, n, "dec_bias")?;
        p.obs_lognoise = vector(&self.obs_lognoise, n, "obs_lognoise")?;
        if p.dec_weight.iter().zip(p.mask.iter()).any(|(&w, &m)| !m && w != 0.0) {
            return Err(NcfaError::InvalidInput(
                "dec_weight is nonzero at a masked position".into(),
            ));
        }
        Ok(p)
    }
}

/// Random initialisation: weights uniform on ±1/√fan_in (fan_in = n for the
/// encoder, λ for the decoder), biases and log-noise zero. Every decoder entry
/// is drawn before masking, so graphs with the same n and λ share their
/// unmasked initial values.
pub fn init_params(ncfa: &NcfaGraph, seed: u64) -> Result<VaeParams> {
    if ncfa.lambda() == 0 {
        return Err(NcfaError::InvalidInput("λ must be at least 1".into()));
    }
    let mut p = VaeParams::zeros(VaeParams::mask_for(ncfa));
    let (n, lambda) = (p.n(), p.lambda());
    let mut r = rng::rng(seed);
    let enc_bound = 1.0 / (n as f64).sqrt();
    let dec_bound = 1.0 / (lambda as f64).sqrt();
    for w in p.enc_weight.iter_mut() {
        *w = r.random_range(-enc_bound..=enc_bound);
    }
    for w in p.enc_logvar_weight.iter_mut() {
        *w = r.random_range(-enc_bound..=enc_bound);
    }
    for w in p.dec_weight.iter_mut() {
        *w = r.random_range(-dec_bound..=dec_bound);
    }
    p.apply_mask();
    Ok(p)
}
