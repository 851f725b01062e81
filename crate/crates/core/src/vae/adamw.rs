use serde::{Deserialize, Serialize};

use super::VaeParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamWConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        AdamWConfig {
            lr: 1e-5,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.01,
        }
    }
}

/// AdamW with decoupled weight decay and bias-corrected moments.
#[derive(Debug, Clone)]
pub struct AdamW {
    config: AdamWConfig,
    step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl AdamW {
    pub fn new(config: AdamWConfig) -> Self {
        AdamW {
            config,
            step: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// One update of every tensor in `params` from the matching `grads`.
    pub fn step_tensors(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) {
        assert_eq!(params.len(), grads.len(), "tensor count mismatch");
        if self.m.is_empty() {
            self.m = params.iter().map(|p| vec![0.0; p.len()]).collect();
            self.v = self.m.clone();
        }
        self.step += 1;
        let c = self.config;
        let bc1 = 1.0 - c.beta1.powi(self.step as i32);
        let bc2 = 1.0 - c.beta2.powi(self.step as i32);
        for (t, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            assert_eq!(p.len(), g.len(), "tensor {t} shape mismatch");
            for k in 0..p.len() {
                p[k] -= c.lr * c.weight_decay * p[k];
                let m = &mut self.m[t][k];
                let v = &mut self.v[t][k];
                *m = c.beta1 * *m + (1.0 - c.beta1) * g[k];
                *v = c.beta2 * *v + (1.0 - c.beta2) * g[k] * g[k];
                let m_hat = *m / bc1;
                let v_hat = *v / bc2;
                p[k] -= c.lr * m_hat / (v_hat.sqrt() + c.eps);
            }
        }
    }

    /// Updates the model and re-applies the decoder mask.
    pub fn step(&mut self, params: &mut VaeParams, grads: &VaeParams) {
        let g = grads.tensors();
        let mut p = params.tensors_mut();
        self.step_tensors(&mut p, &g);
        params.apply_mask();
    }
}
