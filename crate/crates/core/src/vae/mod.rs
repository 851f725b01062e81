//! Graph-constrained variational autoencoder.
//!
//! Encoder: affine mean and log-variance heads, fully connected. Decoder: one
//! affine layer in which measurement i only reads the latents that are its
//! parents in the expanded NCFA graph; masked weights are skipped in every
//! product, so they are exactly zero, receive zero gradient, and perturbing a
//! non-parent latent leaves the output bitwise unchanged. Observations are
//! Gaussian with a learned per-measurement log-variance.
//!
//! Gradients are derived by hand (reverse mode through the reparameterised
//! sample) and checked against finite differences in the tests.

mod adamw;
mod model;
mod params;
mod train;

pub use adamw::{AdamW, AdamWConfig};
pub use model::{decode, elbo_loss, elbo_terms, encode, grad, loss_and_grad, ElboTerms};
pub use params::{init_params, ModelFile, VaeParams};
pub use train::{
    baseline_vae, sample_generative, train, TraceRow, TrainConfig, TrainTrace, MIN_TRAIN_SAMPLES,
    FULL_BATCH_LIMIT, MINIBATCH_SIZE,
};
