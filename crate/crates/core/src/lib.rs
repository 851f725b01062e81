//! Neuro-causal factor analysis.
//!
//! The pipeline estimates an unconditional dependence graph (UDG) over the
//! measurement variables with pairwise marginal independence tests, covers it
//! with a minimum edge clique cover to get a latent causal (MCM) graph, spreads
//! a budget of latent degrees of freedom over the cliques, and trains a
//! variational autoencoder whose decoder is masked by the resulting graph.
//!
//! Modules:
//! - [`graphs`]: UDG / clique cover / MCM / NCFA graph types and metrics
//! - [`ecc`]: exact, heuristic and pure-child edge clique cover solvers
//! - [`indep`]: distance covariance and Chatterjee's xi tests, UDG estimation
//! - [`vae`]: masked VAE, ELBO, gradients, AdamW, training
//! - [`synth`]: Erdős–Rényi ground truths and linear factor model data
//! - [`pipeline`]: end-to-end runs, baseline comparison, synthetic sweeps
//!
//! The `parallel` feature (on by default) runs pairwise tests and sweep
//! replicates on rayon. Every parallel path has a sequential twin selected by
//! [`Execution`] and both produce identical results.

pub mod ecc;
mod error;
pub mod graphs;
pub mod indep;
mod par;
pub mod pipeline;
pub mod rng;
pub mod synth;
pub mod vae;

pub use error::{NcfaError, Result};
pub use par::Execution;
