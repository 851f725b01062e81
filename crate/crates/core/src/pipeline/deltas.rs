use serde::{Deserialize, Serialize};

use crate::vae::TrainTrace;
use crate::{NcfaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub epoch: usize,
    pub train_delta: f64,
    pub val_delta: f64,
}

/// Loss differences, comparison minus NCFA. Positive favours NCFA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deltas {
    pub training: f64,
    pub validation: f64,
    pub per_epoch: Vec<DeltaRow>,
}

/// Δ = other − ncfa at the final epoch and at every epoch.
pub fn compute_deltas(ncfa: &TrainTrace, other: &TrainTrace) -> Result<Deltas> {
    if ncfa.len() != other.len() {
        return Err(NcfaError::DimensionMismatch(format!(
            "traces have {} and {} epochs",
            ncfa.len(),
            other.len()
        )));
    }
    let per_epoch = ncfa
        .rows
        .iter()
        .zip(&other.rows)
        .map(|(a, b)| DeltaRow {
            epoch: a.epoch,
            train_delta: b.train_loss - a.train_loss,
            val_delta: b.val_loss - a.val_loss,
        })
        .collect();
    Ok(Deltas {
        training: other.final_train_loss() - ncfa.final_train_loss(),
        validation: other.final_val_loss() - ncfa.final_val_loss(),
        per_epoch,
    })
}
