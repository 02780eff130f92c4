//! Loss-distribution diagnostics: where noisy-labeled samples sit in a
//! substitute's per-sample loss histogram.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::qnn::{forward, huber_loss, QnnModel, DEFAULT_HUBER_DELTA};

use super::targets::TrainingTarget;

/// Per-sample Huber losses bucketed over [0, 1], counted separately for
/// samples whose aggregated hard label agrees with the reference label
/// (`clean`) and those where it flipped (`noisy`).
#[derive(Debug, Clone, PartialEq)]
pub struct LossHistogram {
    /// `n_bins + 1` uniform edges spanning [0, 1].
    pub edges: Vec<f64>,
    pub clean: Vec<usize>,
    pub noisy: Vec<usize>,
}

impl LossHistogram {
    pub fn n_bins(&self) -> usize {
        self.clean.len()
    }

    pub fn total(&self) -> usize {
        self.clean.iter().sum::<usize>() + self.noisy.iter().sum::<usize>()
    }

    pub fn noisy_total(&self) -> usize {
        self.noisy.iter().sum()
    }
}

/// Histogram the model's per-sample losses against the soft targets. The
/// model is used as given; callers wanting the canonical "after one epoch"
/// picture train for exactly one epoch first. `reference` maps sample id to
/// the true class, which only the simulation side knows.
pub fn loss_histogram(
    model: &QnnModel,
    targets: &[TrainingTarget],
    reference: &HashMap<u64, u8>,
    bins: usize,
) -> Result<LossHistogram> {
    if targets.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if bins == 0 {
        return Err(Error::InvalidHyper("histogram needs at least one bin".into()));
    }
    let mut clean = vec![0usize; bins];
    let mut noisy = vec![0usize; bins];
    for target in targets {
        let truth =
            *reference.get(&target.sample_id).ok_or(Error::MissingCleanLabel(target.sample_id))?;
        let pred = forward(model, &target.features)?;
        let loss = huber_loss(&pred.probs, &target.soft, DEFAULT_HUBER_DELTA);
        // Two-class Huber loss against simplex targets cannot exceed 1, so
        // uniform bins over [0, 1] cover everything; the top edge closes.
        let bin = ((loss * bins as f64).floor() as usize).min(bins - 1);
        if target.hard == truth {
            clean[bin] += 1;
        } else {
            noisy[bin] += 1;
        }
    }
    let edges = (0..=bins).map(|i| i as f64 / bins as f64).collect();
    Ok(LossHistogram { edges, clean, noisy })
}
