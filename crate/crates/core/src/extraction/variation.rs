//! Per-sample label variation across query rounds and the threshold split
//! into noise-robust and noise-vulnerable subsets.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::victim::QueriedDataset;

/// Total-variation distance between two two-class distributions: half the L1
/// distance, 0 for identical vectors and 1 for opposite point masses.
pub fn total_variation(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    0.5 * ((a[0] - b[0]).abs() + (a[1] - b[1]).abs())
}

/// How much a sample's label moved across query rounds: the maximum pairwise
/// total-variation distance among the per-round output vectors. A single
/// round has no pairs and scores 0.
pub fn label_variation(rounds: &[[f64; 2]]) -> Result<f64> {
    if rounds.is_empty() {
        return Err(Error::NotEnoughRounds(0));
    }
    let mut worst = 0.0f64;
    for (i, a) in rounds.iter().enumerate() {
        for b in &rounds[i + 1..] {
            worst = worst.max(total_variation(a, b));
        }
    }
    Ok(worst)
}

/// Outcome of thresholding a queried dataset by label variation. `robust`
/// holds the sample ids whose variation stayed at or below the threshold,
/// `vulnerable` the rest; both preserve dataset order.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub v_th: f64,
    pub robust: Vec<u64>,
    pub vulnerable: Vec<u64>,
    pub variations: BTreeMap<u64, f64>,
}

impl SplitResult {
    pub fn n_samples(&self) -> usize {
        self.robust.len() + self.vulnerable.len()
    }

    /// |D_r| / |D|.
    pub fn robust_fraction(&self) -> f64 {
        self.robust.len() as f64 / self.n_samples() as f64
    }
}

/// Partition a queried dataset: samples whose label variation is at most
/// `v_th` are robust, the rest vulnerable.
pub fn split(data: &QueriedDataset, v_th: f64) -> Result<SplitResult> {
    if !(0.0..=1.0).contains(&v_th) {
        return Err(Error::InvalidThreshold(v_th));
    }
    data.validate()?;
    let mut robust = Vec::new();
    let mut vulnerable = Vec::new();
    let mut variations = BTreeMap::new();
    for record in &data.records {
        let var = label_variation(&record.probs_by_round)?;
        variations.insert(record.sample_id, var);
        if var <= v_th {
            robust.push(record.sample_id);
        } else {
            vulnerable.push(record.sample_id);
        }
    }
    Ok(SplitResult { v_th, robust, vulnerable, variations })
}
