//! Turning multi-round query records into training targets for substitute
//! models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::victim::{QueriedDataset, QueryRecord};

/// One training example distilled from a query record: the mean output
/// distribution across rounds (`soft`) and its argmax class (`hard`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTarget {
    pub sample_id: u64,
    pub features: [f64; 8],
    pub soft: [f64; 2],
    pub hard: u8,
}

/// Point-mass distribution for a class label.
pub fn one_hot(class: u8) -> [f64; 2] {
    if class == 0 {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    }
}

/// Average the per-round outputs into one soft label (renormalized so it sums
/// to exactly 1) and take its argmax as the hard label, ties to class 0.
pub fn aggregate_labels(record: &QueryRecord) -> Result<TrainingTarget> {
    if record.probs_by_round.is_empty() {
        return Err(Error::NotEnoughRounds(0));
    }
    let m = record.probs_by_round.len() as f64;
    let mut mean = [0.0f64; 2];
    for p in &record.probs_by_round {
        mean[0] += p[0];
        mean[1] += p[1];
    }
    mean[0] /= m;
    mean[1] /= m;
    let total = mean[0] + mean[1];
    let soft = [mean[0] / total, mean[1] / total];
    let hard = u8::from(soft[1] > soft[0]);
    Ok(TrainingTarget { sample_id: record.sample_id, features: record.features, soft, hard })
}

/// Aggregate every record of a dataset, in dataset order.
pub fn aggregate_all(data: &QueriedDataset) -> Result<Vec<TrainingTarget>> {
    data.validate()?;
    data.records.iter().map(aggregate_labels).collect()
}

/// Majority vote over the per-round argmax labels (per-round ties count for
/// class 0). An even vote is broken by the mean soft label's argmax.
pub fn majority_hard_label(record: &QueryRecord) -> Result<u8> {
    if record.probs_by_round.is_empty() {
        return Err(Error::NotEnoughRounds(0));
    }
    let ones = record.probs_by_round.iter().filter(|p| p[1] > p[0]).count();
    let zeros = record.probs_by_round.len() - ones;
    match ones.cmp(&zeros) {
        std::cmp::Ordering::Greater => Ok(1),
        std::cmp::Ordering::Less => Ok(0),
        std::cmp::Ordering::Equal => Ok(aggregate_labels(record)?.hard),
    }
}

/// Aggregate every record but replace the hard label with the per-round
/// majority vote, the label policy of committee-style bagging attacks.
pub(crate) fn aggregate_all_majority(data: &QueriedDataset) -> Result<Vec<TrainingTarget>> {
    data.validate()?;
    data.records
        .iter()
        .map(|record| {
            let mut target = aggregate_labels(record)?;
            target.hard = majority_hard_label(record)?;
            Ok(target)
        })
        .collect()
}
