//! Substitute-model attacks on a queried victim: variation-based dataset
//! partitioning, co-teaching trainers, the baseline schemes they are compared
//! against, and loss-distribution diagnostics.
//!
//! Every attack consumes one fixed [`QueriedDataset`](crate::victim::QueriedDataset);
//! none of them issues further queries, so all schemes share an identical
//! query budget by construction.

mod baselines;
mod coteach;
mod diagnostics;
mod targets;
mod variation;

pub use baselines::{
    baseline_cloudleak, baseline_cot_ensemble, baseline_quantumleak, distill, Ensemble, LabelMode,
};
pub use coteach::{
    baseline_coteach, co_teach_epoch, ramp, small_loss_select, split_co_teach, AttackModel,
    BatchTrace, CoTeachConfig, ScotResult, F1_GRID, F2_GRID, V_TH_GRID,
};
pub use diagnostics::{loss_histogram, LossHistogram};
pub use targets::{aggregate_all, aggregate_labels, majority_hard_label, one_hot, TrainingTarget};
pub use variation::{label_variation, split, total_variation, SplitResult};
