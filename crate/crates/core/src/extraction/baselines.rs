//! Baseline attack schemes: plain distillation, bagged hard-label committees,
//! and committee-of-co-teaching-pairs, all trained from the same queried
//! dataset as split co-teaching.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::Sample;
use crate::error::{Error, Result};
use crate::qnn::{
    param_shift_gradient, AdamState, Loss, Predictor, QnnArchitecture, QnnModel, RawOutput,
    DEFAULT_HUBER_DELTA,
};
use crate::rng::{label_seed, mix, stream_rng};
use crate::victim::{QueriedDataset, TrainConfig};

use super::coteach::{co_teach_train, CoTeachConfig, Partition};
use super::targets::{aggregate_all, aggregate_all_majority, one_hot, TrainingTarget};

/// Which label a distillation run regresses on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelMode {
    /// The aggregated soft distribution.
    Soft,
    /// A one-hot encoding of the hard label.
    Hard,
}

/// Mean-output committee of substitute models.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub members: Vec<QnnModel>,
}

impl Predictor for Ensemble {
    fn predict(&self, features: &[f64]) -> Result<RawOutput> {
        if self.members.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut mean = [0.0f64; 2];
        for member in &self.members {
            let out = member.predict(features)?;
            mean[0] += out.probs[0];
            mean[1] += out.probs[1];
        }
        let n = self.members.len() as f64;
        Ok(RawOutput { probs: [mean[0] / n, mean[1] / n] })
    }
}

/// Train one substitute by Huber regression on the given targets: Adam with
/// default hyperparameters, seeded init and per-epoch shuffles.
pub fn distill(
    targets: &[TrainingTarget],
    arch: QnnArchitecture,
    mode: LabelMode,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<QnnModel> {
    if targets.is_empty() {
        return Err(Error::EmptyDataset);
    }
    cfg.validate()?;
    let mut model = QnnModel::init(arch, label_seed(seed, "init"))?;
    let mut adam = AdamState::new(arch.param_count());
    let loss = Loss::Huber { delta: DEFAULT_HUBER_DELTA };
    for epoch in 0..cfg.epochs {
        let mut order: Vec<usize> = (0..targets.len()).collect();
        order.shuffle(&mut stream_rng(seed, "shuffle", epoch as u64));
        for chunk in order.chunks(cfg.batch_size) {
            let mut acc = vec![0.0; model.params.len()];
            for &i in chunk {
                let target = &targets[i];
                let label = match mode {
                    LabelMode::Soft => target.soft,
                    LabelMode::Hard => one_hot(target.hard),
                };
                let grad = param_shift_gradient(&model, &target.features, &label, loss)?;
                for (a, g) in acc.iter_mut().zip(grad) {
                    *a += g;
                }
            }
            let n = chunk.len() as f64;
            for a in &mut acc {
                *a /= n;
            }
            adam.apply(&mut model.params, &acc)?;
        }
    }
    Ok(model)
}

/// Plain distillation on the aggregated soft labels; the simplest scheme and
/// the reference point the others are measured against.
pub fn baseline_cloudleak(
    data: &QueriedDataset,
    arch: QnnArchitecture,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<QnnModel> {
    let targets = aggregate_all(data)?;
    distill(&targets, arch, LabelMode::Soft, cfg, seed)
}

/// Seed for committee `i`: the first committee runs on the caller's seed
/// verbatim so a one-member ensemble reproduces its unbagged counterpart.
fn committee_seed(seed: u64, i: usize) -> u64 {
    if i == 0 {
        seed
    } else {
        mix(label_seed(seed, "committee"), i as u64)
    }
}

/// Bootstrap bag for committee `i`: `round(fraction * n)` draws with
/// replacement (at least one). A fraction of 1 or more short-circuits to the
/// identity bag in original order, which keeps one-committee ensembles equal
/// to their unbagged baselines.
fn draw_bag(
    targets: &[TrainingTarget],
    fraction: f64,
    seed: u64,
    committee: usize,
) -> Vec<TrainingTarget> {
    if fraction >= 1.0 {
        return targets.to_vec();
    }
    let mut rng = stream_rng(seed, "bag", committee as u64);
    let k = ((fraction * targets.len() as f64).round() as usize).max(1);
    (0..k).map(|_| targets[rng.gen_range(0..targets.len())].clone()).collect()
}

fn validate_bagging(n_committees: usize, bag_fraction: f64) -> Result<()> {
    if n_committees == 0 {
        return Err(Error::InvalidHyper("ensemble needs at least one committee".into()));
    }
    if !(bag_fraction > 0.0 && bag_fraction.is_finite()) {
        return Err(Error::InvalidHyper(format!(
            "bag fraction must be positive and finite, got {bag_fraction}"
        )));
    }
    Ok(())
}

/// Committee of substitutes, each distilled on a bootstrap bag of per-round
/// majority-vote hard labels; prediction is the mean member output.
pub fn baseline_quantumleak(
    data: &QueriedDataset,
    arch: QnnArchitecture,
    cfg: &TrainConfig,
    n_committees: usize,
    bag_fraction: f64,
    seed: u64,
) -> Result<Ensemble> {
    validate_bagging(n_committees, bag_fraction)?;
    let targets = aggregate_all_majority(data)?;
    let mut members = Vec::with_capacity(n_committees);
    for i in 0..n_committees {
        let bag = draw_bag(&targets, bag_fraction, seed, i);
        members.push(distill(&bag, arch, LabelMode::Hard, cfg, committee_seed(seed, i))?);
    }
    Ok(Ensemble { members })
}

/// Committee of co-teaching pairs, one pair per bootstrap bag of soft-label
/// targets; each pair contributes its better peer by validation accuracy and
/// the ensemble predicts by mean output.
#[allow(clippy::too_many_arguments)]
pub fn baseline_cot_ensemble(
    data: &QueriedDataset,
    f: f64,
    cfg: &CoTeachConfig,
    arch: QnnArchitecture,
    n_committees: usize,
    bag_fraction: f64,
    seed: u64,
    val: &[Sample],
) -> Result<Ensemble> {
    validate_bagging(n_committees, bag_fraction)?;
    if !(0.0..1.0).contains(&f) {
        return Err(Error::InvalidHyper(format!("forget rate must lie in [0, 1), got {f}")));
    }
    let targets = aggregate_all(data)?;
    let mut members = Vec::with_capacity(n_committees);
    for i in 0..n_committees {
        let bag = draw_bag(&targets, bag_fraction, seed, i);
        let partitions = [Partition { targets: bag, forget: f }];
        let out = co_teach_train(
            &partitions,
            arch,
            cfg.epochs,
            cfg.batch_size,
            cfg.ramp_epochs,
            committee_seed(seed, i),
            val,
        )?;
        members.push(if out.q1_val >= out.q2_val { out.q1 } else { out.q2 });
    }
    Ok(Ensemble { members })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::super::coteach::baseline_coteach;
    use super::*;
    use crate::qnn::evaluate_accuracy;
    use crate::victim::QueryRecord;

    fn toy_dataset(n: usize, m_rounds: usize, noise: f64, seed: u64) -> QueriedDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let times: Vec<f64> = (1..=m_rounds).map(|k| k as f64).collect();
        let records = (0..n)
            .map(|i| {
                let mut features = [0.0; 8];
                for f in &mut features {
                    *f = rng.gen_range(-1.0..1.0);
                }
                let base: f64 = rng.gen();
                let probs_by_round = (0..m_rounds)
                    .map(|_| {
                        let p1 = (base + rng.gen_range(-noise..=noise)).clamp(0.0, 1.0);
                        [1.0 - p1, p1]
                    })
                    .collect();
                QueryRecord {
                    sample_id: i as u64,
                    features,
                    probs_by_round,
                    query_times: times.clone(),
                }
            })
            .collect();
        QueriedDataset { records }
    }

    fn toy_val(n: usize, seed: u64) -> Vec<Sample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let mut features = [0.0; 8];
                for f in &mut features {
                    *f = rng.gen_range(-1.0..1.0);
                }
                Sample { features, class: rng.gen_range(0..2) as u8 }
            })
            .collect()
    }

    #[test]
    fn single_committee_full_bag_equals_hard_label_distillation() {
        let data = toy_dataset(20, 3, 0.2, 71);
        let arch = QnnArchitecture::default();
        let cfg = TrainConfig { epochs: 2, batch_size: 8 };
        let seed = 17;
        let ensemble = baseline_quantumleak(&data, arch, &cfg, 1, 1.0, seed).unwrap();
        assert_eq!(ensemble.members.len(), 1);

        let targets = aggregate_all_majority(&data).unwrap();
        let reference = distill(&targets, arch, LabelMode::Hard, &cfg, seed).unwrap();
        assert_eq!(ensemble.members[0].params, reference.params);
    }

    #[test]
    fn single_committee_cot_ensemble_equals_plain_coteach() {
        let data = toy_dataset(18, 2, 0.15, 72);
        let val = toy_val(10, 73);
        let arch = QnnArchitecture::default();
        let cfg = CoTeachConfig { epochs: 2, batch_size: 6, ..CoTeachConfig::default() };
        let seed = 23;
        let f = 0.2;
        let ensemble =
            baseline_cot_ensemble(&data, f, &cfg, arch, 1, 1.0, seed, &val).unwrap();
        let reference = baseline_coteach(&data, f, &cfg, arch, seed, &val).unwrap();
        assert_eq!(ensemble.members.len(), 1);
        assert_eq!(ensemble.members[0].params, reference.model.params);
    }

    #[test]
    fn ensemble_outputs_stay_on_the_simplex() {
        let data = toy_dataset(16, 2, 0.3, 74);
        let arch = QnnArchitecture::default();
        let cfg = TrainConfig { epochs: 1, batch_size: 8 };
        let ensemble = baseline_quantumleak(&data, arch, &cfg, 3, 0.8, 5).unwrap();
        assert_eq!(ensemble.members.len(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            let mut features = [0.0; 8];
            for f in &mut features {
                *f = rng.gen_range(-1.0..1.0);
            }
            let out = ensemble.predict(&features).unwrap();
            assert!(out.probs.iter().all(|p| (0.0..=1.0).contains(p)));
            assert!((out.probs[0] + out.probs[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ensemble_accuracy_is_at_least_the_worst_member() {
        let data = toy_dataset(24, 2, 0.25, 75);
        let test_set = toy_val(16, 76);
        let arch = QnnArchitecture::default();
        let cfg = TrainConfig { epochs: 2, batch_size: 8 };
        let ensemble = baseline_quantumleak(&data, arch, &cfg, 3, 0.8, 6).unwrap();
        let worst = ensemble
            .members
            .iter()
            .map(|m| evaluate_accuracy(m, &test_set).unwrap())
            .fold(f64::INFINITY, f64::min);
        let joint = evaluate_accuracy(&ensemble, &test_set).unwrap();
        assert!(
            joint >= worst - 1e-12,
            "ensemble {joint} fell below its worst member {worst}"
        );
    }

    #[test]
    fn bags_differ_between_committees_and_runs_are_deterministic() {
        let data = toy_dataset(20, 2, 0.2, 77);
        let arch = QnnArchitecture::default();
        let cfg = TrainConfig { epochs: 1, batch_size: 8 };
        let a = baseline_quantumleak(&data, arch, &cfg, 3, 0.8, 8).unwrap();
        let b = baseline_quantumleak(&data, arch, &cfg, 3, 0.8, 8).unwrap();
        assert_eq!(a, b);
        // Members start from different seeds and bags, so they must differ.
        assert_ne!(a.members[0].params, a.members[1].params);
        assert_ne!(a.members[1].params, a.members[2].params);
    }

    #[test]
    fn cloudleak_is_deterministic_and_uses_soft_labels() {
        let data = toy_dataset(20, 2, 0.2, 78);
        let arch = QnnArchitecture::default();
        let cfg = TrainConfig { epochs: 2, batch_size: 8 };
        let a = baseline_cloudleak(&data, arch, &cfg, 9).unwrap();
        let b = baseline_cloudleak(&data, arch, &cfg, 9).unwrap();
        assert_eq!(a.params, b.params);

        let targets = aggregate_all(&data).unwrap();
        let soft = distill(&targets, arch, LabelMode::Soft, &cfg, 9).unwrap();
        assert_eq!(a.params, soft.params);
        let hard = distill(&targets, arch, LabelMode::Hard, &cfg, 9).unwrap();
        assert_ne!(a.params, hard.params);
    }

    #[test]
    fn zero_epoch_distillation_returns_the_seeded_init() {
        let data = toy_dataset(6, 1, 0.0, 79);
        let targets = aggregate_all(&data).unwrap();
        let arch = QnnArchitecture::default();
        let cfg = TrainConfig { epochs: 0, batch_size: 8 };
        let model = distill(&targets, arch, LabelMode::Soft, &cfg, 33).unwrap();
        let init = QnnModel::init(arch, label_seed(33, "init")).unwrap();
        assert_eq!(model.params, init.params);
    }

    #[test]
    fn bagging_validation_rejects_bad_inputs() {
        let data = toy_dataset(6, 1, 0.0, 80);
        let arch = QnnArchitecture::default();
        let cfg = TrainConfig { epochs: 1, batch_size: 4 };
        assert!(matches!(
            baseline_quantumleak(&data, arch, &cfg, 0, 0.8, 1),
            Err(Error::InvalidHyper(_))
        ));
        assert!(matches!(
            baseline_quantumleak(&data, arch, &cfg, 2, 0.0, 1),
            Err(Error::InvalidHyper(_))
        ));
        assert!(matches!(
            baseline_quantumleak(&data, arch, &cfg, 2, f64::NAN, 1),
            Err(Error::InvalidHyper(_))
        ));
        let empty = QueriedDataset { records: vec![] };
        assert!(baseline_cloudleak(&empty, arch, &cfg, 1).is_err());
    }

    #[test]
    fn bag_draws_resample_with_replacement_at_the_requested_size() {
        let data = toy_dataset(10, 1, 0.0, 81);
        let targets = aggregate_all(&data).unwrap();
        let bag = draw_bag(&targets, 0.8, 3, 1);
        assert_eq!(bag.len(), 8);
        assert!(bag.iter().all(|t| t.sample_id < 10));
        let identity = draw_bag(&targets, 1.0, 3, 1);
        assert_eq!(identity, targets);
    }
}
