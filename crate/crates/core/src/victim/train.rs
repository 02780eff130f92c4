use crate::data::Sample;
use crate::error::{Error, Result};
use crate::qnn::{
    evaluate_accuracy, param_shift_gradient, AdamState, Loss, QnnArchitecture, QnnModel,
};
use crate::rng::{label_seed, stream_rng};

/// Epoch and batch budget for supervised training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 30, batch_size: 32 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidHyper("batch size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a training run: the best-validation model plus the per-epoch
/// history that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub model: QnnModel,
    pub best_epoch: usize,
    pub best_val_accuracy: f64,
    pub epoch_mean_loss: Vec<f64>,
    pub epoch_val_accuracy: Vec<f64>,
}

fn one_hot(class: u8) -> [f64; 2] {
    if class == 0 {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    }
}

/// Supervised cross-entropy training of a fresh model, returning the epoch
/// checkpoint with the highest validation accuracy (earliest epoch wins
/// ties). Zero epochs return the initialized model untouched.
pub fn train_victim(
    train: &[Sample],
    val: &[Sample],
    arch: QnnArchitecture,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<TrainReport> {
    cfg.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut model = QnnModel::init(arch, label_seed(seed, "init"))?;
    let mut adam = AdamState::new(model.params.len());
    let loss = Loss::CrossEntropy;

    let mut best_params = model.params.clone();
    let mut best_epoch = 0usize;
    let mut best_val = evaluate_accuracy(&model, val)?;
    let mut epoch_mean_loss = Vec::with_capacity(cfg.epochs);
    let mut epoch_val_accuracy = Vec::with_capacity(cfg.epochs);

    let mut grad_sum = vec![0.0f64; model.params.len()];
    for epoch in 0..cfg.epochs {
        let mut order: Vec<usize> = (0..train.len()).collect();
        {
            use rand::seq::SliceRandom;
            order.shuffle(&mut stream_rng(seed, "shuffle", epoch as u64));
        }
        let mut loss_sum = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grad_sum.iter_mut().for_each(|g| *g = 0.0);
            for &i in batch {
                let sample = &train[i];
                let target = one_hot(sample.class);
                let g = param_shift_gradient(&model, &sample.features, &target, loss)?;
                for (acc, gi) in grad_sum.iter_mut().zip(&g) {
                    *acc += gi;
                }
                let out = crate::qnn::forward(&model, &sample.features)?;
                loss_sum += loss.value(&out.probs, &target);
            }
            let inv = 1.0 / batch.len() as f64;
            grad_sum.iter_mut().for_each(|g| *g *= inv);
            adam.apply(&mut model.params, &grad_sum)?;
        }
        epoch_mean_loss.push(loss_sum / train.len() as f64);
        let val_acc = evaluate_accuracy(&model, val)?;
        epoch_val_accuracy.push(val_acc);
        if val_acc > best_val {
            best_val = val_acc;
            best_epoch = epoch + 1;
            best_params.copy_from_slice(&model.params);
        }
    }
    model.params = best_params;
    Ok(TrainReport {
        model,
        best_epoch,
        best_val_accuracy: best_val,
        epoch_mean_loss,
        epoch_val_accuracy,
    })
}
