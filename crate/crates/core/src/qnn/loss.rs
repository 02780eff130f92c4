/// Default Huber transition point between quadratic and linear regimes.
pub const DEFAULT_HUBER_DELTA: f64 = 1.0;

/// Floor applied to predicted probabilities inside the log, keeping the
/// cross-entropy finite for saturated outputs.
const CE_FLOOR: f64 = 1e-12;

/// Huber penalty of a single residual.
pub fn huber(residual: f64, delta: f64) -> f64 {
    let a = residual.abs();
    if a <= delta {
        0.5 * a * a
    } else {
        delta * (a - 0.5 * delta)
    }
}

/// d huber / d residual.
pub fn huber_grad(residual: f64, delta: f64) -> f64 {
    if residual.abs() <= delta {
        residual
    } else {
        delta * residual.signum()
    }
}

/// Componentwise Huber penalty summed over the two-class distribution.
pub fn huber_loss(pred: &[f64; 2], target: &[f64; 2], delta: f64) -> f64 {
    huber(pred[0] - target[0], delta) + huber(pred[1] - target[1], delta)
}

/// Training objective over two-class output distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Loss {
    /// Distillation against soft targets.
    Huber { delta: f64 },
    /// Supervised loss against a one-hot target.
    CrossEntropy,
}

impl Loss {
    pub fn value(&self, pred: &[f64; 2], target: &[f64; 2]) -> f64 {
        match *self {
            Loss::Huber { delta } => huber_loss(pred, target, delta),
            Loss::CrossEntropy => {
                -(target[0] * pred[0].max(CE_FLOOR).ln() + target[1] * pred[1].max(CE_FLOOR).ln())
            }
        }
    }

    /// Gradient with respect to the predicted distribution.
    pub fn grad_pred(&self, pred: &[f64; 2], target: &[f64; 2]) -> [f64; 2] {
        match *self {
            Loss::Huber { delta } => [
                huber_grad(pred[0] - target[0], delta),
                huber_grad(pred[1] - target[1], delta),
            ],
            Loss::CrossEntropy => {
                [-target[0] / pred[0].max(CE_FLOOR), -target[1] / pred[1].max(CE_FLOOR)]
            }
        }
    }
}
