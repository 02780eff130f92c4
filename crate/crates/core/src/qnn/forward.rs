use crate::error::{Error, Result};
use crate::qnn::encode::amplitude_encode;
use crate::qnn::model::QnnModel;
use crate::sim::{depolarizing, DensityMatrix, KrausChannel};

/// Two-class output distribution from the readout qubit's marginal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawOutput {
    pub probs: [f64; 2],
}

impl RawOutput {
    /// Predicted class, ties resolved toward class 0.
    pub fn argmax(&self) -> u8 {
        if self.probs[1] > self.probs[0] {
            1
        } else {
            0
        }
    }

    pub fn total_variation(&self, other: &RawOutput) -> f64 {
        0.5 * ((self.probs[0] - other.probs[0]).abs() + (self.probs[1] - other.probs[1]).abs())
    }
}

/// Per-gate depolarizing strengths for the noisy execution path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateRates {
    pub p_1q: f64,
    pub p_2q: f64,
}

impl GateRates {
    pub const NONE: GateRates = GateRates { p_1q: 0.0, p_2q: 0.0 };
}

fn check_width(model: &QnnModel, encoded_qubits: usize) -> Result<()> {
    if encoded_qubits != model.arch.n_qubits {
        return Err(Error::DimensionMismatch {
            got: 1 << encoded_qubits,
            expected: 1 << model.arch.n_qubits,
        });
    }
    Ok(())
}

/// Noiseless prediction: pure-state evolution of the encoded features.
pub fn forward(model: &QnnModel, features: &[f64]) -> Result<RawOutput> {
    let mut sv = amplitude_encode(features)?;
    check_width(model, sv.n_qubits())?;
    for gate in model.arch.circuit(&model.params)? {
        sv.apply(&gate)?;
    }
    let probs = sv.marginal_probs(model.arch.readout_qubit)?;
    Ok(RawOutput { probs })
}

/// Noisy prediction: density-matrix evolution with a depolarizing channel of
/// the matching arity inserted after every gate. Zero rates reproduce the
/// pure-state result (useful as a consistency check); readout corruption is
/// applied separately by the caller, not here.
pub fn forward_with_rates(model: &QnnModel, features: &[f64], rates: &GateRates) -> Result<RawOutput> {
    let sv = amplitude_encode(features)?;
    check_width(model, sv.n_qubits())?;
    let mut rho = DensityMatrix::from_statevector(&sv)?;
    let ch1: Option<KrausChannel> = if rates.p_1q > 0.0 {
        Some(depolarizing(rates.p_1q, 1)?)
    } else {
        // Validate even when skipping application, so a negative rate is
        // rejected instead of silently treated as noiseless.
        depolarizing(rates.p_1q, 1)?;
        None
    };
    let ch2: Option<KrausChannel> = if rates.p_2q > 0.0 {
        Some(depolarizing(rates.p_2q, 2)?)
    } else {
        depolarizing(rates.p_2q, 2)?;
        None
    };
    for gate in model.arch.circuit(&model.params)? {
        rho.apply(&gate)?;
        match gate.qubits().as_slice() {
            [t] => {
                if let Some(ch) = &ch1 {
                    rho.apply_channel(ch, &[*t])?;
                }
            }
            [c, t] => {
                if let Some(ch) = &ch2 {
                    rho.apply_channel(ch, &[*c, *t])?;
                }
            }
            _ => unreachable!("gates act on one or two qubits"),
        }
    }
    let probs = rho.marginal_probs(model.arch.readout_qubit)?;
    Ok(RawOutput { probs })
}
