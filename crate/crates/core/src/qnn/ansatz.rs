use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Gate, MAX_QUBITS};

/// Shape of the variational circuit: qubit count, layer count, and which
/// qubit's marginal is read out as the two-class prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QnnArchitecture {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub readout_qubit: usize,
}

/// What kind of gate a parameter drives; the two kinds need different
/// parameter-shift rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Single-qubit rotation (RZ or RY).
    Rotation,
    /// Controlled-RX entangler.
    Controlled,
}

impl Default for QnnArchitecture {
    fn default() -> Self {
        Self { n_qubits: 4, n_layers: 2, readout_qubit: 0 }
    }
}

impl QnnArchitecture {
    pub fn new(n_qubits: usize, n_layers: usize, readout_qubit: usize) -> Result<Self> {
        let arch = Self { n_qubits, n_layers, readout_qubit };
        arch.validate()?;
        Ok(arch)
    }

    pub fn validate(&self) -> Result<()> {
        // The entangling ring needs at least two distinct qubits.
        if self.n_qubits < 2 || self.n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount { got: self.n_qubits, max: MAX_QUBITS });
        }
        if self.n_layers == 0 {
            return Err(Error::InvalidHyper("layer count must be at least 1".into()));
        }
        if self.readout_qubit >= self.n_qubits {
            return Err(Error::QubitIndex { index: self.readout_qubit, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    /// Trainable parameters: per layer, three rotation angles per qubit plus
    /// one angle per ring entangler.
    pub fn param_count(&self) -> usize {
        self.n_layers * 4 * self.n_qubits
    }

    fn params_per_layer(&self) -> usize {
        4 * self.n_qubits
    }

    /// Which shift rule applies to parameter `k` (layer-major order).
    pub fn param_kind(&self, k: usize) -> ParamKind {
        if k % self.params_per_layer() < 3 * self.n_qubits {
            ParamKind::Rotation
        } else {
            ParamKind::Controlled
        }
    }

    /// Expand a parameter vector into the gate sequence. Layer-major: layer 0
    /// rotations (qubit 0's RZ, RY, RZ, then qubit 1's, ...), layer 0 ring
    /// (control 0, control 1, ...), then layer 1, and so on.
    pub fn circuit(&self, params: &[f64]) -> Result<Vec<Gate>> {
        self.validate()?;
        if params.len() != self.param_count() {
            return Err(Error::ParamCount { got: params.len(), expected: self.param_count() });
        }
        let mut gates = Vec::with_capacity(self.n_layers * 4 * self.n_qubits);
        let mut k = 0;
        for _ in 0..self.n_layers {
            for q in 0..self.n_qubits {
                gates.push(Gate::Rz { target: q, angle: params[k] });
                gates.push(Gate::Ry { target: q, angle: params[k + 1] });
                gates.push(Gate::Rz { target: q, angle: params[k + 2] });
                k += 3;
            }
            for q in 0..self.n_qubits {
                gates.push(Gate::Crx {
                    control: q,
                    target: (q + 1) % self.n_qubits,
                    angle: params[k],
                });
                k += 1;
            }
        }
        Ok(gates)
    }
}
