use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sim::{StateVector, MAX_QUBITS};

/// Load a feature vector into the first amplitudes of a state twice its
/// length, L2-normalized, remaining amplitudes zero.
///
/// The feature count must be a power of two so the padded state is a whole
/// number of qubits with the features occupying exactly the lower half of the
/// index range (highest qubit fixed to |0>).
pub fn amplitude_encode(features: &[f64]) -> Result<StateVector> {
    let len = features.len();
    let dim = len
        .checked_mul(2)
        .ok_or(Error::FeatureLength(len))?;
    if !len.is_power_of_two() || dim > (1 << MAX_QUBITS) || len < 2 {
        return Err(Error::FeatureLength(len));
    }
    let norm_sq: f64 = features.iter().map(|x| x * x).sum();
    if !norm_sq.is_finite() {
        return Err(Error::NonFiniteFeature);
    }
    if norm_sq <= 0.0 {
        return Err(Error::ZeroFeatureVector);
    }
    let norm = norm_sq.sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for (a, &x) in amps.iter_mut().zip(features) {
        *a = Complex64::new(x / norm, 0.0);
    }
    let n_qubits = dim.trailing_zeros() as usize;
    StateVector::from_amplitudes(n_qubits, amps)
}
