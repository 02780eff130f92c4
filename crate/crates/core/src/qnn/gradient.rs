use std::f64::consts::FRAC_PI_2;

use crate::error::Result;
use crate::qnn::ansatz::{ParamKind, QnnArchitecture};
use crate::qnn::encode::amplitude_encode;
use crate::qnn::loss::Loss;
use crate::qnn::model::QnnModel;
use crate::sim::StateVector;

/// Readout probability of class 0 for a given parameter assignment, reusing
/// an already-encoded input state.
fn p0_with(arch: &QnnArchitecture, params: &[f64], encoded: &StateVector) -> Result<f64> {
    let mut sv = encoded.clone();
    for gate in arch.circuit(params)? {
        sv.apply(&gate)?;
    }
    Ok(sv.marginal_probs(arch.readout_qubit)?[0])
}

/// Exact gradient of the class-0 readout probability with respect to every
/// parameter, by evaluating the circuit at shifted angles.
///
/// Rotation gates have eigenvalue gap 1 in the half-angle convention, so the
/// familiar two-point rule at +-pi/2 with divisor 2 is exact. The
/// controlled-RX generator mixes two frequencies (its eigenvalues are
/// {0, +-1/2}), and no two-point rule is exact for it; the four-point rule
/// below recovers both frequency components exactly:
///
///   d/dt f(t) = c+ [f(t + pi/2) - f(t - pi/2)] - c- [f(t + 3pi/2) - f(t - 3pi/2)]
///
/// with c+- = (sqrt(2) +- 1) / (4 sqrt(2)).
pub fn readout_prob_gradient(model: &QnnModel, features: &[f64]) -> Result<Vec<f64>> {
    let encoded = amplitude_encode(features)?;
    let arch = model.arch;
    // Probe once so width/parameter errors surface before the shift loop.
    p0_with(&arch, &model.params, &encoded)?;

    let sqrt2 = 2f64.sqrt();
    let c_plus = (sqrt2 + 1.0) / (4.0 * sqrt2);
    let c_minus = (sqrt2 - 1.0) / (4.0 * sqrt2);

    let mut shifted = model.params.clone();
    let mut eval = |k: usize, delta: f64| -> Result<f64> {
        let original = shifted[k];
        shifted[k] = original + delta;
        let p0 = p0_with(&arch, &shifted, &encoded);
        shifted[k] = original;
        p0
    };

    let mut grad = Vec::with_capacity(model.params.len());
    for k in 0..model.params.len() {
        let g = match arch.param_kind(k) {
            ParamKind::Rotation => {
                (eval(k, FRAC_PI_2)? - eval(k, -FRAC_PI_2)?) / 2.0
            }
            ParamKind::Controlled => {
                c_plus * (eval(k, FRAC_PI_2)? - eval(k, -FRAC_PI_2)?)
                    - c_minus * (eval(k, 3.0 * FRAC_PI_2)? - eval(k, -3.0 * FRAC_PI_2)?)
            }
        };
        grad.push(g);
    }
    Ok(grad)
}

/// Gradient of `loss(forward(model, features), target)` with respect to the
/// model parameters, chaining the loss derivative through the shift rule.
pub fn param_shift_gradient(
    model: &QnnModel,
    features: &[f64],
    target: &[f64; 2],
    loss: Loss,
) -> Result<Vec<f64>> {
    let pred = crate::qnn::forward::forward(model, features)?;
    let gl = loss.grad_pred(&pred.probs, target);
    // The two output components are complementary: dp1 = -dp0.
    let factor = gl[0] - gl[1];
    let dp0 = readout_prob_gradient(model, features)?;
    Ok(dp0.into_iter().map(|g| factor * g).collect())
}
