//! Variational quantum circuit classifier.
//!
//! The ansatz is fixed: per layer, every qubit gets an RZ-RY-RZ rotation
//! triple, followed by a ring of controlled-RX gates (control i targets
//! (i+1) mod n, ascending i). Features enter through amplitude encoding and
//! the prediction is the marginal distribution of the readout qubit. Training
//! uses exact parameter-shift gradients chained through the loss, and Adam
//! with decoupled weight decay.

mod adam;
mod ansatz;
mod encode;
mod eval;
mod forward;
mod gradient;
mod loss;
mod model;

pub use adam::AdamState;
pub use ansatz::{ParamKind, QnnArchitecture};
pub use encode::amplitude_encode;
pub use eval::{evaluate_accuracy, Predictor};
pub use forward::{forward, forward_with_rates, GateRates, RawOutput};
pub use gradient::{param_shift_gradient, readout_prob_gradient};
pub use loss::{huber_loss, Loss, DEFAULT_HUBER_DELTA};
pub use model::QnnModel;
