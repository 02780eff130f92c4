//! Quantum state simulation for small registers.
//!
//! Convention used throughout the crate: qubit 0 is the most significant bit
//! of the computational basis index, so for three qubits the basis state
//! |q0 q1 q2> = |110> has index 6. Gates are applied with index-pair update
//! kernels; no operation ever materialises a 2^n x 2^n gate matrix.

mod channel;
mod density;
mod gate;
mod state;
#[cfg(test)]
pub(crate) mod testutil;

pub use channel::{depolarizing, kron2, readout_flip, KrausChannel, KrausOps, COMPLETENESS_TOL};
pub use density::{DensityMatrix, MAX_DM_QUBITS};
pub use gate::{
    crx_matrix, h_matrix, rx_matrix, ry_matrix, rz_matrix, x_matrix, Gate, Mat2, Mat4,
};
pub use state::{StateVector, MAX_QUBITS};
