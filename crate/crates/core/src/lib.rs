//! Laboratory for studying model-extraction attacks against small quantum
//! neural network classifiers served from simulated noisy hardware.
//!
//! The crate is organised as a pipeline:
//!
//! * [`sim`] — statevector and density-matrix simulation of up to a handful of
//!   qubits, with depolarizing Kraus channels and readout bit flips.
//! * [`qnn`] — a fixed variational circuit classifier: amplitude encoding,
//!   layered rotations with a controlled-RX ring, parameter-shift gradients,
//!   and an Adam optimizer with decoupled weight decay.
//! * [`data`] — IDX image parsing, PCA feature reduction via power iteration,
//!   binary task assembly, and a procedural corpus generator for offline runs.
//! * [`victim`] — the service side: victim training, a time-varying noise
//!   schedule, shot-sampled query campaigns, and a line-delimited JSON TCP
//!   service.
//! * [`extraction`] — the attack side: label-variation splitting, co-teaching
//!   trainers, distillation and ensemble baselines, and loss diagnostics.
//!
//! Every operation is deterministic given its inputs and a seed; randomness is
//! drawn from labeled ChaCha8 sub-streams derived in [`rng`].

pub mod data;
pub mod error;
pub mod extraction;
pub mod jsonfmt;
pub mod qnn;
pub mod rng;
pub mod sim;
pub mod victim;

pub use error::{Error, Result};
