//! Experiment configuration: one flat struct holding every knob a command
//! reads, with precedence defaults < config file < command-line flags.
//!
//! The same struct is serialized verbatim to compute the provenance hash
//! recorded in every CSV row, so field order and formatting must stay
//! deterministic; plain `serde_json` struct serialization guarantees both.

use std::fmt;
use std::fs;
use std::path::Path;

use qnnlab::data::SplitCounts;
use qnnlab::extraction::CoTeachConfig;
use qnnlab::qnn::QnnArchitecture;
use qnnlab::victim::{NoiseSchedule, TrainConfig, DEFAULT_ROUNDS, DEFAULT_SHOTS};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Failure;

/// All experiment knobs, flattened so a config file is a single JSON object.
///
/// Every field has a default; a config file may set any subset, and unknown
/// keys are rejected so typos fail loudly instead of silently running the
/// default experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Task name: m01, m78, ftt, fds, or fss ("all" where a command accepts it).
    pub task: String,
    /// Top-level seed; every random stream in a run derives from it.
    pub seed: u64,
    /// Seed list used by commands that repeat runs (sweeps).
    pub seeds: Vec<u64>,
    /// Root directory for corpora, splits, models, campaigns, and CSV output.
    pub out_dir: String,

    /// Images generated per class and dataset by `gen-data`.
    pub per_class: usize,
    /// Training split size per task.
    pub train_count: usize,
    /// Validation split size per task.
    pub val_count: usize,
    /// Test split size per task.
    pub test_count: usize,

    /// Circuit width; 8 features need at least 3 qubits.
    pub n_qubits: usize,
    /// Entangling-block repetitions.
    pub n_layers: usize,
    /// Qubit measured for the two-class readout.
    pub readout_qubit: usize,

    /// Victim training epochs.
    pub epochs: usize,
    /// Victim minibatch size.
    pub batch_size: usize,

    /// Query rounds per sample, spread evenly over one noise period.
    pub m_rounds: usize,
    /// Shots per query; 0 means exact probabilities.
    pub shots: u32,

    /// Baseline one-qubit depolarizing rate.
    pub base_1q: f64,
    /// Baseline two-qubit depolarizing rate.
    pub base_2q: f64,
    /// Relative daily span of the one-qubit rate.
    pub fluct_1q: f64,
    /// Relative daily span of the two-qubit rate.
    pub fluct_2q: f64,
    /// Readout bit-flip probability.
    pub readout_eps: f64,
    /// Length of one drift cycle in hours.
    pub period_hours: f64,
    /// Drift phase offset in radians.
    pub phase: f64,
    /// Relative sigma of the per-query lognormal jitter.
    pub jitter_rel: f64,
    /// Global multiplier on both gate rates; 0 gives a noiseless service.
    pub noise_scale: f64,

    /// Attack scheme: base, qleak, cot, cot-e, or scot.
    pub scheme: String,
    /// Label-variation split threshold.
    pub v_th: f64,
    /// Forget rate for the robust partition.
    pub f1: f64,
    /// Forget rate for the vulnerable partition (and plain co-teaching).
    pub f2: f64,
    /// Attack training epochs.
    pub attack_epochs: usize,
    /// Attack minibatch size.
    pub attack_batch_size: usize,
    /// Epochs over which the forget rate ramps from 0 to its target.
    pub ramp_epochs: usize,
    /// Committee size for ensemble schemes.
    pub n_committees: usize,
    /// Bootstrap-bag fraction for ensemble schemes.
    pub bag_fraction: f64,

    /// Bin count for the loss histogram diagnostic.
    pub hist_bins: usize,
    /// Listen address for `serve`; port 0 picks a free port.
    pub listen: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let sched = NoiseSchedule::default();
        let train = TrainConfig::default();
        let ct = CoTeachConfig::default();
        let counts = SplitCounts::default();
        let arch = QnnArchitecture::default();
        Self {
            task: "m01".into(),
            seed: 17,
            seeds: vec![17, 18, 19],
            out_dir: "runs".into(),
            per_class: 2400,
            train_count: counts.train,
            val_count: counts.val,
            test_count: counts.test,
            n_qubits: arch.n_qubits,
            n_layers: arch.n_layers,
            readout_qubit: arch.readout_qubit,
            epochs: train.epochs,
            batch_size: train.batch_size,
            m_rounds: DEFAULT_ROUNDS,
            shots: DEFAULT_SHOTS,
            base_1q: sched.base_1q,
            base_2q: sched.base_2q,
            fluct_1q: sched.fluct_1q,
            fluct_2q: sched.fluct_2q,
            readout_eps: sched.readout_eps,
            period_hours: sched.period_hours,
            phase: sched.phase,
            jitter_rel: sched.jitter_rel,
            noise_scale: sched.scale,
            scheme: "scot".into(),
            v_th: ct.v_th,
            f1: ct.f1,
            f2: ct.f2,
            attack_epochs: ct.epochs,
            attack_batch_size: ct.batch_size,
            ramp_epochs: ct.ramp_epochs,
            n_committees: 3,
            bag_fraction: 0.8,
            hist_bins: 20,
            listen: "127.0.0.1:0".into(),
        }
    }
}

impl ExperimentConfig {
    /// Defaults merged with the optional config file. Flag overrides are
    /// applied by the caller afterwards, giving the documented precedence.
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = fs::read_to_string(path).map_err(|e| {
            Failure::config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| {
            Failure::config(format!("invalid config file {}: {e}", path.display()))
        })
    }

    pub fn arch(&self) -> QnnArchitecture {
        QnnArchitecture {
            n_qubits: self.n_qubits,
            n_layers: self.n_layers,
            readout_qubit: self.readout_qubit,
        }
    }

    pub fn schedule(&self) -> NoiseSchedule {
        NoiseSchedule {
            base_1q: self.base_1q,
            base_2q: self.base_2q,
            fluct_1q: self.fluct_1q,
            fluct_2q: self.fluct_2q,
            readout_eps: self.readout_eps,
            period_hours: self.period_hours,
            phase: self.phase,
            jitter_rel: self.jitter_rel,
            scale: self.noise_scale,
        }
    }

    pub fn split_counts(&self) -> SplitCounts {
        SplitCounts { train: self.train_count, val: self.val_count, test: self.test_count }
    }

    pub fn victim_train(&self) -> TrainConfig {
        TrainConfig { epochs: self.epochs, batch_size: self.batch_size }
    }

    pub fn attack_train(&self) -> TrainConfig {
        TrainConfig { epochs: self.attack_epochs, batch_size: self.attack_batch_size }
    }

    pub fn coteach(&self) -> CoTeachConfig {
        CoTeachConfig {
            v_th: self.v_th,
            f1: self.f1,
            f2: self.f2,
            epochs: self.attack_epochs,
            batch_size: self.attack_batch_size,
            ramp_epochs: self.ramp_epochs,
        }
    }

    /// Hash of the full effective configuration, recorded in every CSV row.
    pub fn hash(&self) -> String {
        // Struct serialization is field-ordered, so equal configs always
        // serialize to equal bytes.
        let text = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}

/// The five substitute-training schemes the attack command can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Soft-label distillation on the aggregated campaign.
    Base,
    /// Bagged committee of distilled models.
    Qleak,
    /// Plain co-teaching with a single forget rate.
    Cot,
    /// Bagged committee of co-teaching pairs.
    CotEnsemble,
    /// Split co-teaching: variation split, then per-partition forget rates.
    Scot,
}

impl Scheme {
    pub fn parse(name: &str) -> Result<Self, Failure> {
        match name {
            "base" => Ok(Self::Base),
            "qleak" => Ok(Self::Qleak),
            "cot" => Ok(Self::Cot),
            "cot-e" => Ok(Self::CotEnsemble),
            "scot" => Ok(Self::Scot),
            other => Err(Failure::config(format!(
                "unknown scheme \"{other}\" (expected base, qleak, cot, cot-e, or scot)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Base => "base",
            Self::Qleak => "qleak",
            Self::Cot => "cot",
            Self::CotEnsemble => "cot-e",
            Self::Scot => "scot",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
