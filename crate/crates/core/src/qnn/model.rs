use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qnn::ansatz::QnnArchitecture;

/// A trained or in-training circuit model: architecture plus its flat
/// parameter vector and the seed the parameters were initialized from.
#[derive(Debug, Clone, PartialEq)]
pub struct QnnModel {
    pub arch: QnnArchitecture,
    pub params: Vec<f64>,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct ArchFile {
    n_qubits: usize,
    n_layers: usize,
    readout_qubit: usize,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    arch: ArchFile,
    params: Vec<f64>,
    seed: u64,
}

impl QnnModel {
    /// Fresh model with angles drawn uniformly from [-pi/4, pi/4].
    pub fn init(arch: QnnArchitecture, seed: u64) -> Result<Self> {
        arch.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = (0..arch.param_count())
            .map(|_| rng.gen_range(-FRAC_PI_4..=FRAC_PI_4))
            .collect();
        Ok(Self { arch, params, seed })
    }

    /// Wrap an explicit parameter vector (length-checked).
    pub fn with_params(arch: QnnArchitecture, params: Vec<f64>, seed: u64) -> Result<Self> {
        arch.validate()?;
        if params.len() != arch.param_count() {
            return Err(Error::ParamCount { got: params.len(), expected: arch.param_count() });
        }
        Ok(Self { arch, params, seed })
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = ModelFile {
            arch: ArchFile {
                n_qubits: self.arch.n_qubits,
                n_layers: self.arch.n_layers,
                readout_qubit: self.arch.readout_qubit,
            },
            params: self.params.clone(),
            seed: self.seed,
        };
        let mut body = serde_json::to_string(&file)?;
        body.push('\n');
        Ok(body)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        let arch = QnnArchitecture::new(
            file.arch.n_qubits,
            file.arch.n_layers,
            file.arch.readout_qubit,
        )?;
        Self::with_params(arch, file.params, file.seed)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::from_json_str(&fs::read_to_string(path)?)
    }
}
