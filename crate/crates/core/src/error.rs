//! Crate-wide error type.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    // -------- simulation --------
    #[error("qubit count {got} outside supported range 1..={max}")]
    QubitCount { got: usize, max: usize },
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },
    #[error("control and target both address qubit {0}")]
    DuplicateQubit(usize),
    #[error("amplitude vector has length {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("state norm {0} too far from 1")]
    NotNormalized(f64),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("Kraus operators violate completeness, max deviation {0:.3e}")]
    IncompleteKraus(f64),
    #[error("channel arity {0} unsupported, expected 1 or 2")]
    ChannelArity(usize),
    #[error("channel arity {arity} does not match {got} target qubits")]
    ChannelTargets { arity: usize, got: usize },

    // -------- qnn --------
    #[error("feature vector must contain a nonzero entry")]
    ZeroFeatureVector,
    #[error("feature length {0} is not a supported encoder width")]
    FeatureLength(usize),
    #[error("feature vector contains a non-finite entry")]
    NonFiniteFeature,
    #[error("parameter vector has length {got}, expected {expected}")]
    ParamCount { got: usize, expected: usize },
    #[error("gradient length {got} does not match parameter length {expected}")]
    GradientLength { got: usize, expected: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyper(String),

    // -------- data --------
    #[error("IDX payload truncated: needed {needed} bytes, found {found}")]
    IdxTruncated { needed: usize, found: usize },
    #[error("IDX magic 0x{0:08x} is neither an image nor a label file")]
    IdxBadMagic(u32),
    #[error("IDX image geometry {rows}x{cols} unsupported, expected 28x28")]
    IdxGeometry { rows: u32, cols: u32 },
    #[error("IDX dimension product overflows")]
    IdxOverflow,
    #[error("image and label counts differ: {images} images, {labels} labels")]
    CountMismatch { images: usize, labels: usize },
    #[error("label value {0} outside 0..=9")]
    LabelRange(u8),
    #[error("power iteration failed to converge for component {component}")]
    PcaNonConvergence { component: usize },
    #[error("covariance estimation needs at least two images, got {0}")]
    PcaTooFewImages(usize),
    #[error("task needs {needed} samples of classes {{{class_a}, {class_b}}}, corpus has {available}")]
    InsufficientSamples {
        needed: usize,
        class_a: u8,
        class_b: u8,
        available: usize,
    },
    #[error("unknown task '{0}'")]
    UnknownTask(String),
    #[error("split file {path}: version {found} unsupported")]
    SplitVersion { path: PathBuf, found: u32 },
    #[error("split file {path}: checksum mismatch")]
    SplitChecksum { path: PathBuf },
    #[error("{path}: line {line}: {message}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("file {0} is missing")]
    MissingFile(PathBuf),

    // -------- victim / extraction --------
    #[error("invalid noise schedule: {0}")]
    InvalidSchedule(String),
    #[error("need at least one query round, got {0}")]
    NotEnoughRounds(usize),
    #[error("records disagree on round count: {first} vs {other}")]
    RaggedRounds { first: usize, other: usize },
    #[error("duplicate sample id {0} in queried dataset")]
    DuplicateSampleId(u64),
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("keep fraction {0} outside (0, 1]")]
    InvalidKeepFraction(f64),
    #[error("no reference label for sample {0}")]
    MissingCleanLabel(u64),
    #[error("service error: {0}")]
    Service(String),

    // -------- wrapped --------
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
