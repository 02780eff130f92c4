use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::idx::{RawImageSet, IMAGE_PIXELS};
use crate::data::pca::{pca_fit, PcaProjector};
use crate::error::{Error, Result};
use crate::jsonfmt::to_string_17;
use crate::rng::stream_rng;

/// Width of the feature vectors every task produces.
pub const FEATURE_DIM: usize = 8;

const SPLIT_FORMAT: &str = "task-split";
const SPLIT_VERSION: u32 = 1;

/// Which source corpus a task draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Mnist,
    Fashion,
}

impl DatasetKind {
    /// Subdirectory the corpus files live in.
    pub fn dir_name(&self) -> &'static str {
        match self {
            DatasetKind::Mnist => "mnist",
            DatasetKind::Fashion => "fashion",
        }
    }
}

/// The five binary classification tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Digits 0 vs 1.
    M01,
    /// Digits 7 vs 8.
    M78,
    /// T-shirt vs trouser.
    Ftt,
    /// Dress vs sneaker.
    Fds,
    /// Shirt vs sneaker.
    Fss,
}

impl Task {
    pub fn all() -> [Task; 5] {
        [Task::M01, Task::M78, Task::Ftt, Task::Fds, Task::Fss]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Task::M01 => "m01",
            Task::M78 => "m78",
            Task::Ftt => "ftt",
            Task::Fds => "fds",
            Task::Fss => "fss",
        }
    }

    pub fn parse(text: &str) -> Result<Task> {
        match text.to_ascii_lowercase().as_str() {
            "m01" => Ok(Task::M01),
            "m78" => Ok(Task::M78),
            "ftt" => Ok(Task::Ftt),
            "fds" => Ok(Task::Fds),
            "fss" => Ok(Task::Fss),
            other => Err(Error::UnknownTask(other.to_string())),
        }
    }

    pub fn dataset(&self) -> DatasetKind {
        match self {
            Task::M01 | Task::M78 => DatasetKind::Mnist,
            _ => DatasetKind::Fashion,
        }
    }

    /// Source labels mapped to task classes (0, 1) in this order.
    pub fn classes(&self) -> (u8, u8) {
        match self {
            Task::M01 => (0, 1),
            Task::M78 => (7, 8),
            Task::Ftt => (0, 1),
            Task::Fds => (3, 7),
            Task::Fss => (6, 7),
        }
    }
}

/// How many samples each split receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl Default for SplitCounts {
    fn default() -> Self {
        Self { train: 3000, val: 500, test: 1000 }
    }
}

impl SplitCounts {
    pub fn total(&self) -> usize {
        self.train + self.val + self.test
    }

    fn validate(&self) -> Result<()> {
        if self.train == 0 || self.val == 0 || self.test == 0 {
            return Err(Error::InvalidHyper("every split needs at least one sample".into()));
        }
        Ok(())
    }
}

/// One featurized, binary-labeled example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: [f64; FEATURE_DIM],
    pub class: u8,
}

/// The three featurized splits of one task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSplit {
    pub task: Task,
    pub train: Vec<Sample>,
    pub val: Vec<Sample>,
    pub test: Vec<Sample>,
}

/// Corpus row indices each split sample was derived from, parallel to the
/// sample vectors in `TaskSplit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OriginIndices {
    pub train: Vec<u32>,
    pub val: Vec<u32>,
    pub test: Vec<u32>,
}

/// Result of building a task from a raw corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskBundle {
    pub split: TaskSplit,
    pub projector: PcaProjector,
    /// Per-component standard deviations of the raw train projections; every
    /// stored feature vector is the raw projection divided by these.
    pub feature_scale: [f64; FEATURE_DIM],
    pub origin: OriginIndices,
}

/// Select, featurize, and split one task's samples from a raw corpus.
///
/// Eligible rows (either task class) are shuffled once, the leading rows are
/// assigned to train, then val, then test, and the projector is fitted on the
/// train images alone. A sample whose projection is exactly the zero vector
/// cannot be amplitude-encoded; it is swapped for the next unused eligible
/// row with a warning.
///
/// Features are stored variance-normalized: each component of the raw
/// projection is divided by its standard deviation over the train split
/// (components with no spread are left unscaled). Downstream amplitude
/// encoding only sees feature directions, so without this step the leading
/// component's large eigenvalue would pin every encoded state to nearly the
/// same axis; equalizing the component scales spreads the encoded states
/// across all eight amplitudes, which the shallow circuit separates far more
/// reliably. The scale vector is train-fitted once and applied verbatim to
/// val and test.
pub fn build_task(
    raw: &RawImageSet,
    task: Task,
    counts: SplitCounts,
    seed: u64,
) -> Result<TaskBundle> {
    counts.validate()?;
    let (class_a, class_b) = task.classes();
    let mut eligible: Vec<u32> = raw
        .labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == class_a || l == class_b)
        .map(|(i, _)| i as u32)
        .collect();
    let needed = counts.total();
    if eligible.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            class_a,
            class_b,
            available: eligible.len(),
        });
    }
    let mut rng = stream_rng(seed, "data", 0);
    eligible.shuffle(&mut rng);

    let train_ids: Vec<u32> = eligible[..counts.train].to_vec();
    let val_ids: Vec<u32> = eligible[counts.train..counts.train + counts.val].to_vec();
    let test_ids: Vec<u32> = eligible[counts.train + counts.val..needed].to_vec();
    let mut reserve = eligible[needed..].iter().copied();

    let train_images: Vec<[u8; IMAGE_PIXELS]> =
        train_ids.iter().map(|&i| raw.images[i as usize]).collect();
    let projector = pca_fit(&train_images, FEATURE_DIM, seed)?;

    let mut featurize_all = |ids: Vec<u32>| -> Result<(Vec<Sample>, Vec<u32>)> {
        let mut samples = Vec::with_capacity(ids.len());
        let mut origins = Vec::with_capacity(ids.len());
        for mut idx in ids {
            let features: [f64; FEATURE_DIM] = loop {
                let f = projector.transform(&raw.images[idx as usize]);
                let arr: [f64; FEATURE_DIM] = f.try_into().expect("projector width is fixed");
                if arr.iter().any(|&x| x != 0.0) {
                    break arr;
                }
                let replacement = reserve.next().ok_or(Error::InsufficientSamples {
                    needed: needed + 1,
                    class_a,
                    class_b,
                    available: eligible.len(),
                })?;
                log::warn!(
                    "corpus row {idx} projects to the zero vector; substituting row {replacement}"
                );
                idx = replacement;
            };
            let class = u8::from(raw.labels[idx as usize] == class_b);
            samples.push(Sample { features, class });
            origins.push(idx);
        }
        Ok((samples, origins))
    };

    let (mut train, train_origin) = featurize_all(train_ids)?;
    let (mut val, val_origin) = featurize_all(val_ids)?;
    let (mut test, test_origin) = featurize_all(test_ids)?;

    let mut feature_scale = [1.0_f64; FEATURE_DIM];
    for d in 0..FEATURE_DIM {
        let mean = train.iter().map(|s| s.features[d]).sum::<f64>() / train.len() as f64;
        let var = train.iter().map(|s| (s.features[d] - mean).powi(2)).sum::<f64>()
            / train.len() as f64;
        let sd = var.sqrt();
        if sd > 1e-12 {
            feature_scale[d] = sd;
        }
    }
    for split in [&mut train, &mut val, &mut test] {
        for sample in split.iter_mut() {
            for d in 0..FEATURE_DIM {
                sample.features[d] /= feature_scale[d];
            }
        }
    }

    Ok(TaskBundle {
        split: TaskSplit { task, train, val, test },
        projector,
        feature_scale,
        origin: OriginIndices { train: train_origin, val: val_origin, test: test_origin },
    })
}

#[derive(Serialize, Deserialize)]
struct SplitHeader {
    format: String,
    version: u32,
    task: String,
    split: String,
    count: usize,
    checksum: String,
}

fn split_path(dir: &Path, task: Task, split_name: &str) -> PathBuf {
    dir.join(format!("{}.{split_name}.jsonl", task.name()))
}

fn write_one_split(
    dir: &Path,
    task: Task,
    split_name: &str,
    samples: &[Sample],
) -> Result<PathBuf> {
    let mut body = String::new();
    for sample in samples {
        body.push_str(&to_string_17(sample)?);
        body.push('\n');
    }
    let checksum = format!("{:x}", Sha256::digest(body.as_bytes()));
    let header = SplitHeader {
        format: SPLIT_FORMAT.to_string(),
        version: SPLIT_VERSION,
        task: task.name().to_string(),
        split: split_name.to_string(),
        count: samples.len(),
        checksum,
    };
    let path = split_path(dir, task, split_name);
    let mut text = to_string_17(&header)?;
    text.push('\n');
    text.push_str(&body);
    fs::write(&path, text)?;
    Ok(path)
}

/// Write the three split files (`<task>.<split>.jsonl`) with a checksummed
/// header line followed by one sample per line. Floats carry 17 significant
/// digits so a round trip is bit-exact.
pub fn save_split(split: &TaskSplit, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    Ok(vec![
        write_one_split(dir, split.task, "train", &split.train)?,
        write_one_split(dir, split.task, "val", &split.val)?,
        write_one_split(dir, split.task, "test", &split.test)?,
    ])
}

fn read_one_split(dir: &Path, task: Task, split_name: &str) -> Result<Vec<Sample>> {
    let path = split_path(dir, task, split_name);
    if !path.is_file() {
        return Err(Error::MissingFile(path));
    }
    let text = fs::read_to_string(&path)?;
    let malformed = |line: usize, message: String| Error::MalformedLine {
        path: path.clone(),
        line,
        message,
    };
    let (header_line, body) = text
        .split_once('\n')
        .ok_or_else(|| malformed(1, "missing header line".into()))?;
    let header: SplitHeader = serde_json::from_str(header_line)
        .map_err(|e| malformed(1, format!("bad header: {e}")))?;
    if header.format != SPLIT_FORMAT {
        return Err(malformed(1, format!("unknown format '{}'", header.format)));
    }
    if header.version != SPLIT_VERSION {
        return Err(Error::SplitVersion { path, found: header.version });
    }
    if header.task != task.name() || header.split != split_name {
        return Err(malformed(
            1,
            format!("header names {}/{}, expected {}/{split_name}", header.task, header.split, task.name()),
        ));
    }
    let checksum = format!("{:x}", Sha256::digest(body.as_bytes()));
    if checksum != header.checksum {
        return Err(Error::SplitChecksum { path });
    }
    let mut samples = Vec::with_capacity(header.count);
    for (i, line) in body.lines().enumerate() {
        let sample: Sample = serde_json::from_str(line)
            .map_err(|e| malformed(i + 2, format!("bad sample: {e}")))?;
        if sample.class > 1 {
            return Err(malformed(i + 2, format!("class {} outside {{0, 1}}", sample.class)));
        }
        samples.push(sample);
    }
    if samples.len() != header.count {
        return Err(malformed(
            1,
            format!("header count {} but {} samples", header.count, samples.len()),
        ));
    }
    Ok(samples)
}

/// Load the three split files written by [`save_split`], verifying version,
/// checksum, and per-line structure.
pub fn load_split(dir: &Path, task: Task) -> Result<TaskSplit> {
    Ok(TaskSplit {
        task,
        train: read_one_split(dir, task, "train")?,
        val: read_one_split(dir, task, "val")?,
        test: read_one_split(dir, task, "test")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::corpus::{generate_corpus, CorpusKind};

    fn tiny_counts() -> SplitCounts {
        SplitCounts { train: 24, val: 8, test: 10 }
    }

    fn digits_corpus() -> RawImageSet {
        generate_corpus(CorpusKind::Digits, 30, 77)
    }

    #[test]
    fn task_names_round_trip() {
        for task in Task::all() {
            assert_eq!(Task::parse(task.name()).unwrap(), task);
        }
        assert_eq!(Task::parse("M78").unwrap(), Task::M78);
        assert!(matches!(Task::parse("nope"), Err(Error::UnknownTask(_))));
    }

    #[test]
    fn class_pairs_and_datasets() {
        assert_eq!(Task::M01.classes(), (0, 1));
        assert_eq!(Task::M78.classes(), (7, 8));
        assert_eq!(Task::Fss.classes(), (6, 7));
        assert_eq!(Task::M01.dataset(), DatasetKind::Mnist);
        assert_eq!(Task::Fds.dataset(), DatasetKind::Fashion);
        assert_eq!(DatasetKind::Fashion.dir_name(), "fashion");
    }

    #[test]
    fn build_produces_consistent_splits() {
        let raw = digits_corpus();
        let bundle = build_task(&raw, Task::M01, tiny_counts(), 5).unwrap();
        let split = &bundle.split;
        assert_eq!(split.train.len(), 24);
        assert_eq!(split.val.len(), 8);
        assert_eq!(split.test.len(), 10);

        // Origins are disjoint, eligible, and match the recorded classes.
        let mut seen = std::collections::HashSet::new();
        for (origins, samples) in [
            (&bundle.origin.train, &split.train),
            (&bundle.origin.val, &split.val),
            (&bundle.origin.test, &split.test),
        ] {
            assert_eq!(origins.len(), samples.len());
            for (&idx, sample) in origins.iter().zip(samples.iter()) {
                assert!(seen.insert(idx), "row {idx} assigned twice");
                let label = raw.labels[idx as usize];
                assert!(label == 0 || label == 1);
                assert_eq!(sample.class, u8::from(label == 1));
                assert!(sample.features.iter().all(|x| x.is_finite()));
                assert!(sample.features.iter().any(|&x| x != 0.0));
            }
        }
        // Both classes are actually present.
        assert!(split.train.iter().any(|s| s.class == 0));
        assert!(split.train.iter().any(|s| s.class == 1));
    }

    #[test]
    fn build_is_deterministic_in_the_seed() {
        let raw = digits_corpus();
        let a = build_task(&raw, Task::M01, tiny_counts(), 5).unwrap();
        let b = build_task(&raw, Task::M01, tiny_counts(), 5).unwrap();
        assert_eq!(a, b);
        let c = build_task(&raw, Task::M01, tiny_counts(), 6).unwrap();
        assert_ne!(a.origin, c.origin);
    }

    #[test]
    fn build_rejects_small_corpora() {
        let raw = digits_corpus(); // 30 per class, 60 eligible for m01
        let counts = SplitCounts { train: 50, val: 8, test: 10 };
        assert!(matches!(
            build_task(&raw, Task::M01, counts, 0),
            Err(Error::InsufficientSamples { needed: 68, class_a: 0, class_b: 1, available: 60 })
        ));
        assert!(build_task(&raw, Task::M01, SplitCounts { train: 0, val: 1, test: 1 }, 0).is_err());
    }

    #[test]
    fn save_load_round_trip_is_bit_exact() {
        let raw = digits_corpus();
        let bundle = build_task(&raw, Task::M01, tiny_counts(), 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = save_split(&bundle.split, dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        assert!(paths[0].file_name().unwrap().to_str().unwrap().contains("train"));

        let back = load_split(dir.path(), Task::M01).unwrap();
        assert_eq!(back, bundle.split);
        for (a, b) in back.train.iter().zip(&bundle.split.train) {
            for (x, y) in a.features.iter().zip(&b.features) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn load_detects_tampering() {
        let raw = digits_corpus();
        let bundle = build_task(&raw, Task::M01, tiny_counts(), 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_split(&bundle.split, dir.path()).unwrap();
        let train_path = split_path(dir.path(), Task::M01, "train");

        // Flip a digit somewhere in the body.
        let original = fs::read_to_string(&train_path).unwrap();
        let (head, body) = original.split_once('\n').unwrap();
        let tampered_body = if body.contains("0.") {
            body.replacen("0.", "1.", 1)
        } else {
            body.replacen('0', "1", 1)
        };
        fs::write(&train_path, format!("{head}\n{tampered_body}")).unwrap();
        assert!(matches!(
            load_split(dir.path(), Task::M01),
            Err(Error::SplitChecksum { .. })
        ));

        // Unsupported version.
        let bumped = original.replacen("\"version\":1", "\"version\":9", 1);
        fs::write(&train_path, bumped).unwrap();
        assert!(matches!(
            load_split(dir.path(), Task::M01),
            Err(Error::SplitVersion { found: 9, .. })
        ));

        // Garbage header.
        fs::write(&train_path, "not json\n").unwrap();
        assert!(matches!(
            load_split(dir.path(), Task::M01),
            Err(Error::MalformedLine { line: 1, .. })
        ));

        // Missing file.
        fs::remove_file(&train_path).unwrap();
        assert!(matches!(load_split(dir.path(), Task::M01), Err(Error::MissingFile(_))));
    }

    #[test]
    fn header_is_first_line_and_counts_match() {
        let raw = digits_corpus();
        let bundle = build_task(&raw, Task::M78, tiny_counts(), 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_split(&bundle.split, dir.path()).unwrap();
        let text = fs::read_to_string(split_path(dir.path(), Task::M78, "val")).unwrap();
        let first = text.lines().next().unwrap();
        let header: SplitHeader = serde_json::from_str(first).unwrap();
        assert_eq!(header.format, "task-split");
        assert_eq!(header.version, 1);
        assert_eq!(header.task, "m78");
        assert_eq!(header.split, "val");
        assert_eq!(header.count, 8);
        assert_eq!(text.lines().count(), 9);
    }
}
