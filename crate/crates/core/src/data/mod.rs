//! Image data handling: raw IDX files, PCA feature reduction, and the
//! binary-classification task splits the rest of the pipeline consumes.
//!
//! Also hosts a procedural corpus generator that renders MNIST-shaped
//! grayscale glyphs, so the full pipeline runs in environments where the
//! original archives are unavailable. Generated files use the same IDX
//! layout, so real archives can be dropped in unchanged.

mod corpus;
mod idx;
mod pca;
mod task;

pub use corpus::{generate_corpus, CorpusKind};
pub use idx::{
    parse_idx, read_idx_file, write_idx_images, write_idx_labels, IdxContent, RawImageSet,
    IMAGE_PIXELS, IMAGE_SIDE,
};
pub use pca::{pca_fit, PcaProjector, PCA_MAX_ITERS, PCA_TOL};
pub use task::{
    build_task, load_split, save_split, DatasetKind, OriginIndices, Sample, SplitCounts, Task,
    TaskBundle, TaskSplit, FEATURE_DIM,
};
