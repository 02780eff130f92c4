use crate::data::Sample;
use crate::error::{Error, Result};
use crate::qnn::forward::{forward, RawOutput};
use crate::qnn::model::QnnModel;

/// Anything that maps a feature vector to a two-class distribution. Lets
/// single models and ensembles share evaluation and selection code.
pub trait Predictor {
    fn predict(&self, features: &[f64]) -> Result<RawOutput>;
}

impl Predictor for QnnModel {
    fn predict(&self, features: &[f64]) -> Result<RawOutput> {
        forward(self, features)
    }
}

/// Fraction of samples whose argmax prediction matches the stored class.
pub fn evaluate_accuracy<P: Predictor + ?Sized>(predictor: &P, samples: &[Sample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut hits = 0usize;
    for sample in samples {
        if predictor.predict(&sample.features)?.argmax() == sample.class {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples.len() as f64)
}
