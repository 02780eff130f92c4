use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qnn::{forward_with_rates, GateRates, QnnModel};
use crate::rng::query_rng;
use crate::sim::readout_flip;
use crate::victim::schedule::NoiseSchedule;

/// Default number of measurement shots per query.
pub const DEFAULT_SHOTS: u32 = 1024;
/// Default number of query rounds per campaign.
pub const DEFAULT_ROUNDS: usize = 5;

/// One queried sample: its features and the probability vector returned at
/// every round, with the hour each round was issued.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub sample_id: u64,
    pub features: [f64; 8],
    pub probs_by_round: Vec<[f64; 2]>,
    pub query_times: Vec<f64>,
}

/// Everything a query campaign produced, in sample order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QueriedDataset {
    pub records: Vec<QueryRecord>,
}

impl QueriedDataset {
    pub fn n_samples(&self) -> usize {
        self.records.len()
    }

    pub fn m_rounds(&self) -> usize {
        self.records.first().map_or(0, |r| r.probs_by_round.len())
    }

    /// Structural checks: at least one round, uniform round counts, unique
    /// ids, and every vector a probability distribution within 1e-6.
    pub fn validate(&self) -> Result<()> {
        if self.records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let rounds = self.records[0].probs_by_round.len();
        if rounds == 0 {
            return Err(Error::NotEnoughRounds(0));
        }
        let mut seen = HashSet::with_capacity(self.records.len());
        for record in &self.records {
            if record.probs_by_round.len() != rounds {
                return Err(Error::RaggedRounds {
                    first: rounds,
                    other: record.probs_by_round.len(),
                });
            }
            if record.query_times.len() != rounds {
                return Err(Error::RaggedRounds {
                    first: rounds,
                    other: record.query_times.len(),
                });
            }
            if !seen.insert(record.sample_id) {
                return Err(Error::DuplicateSampleId(record.sample_id));
            }
            for p in &record.probs_by_round {
                if !(p[0] >= 0.0 && p[1] >= 0.0 && (p[0] + p[1] - 1.0).abs() <= 1e-6) {
                    return Err(Error::InvalidProbability(p[0] + p[1]));
                }
            }
        }
        Ok(())
    }

    /// JSON-lines rendering with 17-significant-digit floats; one record per
    /// line, byte-stable for identical campaigns.
    pub fn to_jsonl_string(&self) -> Result<String> {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&crate::jsonfmt::to_string_17(record)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_jsonl_string()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let text = fs::read_to_string(path)?;
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: QueryRecord = serde_json::from_str(line).map_err(|e| {
                Error::MalformedLine {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: e.to_string(),
                }
            })?;
            records.push(record);
        }
        let data = Self { records };
        data.validate()?;
        Ok(data)
    }
}

/// Answer one query at time `t_hours`: noisy forward pass at the schedule's
/// jittered rates, readout corruption, then `shots` measurement draws
/// reported as frequencies. `shots = 0` is the exact mode and returns the
/// analytic distribution itself.
///
/// All randomness is drawn from streams keyed by (seed, sample_id, t_hours),
/// so any query can be reproduced in isolation.
pub fn query(
    victim: &QnnModel,
    features: &[f64],
    schedule: &NoiseSchedule,
    t_hours: f64,
    shots: u32,
    seed: u64,
    sample_id: u64,
) -> Result<[f64; 2]> {
    schedule.validate()?;
    let mut jitter_rng = query_rng(seed, "jitter", sample_id, t_hours);
    let rates = schedule.rates_at_jittered(t_hours, &mut jitter_rng);
    let out = forward_with_rates(
        victim,
        features,
        &GateRates { p_1q: rates.p_1q, p_2q: rates.p_2q },
    )?;
    let ideal = readout_flip(out.probs, rates.readout_eps)?;
    if shots == 0 {
        return Ok(ideal);
    }
    let mut shot_rng = query_rng(seed, "shots", sample_id, t_hours);
    let mut ones = 0u32;
    for _ in 0..shots {
        if shot_rng.gen::<f64>() < ideal[1] {
            ones += 1;
        }
    }
    let f1 = ones as f64 / shots as f64;
    Ok([1.0 - f1, f1])
}

/// Query every sample once per round, rounds spaced evenly across the
/// schedule's period: round m (1-based) runs at t = m * period / m_rounds.
pub fn run_campaign(
    victim: &QnnModel,
    features: &[[f64; 8]],
    schedule: &NoiseSchedule,
    m_rounds: usize,
    shots: u32,
    seed: u64,
) -> Result<QueriedDataset> {
    if features.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if m_rounds == 0 {
        return Err(Error::NotEnoughRounds(0));
    }
    schedule.validate()?;
    let times: Vec<f64> = (1..=m_rounds)
        .map(|m| m as f64 * schedule.period_hours / m_rounds as f64)
        .collect();
    let mut records = Vec::with_capacity(features.len());
    for (i, f) in features.iter().enumerate() {
        let sample_id = i as u64;
        let mut probs_by_round = Vec::with_capacity(m_rounds);
        for &t in &times {
            probs_by_round.push(query(victim, f, schedule, t, shots, seed, sample_id)?);
        }
        records.push(QueryRecord {
            sample_id,
            features: *f,
            probs_by_round,
            query_times: times.clone(),
        });
    }
    let data = QueriedDataset { records };
    data.validate()?;
    Ok(data)
}
