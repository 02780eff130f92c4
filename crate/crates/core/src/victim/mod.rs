//! The model owner's side: supervised training of the served model, the
//! time-varying noise profile its answers pass through, query evaluation
//! with finite shots, multi-round query campaigns, and a small TCP service
//! exposing the query interface.

mod campaign;
mod schedule;
mod service;
mod train;

pub use campaign::{query, run_campaign, QueriedDataset, QueryRecord, DEFAULT_ROUNDS, DEFAULT_SHOTS};
pub use schedule::{NoiseSchedule, Rates};
pub use service::{run_campaign_remote, Service, ServiceConfig};
pub use train::{train_victim, TrainConfig, TrainReport};
