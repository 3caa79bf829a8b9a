//! Hop-level collaborative relation (CR) analysis for user-item interaction data.
//!
//! The crate is organised as a pipeline:
//!
//! * [`ingest`] parses event logs, filters them and produces chronological
//!   train/valid/test splits with leave-last-out samples.
//! * [`crgraph`] builds the global item co-occurrence graph from training
//!   sequences and classifies item pairs by shortest-path hop count.
//! * [`analysis`] labels evaluation samples and model predictions with CRs.
//! * [`recommenders`] holds the Item-KNN, session-KNN and BPR-MF baselines.
//! * [`eval`] computes Prec@k / MRR@k overall and per slice.
//!
//! The recommenders are generic over the floating point type; the aliases
//! below fix the precision used by the command-line pipeline. Metrics are
//! accumulated as integer counts and exposed as exact rationals.

pub mod analysis;
pub mod config;
pub mod crgraph;
mod error;
pub mod eval;
pub mod ingest;
pub(crate) mod io;
pub mod recommenders;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use crgraph::{CrClass, GlobalGraph};
pub use eval::{ExactRatio, MetricsReport};
pub use ingest::{DatasetSplit, Sample, SampleSet, Sequence, SequenceSet};

/// Item-KNN with double precision similarities.
pub type ItemKnn = recommenders::ItemKnnModel<f64>;
/// Session-KNN with double precision similarities.
pub type Sknn = recommenders::SknnModel<f64>;
/// BPR matrix factorisation with single precision factors.
pub type BprMf = recommenders::BprMfModel<f32>;
/// Ranked recommendation list scored in double precision.
pub type RecommendationList = recommenders::RecommendationList<f64>;
