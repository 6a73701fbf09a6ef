//! Per-class analysis of multi-class classifier prediction scores.
//!
//! Scores are binned into per-class histograms whose bars are split by
//! outcome (true/false positives and negatives), linked to a confusion
//! matrix, feature box plots and the underlying samples.

pub mod analytics;
pub mod error;
pub mod ingestion;
pub mod model;

pub use error::{Error, Result};
pub use model::{
    normalize_scores, outcome, predicted_class, validate_dataset, ClassLabel, Dataset,
    FeatureValue, Outcome, OutcomeCounts, PredictionRecord, RawDataset, ValidationReport,
    Violation, Warning,
};
