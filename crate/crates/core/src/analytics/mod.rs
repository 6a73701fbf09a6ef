//! Histograms, confusion matrix, linked selection, feature summaries and
//! what-if reweighting over an immutable [`Dataset`](crate::Dataset).

pub mod confusion;
pub mod features;
pub mod histogram;
pub mod selection;
pub mod whatif;

pub use confusion::{confusion_matrix, per_class_counts, ConfusionMatrix};
pub use features::{feature_summary, five_number, FeatureStats, FeatureSummary, FiveNumber};
pub use histogram::{
    build_all_histograms, build_histogram, effective_range, fit_to_effective_range,
    ClassHistogram, HistogramBin, HistogramSpec, OutcomeSet,
};
pub use selection::{select_bar, select_cell, select_samples, Highlight, SelectionResult};
pub use whatif::{reweight_whatif, PredictionChange, WhatIfReport};
