//! Five-number summaries of feature values for box plots.

use serde::Serialize;

use crate::error::Result;
use crate::model::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureStats {
    pub name: String,
    /// Non-missing values among the selected samples.
    pub count: usize,
    /// `None` when `count` is zero.
    pub summary: Option<FiveNumber>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureSummary {
    pub features: Vec<FeatureStats>,
}

/// Quantile `p` of an ascending slice, interpolating linearly between the
/// closest ranks (position `p * (n - 1)`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = p * (sorted.len() - 1) as f64;
    let lower = pos.floor() as usize;
    let upper = pos.ceil() as usize;
    let frac = pos - lower as f64;
    sorted[lower] + (sorted[upper] - sorted[lower]) * frac
}

pub fn five_number(values: &[f64]) -> Option<FiveNumber> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(FiveNumber {
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

/// Per-feature summary over the selected samples, skipping missing values.
pub fn feature_summary<S: AsRef<str>>(dataset: &Dataset, sample_ids: &[S]) -> Result<FeatureSummary> {
    let positions = dataset.index_of_ids(sample_ids)?;
    let features = dataset
        .feature_names()
        .iter()
        .enumerate()
        .map(|(f, name)| {
            let values: Vec<f64> = positions
                .iter()
                .filter_map(|&i| dataset.records()[i].feature(f))
                .collect();
            FeatureStats { name: name.clone(), count: values.len(), summary: five_number(&values) }
        })
        .collect();
    Ok(FeatureSummary { features })
}
