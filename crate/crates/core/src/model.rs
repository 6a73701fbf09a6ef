//! Dataset model, the argmax decision rule and per-class outcome semantics.
//!
//! A [`Dataset`] can only be obtained from a [`RawDataset`] that passes
//! [`validate_dataset`]; every function taking a `&Dataset` relies on that.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance applied to row sums of datasets flagged as normalized.
pub const NORMALIZED_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassLabel {
    pub name: String,
    pub index: usize,
}

/// One feature value; `None` marks a missing entry.
pub type FeatureValue = Option<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub sample_id: String,
    pub actual: usize,
    pub scores: Vec<f64>,
    pub features: Option<Vec<FeatureValue>>,
    /// File name inside the dataset's image directory.
    pub image_ref: Option<String>,
}

impl PredictionRecord {
    pub fn new(sample_id: impl Into<String>, actual: usize, scores: Vec<f64>) -> Self {
        Self {
            sample_id: sample_id.into(),
            actual,
            scores,
            features: None,
            image_ref: None,
        }
    }

    pub fn with_features(mut self, features: Vec<FeatureValue>) -> Self {
        self.features = Some(features);
        self
    }

    /// Feature `f`, or `None` when the vector is absent or the entry missing.
    pub fn feature(&self, f: usize) -> FeatureValue {
        self.features.as_ref().and_then(|v| v.get(f).copied().flatten())
    }
}

/// Per-class outcome of a single record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Tp,
    Fp,
    Fn,
    Tn,
}

impl Outcome {
    /// Stacking order used everywhere: TP, FP, FN, TN.
    pub const ALL: [Outcome; 4] = [Outcome::Tp, Outcome::Fp, Outcome::Fn, Outcome::Tn];

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Tp => "tp",
            Outcome::Fp => "fp",
            Outcome::Fn => "fn",
            Outcome::Tn => "tn",
        }
    }

    pub(crate) fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_str().to_ascii_uppercase())
    }
}

impl std::str::FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tp" => Ok(Outcome::Tp),
            "fp" => Ok(Outcome::Fp),
            "fn" => Ok(Outcome::Fn),
            "tn" => Ok(Outcome::Tn),
            other => Err(format!("unknown outcome group `{other}` (expected tp, fp, fn or tn)")),
        }
    }
}

/// Count per outcome group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl OutcomeCounts {
    pub fn get(&self, outcome: Outcome) -> usize {
        match outcome {
            Outcome::Tp => self.tp,
            Outcome::Fp => self.fp,
            Outcome::Fn => self.fn_,
            Outcome::Tn => self.tn,
        }
    }

    pub fn get_mut(&mut self, outcome: Outcome) -> &mut usize {
        match outcome {
            Outcome::Tp => &mut self.tp,
            Outcome::Fp => &mut self.fp,
            Outcome::Fn => &mut self.fn_,
            Outcome::Tn => &mut self.tn,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }
}

/// Index of the highest score; ties go to the lowest class index.
pub fn predicted_class(record: &PredictionRecord) -> usize {
    argmax(&record.scores)
}

pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn classify(predicted: usize, actual: usize, class: usize) -> Outcome {
    match (predicted == class, actual == class) {
        (true, true) => Outcome::Tp,
        (true, false) => Outcome::Fp,
        (false, true) => Outcome::Fn,
        (false, false) => Outcome::Tn,
    }
}

/// Outcome of `record` with respect to class `class`.
pub fn outcome(record: &PredictionRecord, class: usize) -> Result<Outcome> {
    let classes = record.scores.len();
    if class >= classes {
        return Err(Error::ClassOutOfRange { index: class, classes });
    }
    Ok(classify(predicted_class(record), record.actual, class))
}

/// Divides every score by the row sum.
pub fn normalize_scores(record: &PredictionRecord) -> Result<PredictionRecord> {
    let sum: f64 = record.scores.iter().sum();
    if !sum.is_finite() || sum <= 0.0 {
        return Err(Error::DegenerateRow);
    }
    let mut out = record.clone();
    for s in &mut out.scores {
        *s /= sum;
    }
    Ok(out)
}

/// Unvalidated dataset contents, as assembled by a loader or by hand.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawDataset {
    pub classes: Vec<String>,
    pub feature_names: Vec<String>,
    pub records: Vec<PredictionRecord>,
    pub normalized: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewClasses { classes: usize },
    EmptyClassName { index: usize },
    DuplicateClassName { name: String },
    NoRecords,
    DuplicateId { record: usize, sample_id: String },
    ScoreLength { record: usize, expected: usize, found: usize },
    NonFiniteScore { record: usize, class: usize },
    NegativeScore { record: usize, class: usize, value: f64 },
    AllZeroScores { record: usize },
    ActualOutOfRange { record: usize, actual: usize },
    FeatureLength { record: usize, expected: usize, found: usize },
    NonFiniteFeature { record: usize, feature: usize },
}

impl Violation {
    /// Index of the offending record, when the violation concerns one.
    pub fn record(&self) -> Option<usize> {
        match *self {
            Violation::DuplicateId { record, .. }
            | Violation::ScoreLength { record, .. }
            | Violation::NonFiniteScore { record, .. }
            | Violation::NegativeScore { record, .. }
            | Violation::AllZeroScores { record }
            | Violation::ActualOutOfRange { record, .. }
            | Violation::FeatureLength { record, .. }
            | Violation::NonFiniteFeature { record, .. } => Some(record),
            _ => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewClasses { classes } => {
                write!(f, "at least 2 classes required, found {classes}")
            }
            Violation::EmptyClassName { index } => write!(f, "class {index} has an empty name"),
            Violation::DuplicateClassName { name } => write!(f, "duplicate class name `{name}`"),
            Violation::NoRecords => f.write_str("dataset has no records"),
            Violation::DuplicateId { sample_id, .. } => {
                write!(f, "duplicate sample id `{sample_id}`")
            }
            Violation::ScoreLength { expected, found, .. } => {
                write!(f, "expected {expected} scores, found {found}")
            }
            Violation::NonFiniteScore { class, .. } => {
                write!(f, "score for class {class} is not finite")
            }
            Violation::NegativeScore { class, value, .. } => {
                write!(f, "score for class {class} is negative ({value})")
            }
            Violation::AllZeroScores { .. } => f.write_str("all scores are zero"),
            Violation::ActualOutOfRange { actual, .. } => {
                write!(f, "actual class index {actual} out of range")
            }
            Violation::FeatureLength { expected, found, .. } => {
                write!(f, "expected {expected} feature values, found {found}")
            }
            Violation::NonFiniteFeature { feature, .. } => {
                write!(f, "feature {feature} is not finite")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    RowSumNotOne { record: usize, sum: f64 },
}

impl Warning {
    pub fn record(&self) -> Option<usize> {
        match *self {
            Warning::RowSumNotOne { record, .. } => Some(record),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::RowSumNotOne { sum, .. } => {
                write!(f, "scores flagged normalized but row sums to {sum}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_dataset(raw: &RawDataset) -> ValidationReport {
    let mut report = ValidationReport::default();
    let k = raw.classes.len();
    let f = raw.feature_names.len();

    if k < 2 {
        report.violations.push(Violation::TooFewClasses { classes: k });
    }
    let mut names = HashSet::new();
    for (index, name) in raw.classes.iter().enumerate() {
        if name.is_empty() {
            report.violations.push(Violation::EmptyClassName { index });
        } else if !names.insert(name.as_str()) {
            report.violations.push(Violation::DuplicateClassName { name: name.clone() });
        }
    }
    if raw.records.is_empty() {
        report.violations.push(Violation::NoRecords);
    }

    let mut ids = HashSet::with_capacity(raw.records.len());
    for (i, rec) in raw.records.iter().enumerate() {
        if !ids.insert(rec.sample_id.as_str()) {
            report.violations.push(Violation::DuplicateId {
                record: i,
                sample_id: rec.sample_id.clone(),
            });
        }
        if rec.actual >= k {
            report.violations.push(Violation::ActualOutOfRange { record: i, actual: rec.actual });
        }

        let mut scores_ok = true;
        if rec.scores.len() != k {
            scores_ok = false;
            report.violations.push(Violation::ScoreLength {
                record: i,
                expected: k,
                found: rec.scores.len(),
            });
        }
        for (class, &s) in rec.scores.iter().enumerate() {
            if !s.is_finite() {
                scores_ok = false;
                report.violations.push(Violation::NonFiniteScore { record: i, class });
            } else if s < 0.0 {
                scores_ok = false;
                report.violations.push(Violation::NegativeScore { record: i, class, value: s });
            }
        }
        if rec.scores.iter().all(|&s| s == 0.0) {
            scores_ok = false;
            report.violations.push(Violation::AllZeroScores { record: i });
        }

        if let Some(values) = &rec.features {
            if values.len() != f {
                report.violations.push(Violation::FeatureLength {
                    record: i,
                    expected: f,
                    found: values.len(),
                });
            }
            for (feature, v) in values.iter().enumerate() {
                if matches!(v, Some(x) if !x.is_finite()) {
                    report.violations.push(Violation::NonFiniteFeature { record: i, feature });
                }
            }
        }

        if raw.normalized && scores_ok {
            let sum: f64 = rec.scores.iter().sum();
            if (sum - 1.0).abs() > NORMALIZED_SUM_TOLERANCE {
                report.warnings.push(Warning::RowSumNotOne { record: i, sum });
            }
        }
    }
    report
}

/// A validated, immutable collection of prediction records.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    classes: Vec<ClassLabel>,
    feature_names: Vec<String>,
    records: Vec<PredictionRecord>,
    predicted: Vec<usize>,
    normalized: bool,
    image_dir: Option<PathBuf>,
}

impl Dataset {
    /// Validates `raw` and freezes it. Warnings do not block construction.
    pub fn new(raw: RawDataset) -> std::result::Result<Dataset, ValidationReport> {
        let report = validate_dataset(&raw);
        if !report.is_valid() {
            return Err(report);
        }
        let predicted = raw.records.iter().map(predicted_class).collect();
        let classes = raw
            .classes
            .into_iter()
            .enumerate()
            .map(|(index, name)| ClassLabel { name, index })
            .collect();
        Ok(Dataset {
            classes,
            feature_names: raw.feature_names,
            records: raw.records,
            predicted,
            normalized: raw.normalized,
            image_dir: None,
        })
    }

    /// Same dataset with every score row divided by its sum.
    pub fn normalized(&self) -> Dataset {
        let records: Vec<_> = self
            .records
            .iter()
            .map(|r| normalize_scores(r).expect("validated rows have positive sums"))
            .collect();
        Dataset {
            classes: self.classes.clone(),
            feature_names: self.feature_names.clone(),
            predicted: records.iter().map(predicted_class).collect(),
            records,
            normalized: true,
            image_dir: self.image_dir.clone(),
        }
    }

    /// Directory that `image_ref` file names resolve against.
    pub fn with_image_dir(mut self, dir: impl Into<PathBuf>) -> Dataset {
        self.image_dir = Some(dir.into());
        self
    }

    pub fn image_dir(&self) -> Option<&Path> {
        self.image_dir.as_deref()
    }

    /// Resolved image file of record `i`, if it has one.
    pub fn image_path(&self, i: usize) -> Option<PathBuf> {
        let name = self.records[i].image_ref.as_ref()?;
        Some(self.image_dir.as_ref()?.join(name))
    }

    pub fn classes(&self) -> &[ClassLabel] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    pub fn class_name(&self, index: usize) -> &str {
        &self.classes[index].name
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn records(&self) -> &[PredictionRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn has_images(&self) -> bool {
        self.records.iter().any(|r| r.image_ref.is_some())
    }

    /// Cached [`predicted_class`] of record `i`.
    pub fn predicted(&self, i: usize) -> usize {
        self.predicted[i]
    }

    /// Cached outcome of record `i` for `class`; `class` must be in range.
    pub fn outcome_of(&self, i: usize, class: usize) -> Outcome {
        classify(self.predicted[i], self.records[i].actual, class)
    }

    pub fn check_class(&self, class: usize) -> Result<()> {
        if class < self.classes.len() {
            Ok(())
        } else {
            Err(Error::ClassOutOfRange { index: class, classes: self.classes.len() })
        }
    }

    /// Linear lookup; use [`Dataset::index_of_ids`] for batches.
    pub fn position(&self, sample_id: &str) -> Option<usize> {
        self.records.iter().position(|r| r.sample_id == sample_id)
    }

    /// Resolves sample ids to record positions, failing on the first unknown id.
    pub fn index_of_ids<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        let lookup: std::collections::HashMap<&str, usize> = self
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.sample_id.as_str(), i))
            .collect();
        ids.iter()
            .map(|id| {
                let id = id.as_ref();
                lookup.get(id).copied().ok_or_else(|| Error::UnknownSample(id.to_string()))
            })
            .collect()
    }

    pub fn into_raw(self) -> RawDataset {
        RawDataset {
            classes: self.classes.into_iter().map(|c| c.name).collect(),
            feature_names: self.feature_names,
            records: self.records,
            normalized: self.normalized,
        }
    }
}
