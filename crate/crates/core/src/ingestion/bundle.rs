use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::csv_files::{parse_features, parse_predictions, render_features, render_predictions};
use super::{Diagnostic, LoadError};
use crate::model::{validate_dataset, Dataset, PredictionRecord, RawDataset, Violation};

pub const FORMAT_VERSION: &str = "1";
pub const MANIFEST_FILE: &str = "manifest.json";
const PREDICTIONS_FILE: &str = "predictions.csv";
const FEATURES_FILE: &str = "features.csv";
const IMAGES_DIR: &str = "images";
const IMAGE_EXTENSIONS: [&str; 2] = ["png", "jpg"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleManifest {
    pub format_version: String,
    pub classes: Vec<String>,
    #[serde(default)]
    pub features: Vec<String>,
    #[serde(default)]
    pub normalized: bool,
    #[serde(default)]
    pub has_images: bool,
    pub predictions: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images_dir: Option<String>,
}

impl BundleManifest {
    fn for_dataset(dataset: &Dataset) -> Self {
        let has_features = !dataset.feature_names().is_empty();
        let has_images = dataset.has_images();
        BundleManifest {
            format_version: FORMAT_VERSION.to_string(),
            classes: dataset.classes().iter().map(|c| c.name.clone()).collect(),
            features: dataset.feature_names().to_vec(),
            normalized: dataset.is_normalized(),
            has_images,
            predictions: PREDICTIONS_FILE.to_string(),
            features_file: has_features.then(|| FEATURES_FILE.to_string()),
            images_dir: has_images.then(|| IMAGES_DIR.to_string()),
        }
    }

    fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("manifest serializes");
        out.push(b'\n');
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Divide every score row by its sum after validation.
    pub normalize: bool,
}

#[derive(Debug, Clone)]
pub struct LoadedBundle {
    pub manifest: BundleManifest,
    pub dataset: Dataset,
    /// Non-fatal findings, e.g. row sums off by more than the tolerance
    /// in a bundle flagged as normalized.
    pub warnings: Vec<Diagnostic>,
}

fn read(path: &Path) -> Result<Vec<u8>, LoadError> {
    fs::read(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })
}

fn manifest_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    }
}

fn find_image(dir: &Path, sample_id: &str) -> Option<String> {
    IMAGE_EXTENSIONS
        .iter()
        .map(|ext| format!("{sample_id}.{ext}"))
        .find(|name| dir.join(name).is_file())
}

/// Loads a bundle from its manifest file or the directory containing it.
/// Either every check passes or all problems found are returned together.
pub fn load_bundle(path: &Path, options: LoadOptions) -> Result<LoadedBundle, LoadError> {
    let manifest_path = manifest_path(path);
    let root = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let manifest_bytes = read(&manifest_path)?;
    let manifest: BundleManifest = serde_json::from_slice(&manifest_bytes).map_err(|e| {
        LoadError::Invalid(vec![Diagnostic::new(
            MANIFEST_FILE,
            Some(e.line() as u64),
            format!("malformed manifest: {e}"),
        )])
    })?;

    let mut errors = Vec::new();
    if manifest.format_version != FORMAT_VERSION {
        errors.push(Diagnostic::new(
            MANIFEST_FILE,
            None,
            format!(
                "unsupported format_version `{}` (expected `{FORMAT_VERSION}`)",
                manifest.format_version
            ),
        ));
    }

    let predictions = parse_predictions(&read(&root.join(&manifest.predictions))?[..]);
    let predictions = match predictions {
        Ok(p) => p,
        Err(mut diags) => {
            errors.append(&mut diags);
            return Err(LoadError::Invalid(errors));
        }
    };
    if predictions.classes != manifest.classes {
        errors.push(Diagnostic::new(
            PREDICTIONS_FILE,
            Some(1),
            format!(
                "score columns {:?} do not match manifest classes {:?}",
                predictions.classes, manifest.classes
            ),
        ));
    }

    let mut records: Vec<PredictionRecord> = predictions
        .records
        .iter()
        .map(|p| PredictionRecord::new(p.sample_id.clone(), p.actual, p.scores.clone()))
        .collect();
    let lines: Vec<u64> = predictions.records.iter().map(|p| p.line).collect();

    match (&manifest.features_file, manifest.features.is_empty()) {
        (Some(file), _) => {
            let ids: HashMap<String, usize> = records
                .iter()
                .enumerate()
                .map(|(i, r)| (r.sample_id.clone(), i))
                .collect();
            match parse_features(&read(&root.join(file))?[..], &ids) {
                Ok(parsed) => {
                    if parsed.names != manifest.features {
                        errors.push(Diagnostic::new(
                            FEATURES_FILE,
                            Some(1),
                            format!(
                                "feature columns {:?} do not match manifest features {:?}",
                                parsed.names, manifest.features
                            ),
                        ));
                    }
                    for row in parsed.rows {
                        records[row.record].features = Some(row.values);
                    }
                }
                Err(mut diags) => errors.append(&mut diags),
            }
        }
        (None, false) => errors.push(Diagnostic::new(
            MANIFEST_FILE,
            None,
            "manifest lists features but no features_file",
        )),
        (None, true) => {}
    }

    let image_dir = (manifest.has_images || manifest.images_dir.is_some())
        .then(|| root.join(manifest.images_dir.as_deref().unwrap_or(IMAGES_DIR)));
    if let Some(dir) = &image_dir {
        for r in &mut records {
            r.image_ref = find_image(dir, &r.sample_id);
        }
    }

    if !errors.is_empty() {
        return Err(LoadError::Invalid(errors));
    }

    let raw = RawDataset {
        classes: manifest.classes.clone(),
        feature_names: manifest.features.clone(),
        records,
        normalized: manifest.normalized,
    };
    let line_of = |record: Option<usize>| record.map(|i| lines[i]);
    let report = validate_dataset(&raw);
    if !report.is_valid() {
        return Err(LoadError::Invalid(
            report
                .violations
                .iter()
                .map(|v| {
                    let file = match v {
                        Violation::FeatureLength { .. } | Violation::NonFiniteFeature { .. } => {
                            FEATURES_FILE
                        }
                        _ => PREDICTIONS_FILE,
                    };
                    Diagnostic::new(file, line_of(v.record()), v.to_string())
                })
                .collect(),
        ));
    }
    let warnings = report
        .warnings
        .iter()
        .map(|w| Diagnostic::new(PREDICTIONS_FILE, line_of(w.record()), w.to_string()))
        .collect();
    let dataset = Dataset::new(raw).expect("validated above");

    let mut dataset = if options.normalize { dataset.normalized() } else { dataset };
    if let Some(dir) = image_dir {
        dataset = dataset.with_image_dir(dir);
    }
    Ok(LoadedBundle { manifest, dataset, warnings })
}

fn write_file(path: &Path, bytes: &[u8]) -> io::Result<()> {
    fs::write(path, bytes)
}

/// Writes `dataset` as a bundle into `dir`, creating it if needed. Output
/// bytes depend only on the dataset contents.
pub fn write_bundle(dataset: &Dataset, dir: &Path) -> io::Result<BundleManifest> {
    fs::create_dir_all(dir)?;
    let manifest = BundleManifest::for_dataset(dataset);
    write_file(&dir.join(PREDICTIONS_FILE), &render_predictions(dataset))?;
    if let Some(features) = render_features(dataset) {
        write_file(&dir.join(FEATURES_FILE), &features)?;
    }
    if manifest.has_images {
        let target = dir.join(IMAGES_DIR);
        fs::create_dir_all(&target)?;
        for i in 0..dataset.len() {
            let (Some(src), Some(name)) = (dataset.image_path(i), &dataset.records()[i].image_ref)
            else {
                continue;
            };
            let dst = target.join(name);
            if src != dst {
                fs::copy(&src, &dst)?;
            }
        }
    }
    write_file(&dir.join(MANIFEST_FILE), &manifest.to_json())?;
    Ok(manifest)
}

/// Hex SHA-256 over the bundle serialization of `dataset`.
pub fn fingerprint(dataset: &Dataset) -> String {
    let mut hasher = Sha256::new();
    let parts = [
        Some(BundleManifest::for_dataset(dataset).to_json()),
        Some(render_predictions(dataset)),
        render_features(dataset),
    ];
    for part in parts.iter().flatten() {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
