//! Reading and writing the on-disk bundle format:
//!
//! ```text
//! bundle/
//!   manifest.json
//!   predictions.csv   id,actual,score:<class1>,...,score:<classK>
//!   features.csv      id,<f1>,...,<fF>     (optional, empty cell = missing)
//!   images/           <sample_id>.png | <sample_id>.jpg   (optional)
//! ```

mod bundle;
mod csv_files;

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub use bundle::{
    fingerprint, load_bundle, write_bundle, BundleManifest, LoadOptions, LoadedBundle,
    FORMAT_VERSION, MANIFEST_FILE,
};
pub use csv_files::{
    parse_features, parse_predictions, render_features, render_predictions, FeatureRow,
    ParsedFeatures, ParsedPredictions, PartialRecord,
};

/// A problem found in a bundle file, with its 1-based line when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub file: String,
    pub line: Option<u64>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(file: impl Into<String>, line: Option<u64>, message: impl Into<String>) -> Self {
        Self { file: file.into(), line, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.file, line, self.message),
            None => write!(f, "{}: {}", self.file, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bundle is invalid ({} problem(s))", .0.len())]
    Invalid(Vec<Diagnostic>),
}

impl LoadError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            LoadError::Invalid(d) => d,
            LoadError::Io { .. } => &[],
        }
    }
}
