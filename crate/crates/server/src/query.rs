//! Request parameter and body parsing.

use classilist_core::analytics::{HistogramSpec, OutcomeSet};
use classilist_core::{Dataset, Outcome};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;

/// A class given by name or by index. Names win when a name looks like a number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassRef {
    Index(usize),
    Name(String),
}

impl ClassRef {
    pub fn resolve(&self, ds: &Dataset) -> Result<usize, ApiError> {
        match self {
            ClassRef::Index(i) if *i < ds.class_count() => Ok(*i),
            ClassRef::Index(i) => Err(ApiError::bad_request(format!(
                "class index {i} out of range (dataset has {} classes)",
                ds.class_count()
            ))),
            ClassRef::Name(name) => ds
                .class_index(name)
                .or_else(|| name.parse().ok().filter(|&i: &usize| i < ds.class_count()))
                .ok_or_else(|| ApiError::bad_request(format!("unknown class `{name}`"))),
        }
    }
}

/// Parsed `GET /api/histograms` query.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramQuery {
    pub spec: HistogramSpec,
    pub classes: Vec<ClassRef>,
    pub members: bool,
}

impl HistogramQuery {
    /// Unset spec parameters take their defaults; unknown parameters are rejected.
    pub fn parse(pairs: &[(String, String)]) -> Result<Self, ApiError> {
        let mut q = HistogramQuery { spec: HistogramSpec::default(), classes: Vec::new(), members: false };
        for (key, value) in pairs {
            match key.as_str() {
                "class" => q.classes.push(ClassRef::Name(value.clone())),
                "bins" => q.spec.bin_count = number(key, value)?,
                "lo" => q.spec.axis_lo = number(key, value)?,
                "hi" => q.spec.axis_hi = number(key, value)?,
                "tn_min" => q.spec.tn_min = number(key, value)?,
                "tp_max" => q.spec.tp_max = number(key, value)?,
                "groups" => {
                    q.spec.groups = value.parse::<OutcomeSet>().map_err(ApiError::bad_request)?
                }
                "members" => q.members = flag(key, value)?,
                other => return Err(ApiError::bad_request(format!("unknown parameter `{other}`"))),
            }
        }
        q.spec.validate()?;
        Ok(q)
    }
}

/// Ids from `ids=a,b` and/or repeated `ids=` parameters, plus the `outcomes` flag.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdsQuery {
    pub ids: Vec<String>,
    pub outcomes: bool,
}

impl IdsQuery {
    pub fn parse(pairs: &[(String, String)], allow_outcomes: bool) -> Result<Self, ApiError> {
        let mut q = IdsQuery::default();
        for (key, value) in pairs {
            match key.as_str() {
                "ids" => q
                    .ids
                    .extend(value.split(',').filter(|s| !s.is_empty()).map(str::to_string)),
                "outcomes" if allow_outcomes => q.outcomes = flag(key, value)?,
                other => return Err(ApiError::bad_request(format!("unknown parameter `{other}`"))),
            }
        }
        Ok(q)
    }
}

/// What a selection request picks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    Bar {
        class: ClassRef,
        bin: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        group: Option<Outcome>,
    },
    Cell {
        actual: ClassRef,
        predicted: ClassRef,
    },
    Samples {
        ids: Vec<String>,
    },
}

/// `POST /api/selection` body, e.g. `{"bar": {"class": "A", "bin": 5}, "spec": {...}}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SelectionRequest {
    #[serde(flatten)]
    pub selector: Selector,
    #[serde(default)]
    pub spec: HistogramSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhatIfRequest {
    pub weights: Vec<f64>,
}

pub fn json_body<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("invalid body: {e}")))
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ApiError> {
    value
        .trim()
        .parse()
        .map_err(|_| ApiError::bad_request(format!("parameter `{key}`: cannot parse `{value}`")))
}

fn flag(key: &str, value: &str) -> Result<bool, ApiError> {
    match value {
        "" | "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(ApiError::bad_request(format!("parameter `{key}`: expected true or false"))),
    }
}
