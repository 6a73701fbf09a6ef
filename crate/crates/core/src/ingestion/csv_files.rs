use std::collections::{HashMap, HashSet};
use std::io::Read;

use csv::{ReaderBuilder, StringRecord, Terminator, WriterBuilder};

use super::Diagnostic;
use crate::model::{Dataset, FeatureValue};

const SCORE_PREFIX: &str = "score:";

/// A predictions row before dataset-level validation.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialRecord {
    pub sample_id: String,
    pub actual: usize,
    pub scores: Vec<f64>,
    pub line: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPredictions {
    pub classes: Vec<String>,
    pub records: Vec<PartialRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    /// Position of the sample among the prediction records.
    pub record: usize,
    pub values: Vec<FeatureValue>,
    pub line: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedFeatures {
    pub names: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input)
}

fn writer() -> csv::Writer<Vec<u8>> {
    WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

/// Reads the header row, stripping a UTF-8 byte order mark.
fn read_header<R: Read>(
    rdr: &mut csv::Reader<R>,
    file: &str,
    errors: &mut Vec<Diagnostic>,
) -> Option<Vec<String>> {
    let mut record = StringRecord::new();
    match rdr.read_record(&mut record) {
        Ok(true) => {
            let mut cols: Vec<String> = record.iter().map(|c| c.trim().to_string()).collect();
            if let Some(first) = cols.first_mut() {
                if let Some(stripped) = first.strip_prefix('\u{feff}') {
                    *first = stripped.to_string();
                }
            }
            Some(cols)
        }
        Ok(false) => {
            errors.push(Diagnostic::new(file, Some(1), "file is empty, expected a header row"));
            None
        }
        Err(e) => {
            errors.push(Diagnostic::new(file, Some(1), format!("unreadable header: {e}")));
            None
        }
    }
}

fn parse_number(cell: &str) -> Result<f64, String> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| format!("`{cell}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{cell}` is not a finite number"))
    }
}

/// Parses `predictions.csv`. All problems are collected; rows with errors
/// are dropped from the result only when errors are returned.
pub fn parse_predictions<R: Read>(input: R) -> Result<ParsedPredictions, Vec<Diagnostic>> {
    const FILE: &str = "predictions.csv";
    let mut errors = Vec::new();
    let mut rdr = reader(input);
    let Some(header) = read_header(&mut rdr, FILE, &mut errors) else {
        return Err(errors);
    };

    let mut id_col = None;
    let mut actual_col = None;
    let mut score_cols = Vec::new();
    let mut classes: Vec<String> = Vec::new();
    let mut seen = HashSet::new();
    for (i, name) in header.iter().enumerate() {
        if !seen.insert(name.as_str()) {
            errors.push(Diagnostic::new(FILE, Some(1), format!("duplicate header column `{name}`")));
            continue;
        }
        if name == "id" {
            id_col = Some(i);
        } else if name == "actual" {
            actual_col = Some(i);
        } else if let Some(class) = name.strip_prefix(SCORE_PREFIX) {
            if class.is_empty() {
                errors.push(Diagnostic::new(FILE, Some(1), "score column without a class name"));
            } else {
                score_cols.push(i);
                classes.push(class.to_string());
            }
        }
    }
    if id_col.is_none() {
        errors.push(Diagnostic::new(FILE, Some(1), "missing header column `id`"));
    }
    if actual_col.is_none() {
        errors.push(Diagnostic::new(FILE, Some(1), "missing header column `actual`"));
    }
    if classes.len() < 2 {
        errors.push(Diagnostic::new(
            FILE,
            Some(1),
            format!("at least 2 `score:<class>` columns required, found {}", classes.len()),
        ));
    }
    let (Some(id_col), Some(actual_col)) = (id_col, actual_col) else {
        return Err(errors);
    };
    if !errors.is_empty() {
        return Err(errors);
    }

    let class_index: HashMap<&str, usize> =
        classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut ids = HashSet::new();
    let mut records = Vec::new();
    let mut row = StringRecord::new();
    let mut last_line = 1;
    loop {
        match rdr.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(last_line + 1, |p| p.line());
                errors.push(Diagnostic::new(FILE, Some(line), format!("unreadable row: {e}")));
                if matches!(e.kind(), csv::ErrorKind::Io(_)) {
                    break;
                }
                continue;
            }
        }
        let line = row.position().map_or(last_line + 1, |p| p.line());
        last_line = line;
        let err = |msg: String| Diagnostic::new(FILE, Some(line), msg);

        if row.len() != header.len() {
            errors.push(err(format!("expected {} fields, found {}", header.len(), row.len())));
            continue;
        }
        let mut row_ok = true;
        let sample_id = row[id_col].trim().to_string();
        if sample_id.is_empty() {
            errors.push(err("empty sample id".into()));
            row_ok = false;
        } else if !ids.insert(sample_id.clone()) {
            errors.push(err(format!("duplicate sample id `{sample_id}`")));
            row_ok = false;
        }
        let actual_name = row[actual_col].trim();
        let actual = class_index.get(actual_name).copied();
        if actual.is_none() {
            errors.push(err(format!("actual class `{actual_name}` is not one of the score classes")));
            row_ok = false;
        }
        let mut scores = Vec::with_capacity(score_cols.len());
        for (&col, class) in score_cols.iter().zip(&classes) {
            match parse_number(&row[col]) {
                Ok(v) => scores.push(v),
                Err(msg) => {
                    errors.push(err(format!("score for class `{class}`: {msg}")));
                    row_ok = false;
                }
            }
        }
        if scores.len() == classes.len() && scores.iter().all(|&s| s == 0.0) {
            errors.push(err("all scores are zero".into()));
            row_ok = false;
        }
        if row_ok {
            records.push(PartialRecord {
                sample_id,
                actual: actual.expect("checked above"),
                scores,
                line,
            });
        }
    }

    if errors.is_empty() && records.is_empty() {
        errors.push(Diagnostic::new(FILE, Some(1), "no data rows after the header"));
    }
    if errors.is_empty() {
        Ok(ParsedPredictions { classes, records })
    } else {
        Err(errors)
    }
}

/// Parses `features.csv` against the sample ids of the prediction records.
pub fn parse_features<R: Read>(
    input: R,
    ids: &HashMap<String, usize>,
) -> Result<ParsedFeatures, Vec<Diagnostic>> {
    const FILE: &str = "features.csv";
    let mut errors = Vec::new();
    let mut rdr = reader(input);
    let Some(header) = read_header(&mut rdr, FILE, &mut errors) else {
        return Err(errors);
    };
    if header.first().map(String::as_str) != Some("id") {
        errors.push(Diagnostic::new(FILE, Some(1), "first header column must be `id`"));
        return Err(errors);
    }
    let names: Vec<String> = header[1..].to_vec();
    let mut seen = HashSet::new();
    for name in &names {
        if name.is_empty() {
            errors.push(Diagnostic::new(FILE, Some(1), "empty feature name"));
        } else if !seen.insert(name.as_str()) {
            errors.push(Diagnostic::new(FILE, Some(1), format!("duplicate feature `{name}`")));
        }
    }

    let mut rows = Vec::new();
    let mut seen_ids = HashSet::new();
    let mut row = StringRecord::new();
    let mut last_line = 1;
    loop {
        match rdr.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(last_line + 1, |p| p.line());
                errors.push(Diagnostic::new(FILE, Some(line), format!("unreadable row: {e}")));
                if matches!(e.kind(), csv::ErrorKind::Io(_)) {
                    break;
                }
                continue;
            }
        }
        let line = row.position().map_or(last_line + 1, |p| p.line());
        last_line = line;
        let err = |msg: String| Diagnostic::new(FILE, Some(line), msg);

        if row.len() != header.len() {
            errors.push(err(format!("expected {} fields, found {}", header.len(), row.len())));
            continue;
        }
        let id = row[0].trim();
        let Some(&record) = ids.get(id) else {
            errors.push(err(format!("sample id `{id}` does not appear in predictions.csv")));
            continue;
        };
        if !seen_ids.insert(record) {
            errors.push(err(format!("duplicate sample id `{id}`")));
            continue;
        }
        let mut values = Vec::with_capacity(names.len());
        for (cell, name) in row.iter().skip(1).zip(&names) {
            if cell.trim().is_empty() {
                values.push(None);
                continue;
            }
            match parse_number(cell) {
                Ok(v) => values.push(Some(v)),
                Err(msg) => errors.push(err(format!("feature `{name}`: {msg}"))),
            }
        }
        if values.len() == names.len() {
            rows.push(FeatureRow { record, values, line });
        }
    }

    if errors.is_empty() {
        Ok(ParsedFeatures { names, rows })
    } else {
        Err(errors)
    }
}

fn number(v: f64) -> String {
    // `Display` for f64 is the shortest string that parses back to `v`.
    v.to_string()
}

/// Serializes the predictions table.
pub fn render_predictions(dataset: &Dataset) -> Vec<u8> {
    let mut w = writer();
    let mut header = vec!["id".to_string(), "actual".to_string()];
    header.extend(dataset.classes().iter().map(|c| format!("{SCORE_PREFIX}{}", c.name)));
    w.write_record(&header).expect("in-memory write");
    for r in dataset.records() {
        let mut row = Vec::with_capacity(header.len());
        row.push(r.sample_id.clone());
        row.push(dataset.class_name(r.actual).to_string());
        row.extend(r.scores.iter().map(|&s| number(s)));
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Serializes the feature table; `None` when the dataset has no features.
/// Records without a feature vector get no row.
pub fn render_features(dataset: &Dataset) -> Option<Vec<u8>> {
    if dataset.feature_names().is_empty() {
        return None;
    }
    let mut w = writer();
    let mut header = vec!["id".to_string()];
    header.extend(dataset.feature_names().iter().cloned());
    w.write_record(&header).expect("in-memory write");
    for r in dataset.records() {
        let Some(values) = &r.features else { continue };
        let mut row = Vec::with_capacity(header.len());
        row.push(r.sample_id.clone());
        row.extend(values.iter().map(|v| v.map(number).unwrap_or_default()));
        w.write_record(&row).expect("in-memory write");
    }
    Some(w.into_inner().expect("in-memory flush"))
}
