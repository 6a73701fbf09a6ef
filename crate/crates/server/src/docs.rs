//! JSON documents returned by the API. The CLI report reuses them so the two
//! outputs cannot drift apart.

use classilist_core::analytics::{
    effective_range, ClassHistogram, ConfusionMatrix, HistogramSpec, SelectionResult, WhatIfReport,
};
use classilist_core::{Dataset, Outcome, OutcomeCounts};
use serde::Serialize;

use crate::state::Snapshot;

#[derive(Debug, Clone, Serialize)]
pub struct ClassCountsDoc {
    pub class: String,
    #[serde(flatten)]
    pub counts: OutcomeCounts,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetaDoc {
    pub classes: Vec<String>,
    pub n: usize,
    pub features: Vec<String>,
    pub has_images: bool,
    pub normalized: bool,
    pub per_class_counts: Vec<ClassCountsDoc>,
    pub fingerprint: String,
}

pub fn meta(snapshot: &Snapshot) -> MetaDoc {
    let ds = &snapshot.dataset;
    MetaDoc {
        classes: class_names(ds),
        n: ds.len(),
        features: ds.feature_names().to_vec(),
        has_images: ds.has_images(),
        normalized: ds.is_normalized(),
        per_class_counts: classilist_core::analytics::per_class_counts(ds)
            .into_iter()
            .enumerate()
            .map(|(c, counts)| ClassCountsDoc { class: ds.class_name(c).to_string(), counts })
            .collect(),
        fingerprint: snapshot.fingerprint.clone(),
    }
}

/// Sample ids per outcome group.
#[derive(Debug, Clone, Default, Serialize)]
pub struct MembersDoc {
    pub tp: Vec<String>,
    pub fp: Vec<String>,
    #[serde(rename = "fn")]
    pub fn_: Vec<String>,
    pub tn: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BinDoc {
    pub lo: f64,
    pub hi: f64,
    pub counts: OutcomeCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<MembersDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangeDoc {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramDoc {
    pub class: String,
    pub class_index: usize,
    pub edges: Vec<f64>,
    pub bins: Vec<BinDoc>,
    pub excluded_below: usize,
    pub excluded_above: usize,
    pub included_total: usize,
    /// Min and max filtered score, ignoring the axis; null when nothing passes.
    pub effective_range: Option<RangeDoc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramsDoc {
    pub spec: HistogramSpec,
    pub histograms: Vec<HistogramDoc>,
}

pub fn histogram(ds: &Dataset, h: &ClassHistogram, members: bool) -> HistogramDoc {
    let ids = |idx: &[usize]| idx.iter().map(|&i| ds.records()[i].sample_id.clone()).collect();
    HistogramDoc {
        class: ds.class_name(h.class).to_string(),
        class_index: h.class,
        edges: h.spec.edges(),
        bins: h
            .bins
            .iter()
            .map(|b| BinDoc {
                lo: b.lo,
                hi: b.hi,
                counts: b.counts(),
                members: members.then(|| MembersDoc {
                    tp: ids(b.members(Outcome::Tp)),
                    fp: ids(b.members(Outcome::Fp)),
                    fn_: ids(b.members(Outcome::Fn)),
                    tn: ids(b.members(Outcome::Tn)),
                }),
            })
            .collect(),
        excluded_below: h.excluded_below,
        excluded_above: h.excluded_above,
        included_total: h.included_total(),
        effective_range: effective_range(ds, h.class, &h.spec)
            .ok()
            .map(|(lo, hi)| RangeDoc { lo, hi }),
    }
}

/// Histogram documents for `classes` (all classes when empty), in request order.
pub fn histograms(
    ds: &Dataset,
    spec: &HistogramSpec,
    classes: &[usize],
    members: bool,
) -> classilist_core::error::Result<HistogramsDoc> {
    spec.validate()?;
    let all: Vec<usize>;
    let classes = if classes.is_empty() {
        all = (0..ds.class_count()).collect();
        &all
    } else {
        classes
    };
    let histograms = classes
        .iter()
        .map(|&c| {
            let h = classilist_core::analytics::build_histogram(ds, c, spec)?;
            Ok(histogram(ds, &h, members))
        })
        .collect::<classilist_core::error::Result<_>>()?;
    Ok(HistogramsDoc { spec: *spec, histograms })
}

#[derive(Debug, Clone, Serialize)]
pub struct CellDoc {
    pub actual: String,
    pub predicted: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfusionDoc {
    /// Row and column labels; rows are actual classes, columns predicted.
    pub classes: Vec<String>,
    pub matrix: Vec<Vec<usize>>,
    pub total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<Vec<Vec<String>>>>,
}

pub fn confusion(ds: &Dataset, m: &ConfusionMatrix, members: bool) -> ConfusionDoc {
    let k = m.class_count();
    ConfusionDoc {
        classes: class_names(ds),
        matrix: m.rows(),
        total: m.total(),
        members: members.then(|| {
            (0..k)
                .map(|a| (0..k).map(|p| sample_ids(ds, m.members(a, p))).collect())
                .collect()
        }),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HighlightDoc {
    pub class: String,
    pub class_index: usize,
    pub bin: usize,
    pub counts: OutcomeCounts,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionDoc<S: Serialize> {
    pub selector: S,
    pub spec: HistogramSpec,
    pub sample_ids: Vec<String>,
    pub highlights: Vec<HighlightDoc>,
    pub cells: Vec<CellDoc>,
}

pub fn selection<S: Serialize>(
    ds: &Dataset,
    selector: S,
    spec: HistogramSpec,
    result: &SelectionResult,
) -> SelectionDoc<S> {
    SelectionDoc {
        selector,
        spec,
        sample_ids: sample_ids(ds, &result.records),
        highlights: result
            .highlights
            .iter()
            .map(|h| HighlightDoc {
                class: ds.class_name(h.class).to_string(),
                class_index: h.class,
                bin: h.bin,
                counts: h.counts,
            })
            .collect(),
        cells: result
            .cells
            .iter()
            .map(|&(a, p)| CellDoc {
                actual: ds.class_name(a).to_string(),
                predicted: ds.class_name(p).to_string(),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassOutcomeDoc {
    pub class: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleDoc {
    pub id: String,
    pub actual: String,
    pub predicted: String,
    pub scores: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<ClassOutcomeDoc>>,
    pub features: Option<Vec<Option<f64>>>,
    pub image_url: Option<String>,
}

pub fn sample(ds: &Dataset, i: usize, outcomes: bool) -> SampleDoc {
    let r = &ds.records()[i];
    SampleDoc {
        id: r.sample_id.clone(),
        actual: ds.class_name(r.actual).to_string(),
        predicted: ds.class_name(ds.predicted(i)).to_string(),
        scores: r.scores.clone(),
        outcomes: outcomes.then(|| {
            (0..ds.class_count())
                .map(|c| ClassOutcomeDoc {
                    class: ds.class_name(c).to_string(),
                    outcome: ds.outcome_of(i, c),
                })
                .collect()
        }),
        features: r.features.clone(),
        image_url: r.image_ref.as_ref().map(|_| image_url(&r.sample_id)),
    }
}

/// `/api/image/<id>` with the id percent-encoded as a path segment.
pub fn image_url(id: &str) -> String {
    use percent_encoding::{utf8_percent_encode, NON_ALPHANUMERIC};
    format!("/api/image/{}", utf8_percent_encode(id, NON_ALPHANUMERIC))
}

#[derive(Debug, Clone, Serialize)]
pub struct ChangeDoc {
    pub id: String,
    pub actual: String,
    pub old_predicted: String,
    pub new_predicted: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassIdsDoc {
    pub class: String,
    pub ids: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WhatIfDoc {
    pub weights: Vec<f64>,
    pub before: Vec<Vec<usize>>,
    pub after: Vec<Vec<usize>>,
    pub changed: Vec<ChangeDoc>,
    pub new_false_positives: Vec<ClassIdsDoc>,
    pub new_true_positives: Vec<ClassIdsDoc>,
}

pub fn whatif(ds: &Dataset, report: &WhatIfReport) -> WhatIfDoc {
    let per_class = |lists: &[Vec<usize>]| {
        lists
            .iter()
            .enumerate()
            .map(|(c, idx)| ClassIdsDoc { class: ds.class_name(c).to_string(), ids: sample_ids(ds, idx) })
            .collect()
    };
    WhatIfDoc {
        weights: report.weights.clone(),
        before: report.before.rows(),
        after: report.after.rows(),
        changed: report
            .changed
            .iter()
            .map(|ch| {
                let r = &ds.records()[ch.record];
                ChangeDoc {
                    id: r.sample_id.clone(),
                    actual: ds.class_name(r.actual).to_string(),
                    old_predicted: ds.class_name(ch.old_predicted).to_string(),
                    new_predicted: ds.class_name(ch.new_predicted).to_string(),
                }
            })
            .collect(),
        new_false_positives: per_class(&report.new_false_positives),
        new_true_positives: per_class(&report.new_true_positives),
    }
}

/// Everything a static report needs: meta, all histograms under one spec
/// and the confusion matrix.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDoc {
    pub meta: MetaDoc,
    pub histograms: HistogramsDoc,
    pub confusion: ConfusionDoc,
}

pub fn report(
    snapshot: &Snapshot,
    spec: &HistogramSpec,
    members: bool,
) -> classilist_core::error::Result<ReportDoc> {
    let ds = &snapshot.dataset;
    Ok(ReportDoc {
        meta: meta(snapshot),
        histograms: histograms(ds, spec, &[], members)?,
        confusion: confusion(ds, &classilist_core::analytics::confusion_matrix(ds), members),
    })
}

fn class_names(ds: &Dataset) -> Vec<String> {
    ds.classes().iter().map(|c| c.name.clone()).collect()
}

fn sample_ids(ds: &Dataset, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| ds.records()[i].sample_id.clone()).collect()
}
