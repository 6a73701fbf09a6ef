//! Brushing: resolve a clicked bar or confusion cell into its samples and
//! locate those samples in every class histogram.

use crate::analytics::histogram::ClassHistogram;
use crate::error::{Error, Result};
use crate::model::{Dataset, Outcome, OutcomeCounts};

/// Selected samples within one bin of one class histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Highlight {
    pub class: usize,
    pub bin: usize,
    pub counts: OutcomeCounts,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelectionResult {
    /// Selected record positions, in dataset order.
    pub records: Vec<usize>,
    /// Non-empty highlights ordered by (class, bin).
    pub highlights: Vec<Highlight>,
    /// Distinct (actual, predicted) cells, in order of first appearance.
    pub cells: Vec<(usize, usize)>,
}

impl SelectionResult {
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn sample_ids<'a>(&self, dataset: &'a Dataset) -> Vec<&'a str> {
        self.records
            .iter()
            .map(|&i| dataset.records()[i].sample_id.as_str())
            .collect()
    }

    pub fn highlight(&self, class: usize, bin: usize) -> Option<&Highlight> {
        self.highlights.iter().find(|h| h.class == class && h.bin == bin)
    }
}

fn resolve(dataset: &Dataset, histograms: &[ClassHistogram], records: Vec<usize>) -> SelectionResult {
    if records.is_empty() {
        return SelectionResult::default();
    }
    let mut selected = vec![false; dataset.len()];
    for &i in &records {
        selected[i] = true;
    }

    let mut highlights = Vec::new();
    for hist in histograms {
        for (b, bin) in hist.bins.iter().enumerate() {
            let mut counts = OutcomeCounts::default();
            for o in Outcome::ALL {
                *counts.get_mut(o) = bin.members(o).iter().filter(|&&i| selected[i]).count();
            }
            if !counts.is_empty() {
                highlights.push(Highlight { class: hist.class, bin: b, counts });
            }
        }
    }
    highlights.sort_by_key(|h| (h.class, h.bin));

    let mut cells: Vec<(usize, usize)> = Vec::new();
    for &i in &records {
        let cell = (dataset.records()[i].actual, dataset.predicted(i));
        if !cells.contains(&cell) {
            cells.push(cell);
        }
    }
    SelectionResult { records, highlights, cells }
}

fn histogram_for(histograms: &[ClassHistogram], class: usize) -> Result<&ClassHistogram> {
    histograms
        .iter()
        .find(|h| h.class == class)
        .ok_or(Error::MissingHistogram(class))
}

/// Selects the samples of bar `bin` in the histogram of `class`, restricted
/// to `group` when given.
pub fn select_bar(
    dataset: &Dataset,
    histograms: &[ClassHistogram],
    class: usize,
    bin: usize,
    group: Option<Outcome>,
) -> Result<SelectionResult> {
    dataset.check_class(class)?;
    let bin = histogram_for(histograms, class)?.bin(bin)?;
    let records = match group {
        Some(g) => bin.members(g).to_vec(),
        None => bin.all_members(),
    };
    Ok(resolve(dataset, histograms, records))
}

/// Selects the samples of confusion cell (`actual`, `predicted`).
pub fn select_cell(
    dataset: &Dataset,
    histograms: &[ClassHistogram],
    actual: usize,
    predicted: usize,
) -> Result<SelectionResult> {
    dataset.check_class(actual)?;
    dataset.check_class(predicted)?;
    let records = (0..dataset.len())
        .filter(|&i| dataset.records()[i].actual == actual && dataset.predicted(i) == predicted)
        .collect();
    Ok(resolve(dataset, histograms, records))
}

/// Selects an arbitrary set of samples by id.
pub fn select_samples<S: AsRef<str>>(
    dataset: &Dataset,
    histograms: &[ClassHistogram],
    ids: &[S],
) -> Result<SelectionResult> {
    let mut records = dataset.index_of_ids(ids)?;
    records.sort_unstable();
    records.dedup();
    Ok(resolve(dataset, histograms, records))
}
