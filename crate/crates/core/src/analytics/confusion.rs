use crate::error::Result;
use crate::model::{Dataset, OutcomeCounts};

/// Actual-by-predicted counts with the member records of every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    classes: usize,
    members: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub(crate) fn from_predictions(
        classes: usize,
        cells: impl Iterator<Item = (usize, usize)>,
    ) -> ConfusionMatrix {
        let mut members = vec![Vec::new(); classes * classes];
        for (i, (actual, predicted)) in cells.enumerate() {
            members[actual * classes + predicted].push(i);
        }
        ConfusionMatrix { classes, members }
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn get(&self, actual: usize, predicted: usize) -> usize {
        self.members(actual, predicted).len()
    }

    /// Record positions in the cell, in dataset order.
    pub fn members(&self, actual: usize, predicted: usize) -> &[usize] {
        &self.members[actual * self.classes + predicted]
    }

    pub fn row(&self, actual: usize) -> Vec<usize> {
        (0..self.classes).map(|p| self.get(actual, p)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.classes).map(|t| self.row(t)).collect()
    }

    pub fn row_sum(&self, actual: usize) -> usize {
        (0..self.classes).map(|p| self.get(actual, p)).sum()
    }

    pub fn column_sum(&self, predicted: usize) -> usize {
        (0..self.classes).map(|t| self.get(t, predicted)).sum()
    }

    pub fn total(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    pub fn check_cell(&self, actual: usize, predicted: usize) -> Result<()> {
        for index in [actual, predicted] {
            if index >= self.classes {
                return Err(crate::Error::ClassOutOfRange { index, classes: self.classes });
            }
        }
        Ok(())
    }
}

pub fn confusion_matrix(dataset: &Dataset) -> ConfusionMatrix {
    ConfusionMatrix::from_predictions(
        dataset.class_count(),
        dataset
            .records()
            .iter()
            .enumerate()
            .map(|(i, r)| (r.actual, dataset.predicted(i))),
    )
}

/// TP/FP/FN/TN totals for every class.
pub fn per_class_counts(dataset: &Dataset) -> Vec<OutcomeCounts> {
    let k = dataset.class_count();
    let mut counts = vec![OutcomeCounts::default(); k];
    for i in 0..dataset.len() {
        let actual = dataset.records()[i].actual;
        let predicted = dataset.predicted(i);
        if actual == predicted {
            counts[actual].tp += 1;
        } else {
            counts[predicted].fp += 1;
            counts[actual].fn_ += 1;
        }
    }
    let n = dataset.len();
    for c in &mut counts {
        c.tn = n - c.tp - c.fp - c.fn_;
    }
    counts
}
