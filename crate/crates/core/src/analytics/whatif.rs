use crate::analytics::confusion::{confusion_matrix, ConfusionMatrix};
use crate::error::{Error, Result};
use crate::model::{argmax, Dataset};

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionChange {
    pub record: usize,
    pub old_predicted: usize,
    pub new_predicted: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhatIfReport {
    pub weights: Vec<f64>,
    pub before: ConfusionMatrix,
    pub after: ConfusionMatrix,
    /// Records whose prediction moved, in dataset order.
    pub changed: Vec<PredictionChange>,
    /// Per class: records that are FPs after reweighting but were not before.
    pub new_false_positives: Vec<Vec<usize>>,
    /// Per class: records that turned into TPs.
    pub new_true_positives: Vec<Vec<usize>>,
}

/// Multiplies each class's scores by its weight, re-runs the argmax and
/// reports how predictions move. The dataset is left untouched.
pub fn reweight_whatif(dataset: &Dataset, weights: &[f64]) -> Result<WhatIfReport> {
    let k = dataset.class_count();
    if weights.len() != k {
        return Err(Error::InvalidWeights(format!(
            "expected {k} weights, got {}",
            weights.len()
        )));
    }
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::InvalidWeights(format!(
            "weight {i} must be a finite positive number, got {w}"
        )));
    }

    let mut scaled = vec![0.0; k];
    let new_predictions: Vec<usize> = dataset
        .records()
        .iter()
        .map(|r| {
            for ((s, &raw), &w) in scaled.iter_mut().zip(&r.scores).zip(weights) {
                *s = raw * w;
            }
            argmax(&scaled)
        })
        .collect();

    let mut changed = Vec::new();
    let mut new_false_positives = vec![Vec::new(); k];
    let mut new_true_positives = vec![Vec::new(); k];
    for (i, &new) in new_predictions.iter().enumerate() {
        let old = dataset.predicted(i);
        if old == new {
            continue;
        }
        changed.push(PredictionChange { record: i, old_predicted: old, new_predicted: new });
        if new == dataset.records()[i].actual {
            new_true_positives[new].push(i);
        } else {
            new_false_positives[new].push(i);
        }
    }

    let after = ConfusionMatrix::from_predictions(
        k,
        dataset
            .records()
            .iter()
            .zip(&new_predictions)
            .map(|(r, &p)| (r.actual, p)),
    );
    Ok(WhatIfReport {
        weights: weights.to_vec(),
        before: confusion_matrix(dataset),
        after,
        changed,
        new_false_positives,
        new_true_positives,
    })
}
