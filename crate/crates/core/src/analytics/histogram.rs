use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, Outcome, OutcomeCounts};

/// Subset of outcome groups, iterated in TP, FP, FN, TN order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OutcomeSet([bool; 4]);

impl OutcomeSet {
    pub const NONE: OutcomeSet = OutcomeSet([false; 4]);
    pub const ALL: OutcomeSet = OutcomeSet([true; 4]);
    /// TP, FP and FN: the samples predicted as or belonging to the class.
    pub const DEFAULT: OutcomeSet = OutcomeSet([true, true, true, false]);

    pub fn only(outcome: Outcome) -> Self {
        let mut set = Self::NONE;
        set.insert(outcome);
        set
    }

    pub fn contains(&self, outcome: Outcome) -> bool {
        self.0[outcome.slot()]
    }

    pub fn insert(&mut self, outcome: Outcome) {
        self.0[outcome.slot()] = true;
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|b| !b)
    }

    pub fn iter(&self) -> impl Iterator<Item = Outcome> + '_ {
        Outcome::ALL.into_iter().filter(|o| self.contains(*o))
    }
}

impl Default for OutcomeSet {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl FromIterator<Outcome> for OutcomeSet {
    fn from_iter<I: IntoIterator<Item = Outcome>>(iter: I) -> Self {
        let mut set = Self::NONE;
        for o in iter {
            set.insert(o);
        }
        set
    }
}

impl Serialize for OutcomeSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for OutcomeSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let groups = Vec::<Outcome>::deserialize(deserializer)?;
        Ok(groups.into_iter().collect())
    }
}

impl std::str::FromStr for OutcomeSet {
    type Err = String;

    /// Parses a comma list such as `tp,fp,fn`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .filter(|part| !part.trim().is_empty())
            .map(str::parse::<Outcome>)
            .collect()
    }
}

/// Binning and filtering parameters shared by every class histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HistogramSpec {
    #[serde(rename = "bins")]
    pub bin_count: usize,
    #[serde(rename = "lo")]
    pub axis_lo: f64,
    #[serde(rename = "hi")]
    pub axis_hi: f64,
    pub groups: OutcomeSet,
    /// Lower score bound for TNs; only consulted when TN is in `groups`.
    pub tn_min: f64,
    /// Upper score bound for TPs.
    pub tp_max: f64,
}

impl Default for HistogramSpec {
    fn default() -> Self {
        Self {
            bin_count: 10,
            axis_lo: 0.0,
            axis_hi: 1.0,
            groups: OutcomeSet::DEFAULT,
            tn_min: 0.01,
            tp_max: 1.0,
        }
    }
}

impl HistogramSpec {
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidSpec(msg));
        if self.bin_count == 0 {
            return invalid("bin count must be at least 1".into());
        }
        if !self.axis_lo.is_finite() || !self.axis_hi.is_finite() {
            return invalid("axis bounds must be finite".into());
        }
        if self.axis_lo >= self.axis_hi {
            return invalid(format!(
                "axis lower bound {} must be below upper bound {}",
                self.axis_lo, self.axis_hi
            ));
        }
        if self.groups.is_empty() {
            return invalid("at least one outcome group must be selected".into());
        }
        if !self.tn_min.is_finite() || self.tn_min <= 0.0 {
            return invalid(format!(
                "tn_min must be a non-zero positive lower bound on TN scores, got {}",
                self.tn_min
            ));
        }
        if !(self.tp_max > 0.0 && self.tp_max <= 1.0) {
            return invalid(format!("tp_max must lie in (0, 1], got {}", self.tp_max));
        }
        let edges = self.edges();
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!(
                "axis [{}, {}] is too narrow for {} bins",
                self.axis_lo, self.axis_hi, self.bin_count
            ));
        }
        Ok(())
    }

    /// Whether a record with this outcome and class score passes the group filter.
    pub fn admits(&self, outcome: Outcome, score: f64) -> bool {
        self.groups.contains(outcome)
            && match outcome {
                Outcome::Tn => score >= self.tn_min,
                Outcome::Tp => score <= self.tp_max,
                _ => true,
            }
    }

    /// The `bin_count + 1` bin edges, endpoints exact.
    pub fn edges(&self) -> Vec<f64> {
        let n = self.bin_count as f64;
        (0..=self.bin_count)
            .map(|i| match i {
                0 => self.axis_lo,
                i if i == self.bin_count => self.axis_hi,
                i => {
                    let i = i as f64;
                    (self.axis_lo * (n - i) + self.axis_hi * i) / n
                }
            })
            .collect()
    }

    /// Same spec with the axis moved to `[lo, hi]`.
    pub fn with_axis(mut self, lo: f64, hi: f64) -> Self {
        self.axis_lo = lo;
        self.axis_hi = hi;
        self
    }

    pub fn with_bins(mut self, bins: usize) -> Self {
        self.bin_count = bins;
        self
    }

    pub fn with_groups(mut self, groups: OutcomeSet) -> Self {
        self.groups = groups;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Below,
    Bin(usize),
    Above,
}

/// Locates `score` against `edges`: bins are `[e_i, e_{i+1})`, the last one closed.
pub fn place(edges: &[f64], score: f64) -> Placement {
    let n = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[n]);
    if score < lo {
        return Placement::Below;
    }
    if score > hi {
        return Placement::Above;
    }
    let guess = ((score - lo) / (hi - lo) * n as f64).floor();
    let mut i = if guess.is_finite() { (guess.max(0.0) as usize).min(n - 1) } else { 0 };
    while i > 0 && score < edges[i] {
        i -= 1;
    }
    while i + 1 < n && score >= edges[i + 1] {
        i += 1;
    }
    Placement::Bin(i)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    /// Record positions per outcome group, in dataset order.
    members: [Vec<usize>; 4],
}

impl HistogramBin {
    fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi, members: Default::default() }
    }

    pub fn members(&self, outcome: Outcome) -> &[usize] {
        &self.members[outcome.slot()]
    }

    pub fn count(&self, outcome: Outcome) -> usize {
        self.members[outcome.slot()].len()
    }

    pub fn counts(&self) -> OutcomeCounts {
        let mut counts = OutcomeCounts::default();
        for o in Outcome::ALL {
            *counts.get_mut(o) = self.count(o);
        }
        counts
    }

    pub fn total(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    /// All members regardless of group, in dataset order.
    pub fn all_members(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.members.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassHistogram {
    pub class: usize,
    pub spec: HistogramSpec,
    pub bins: Vec<HistogramBin>,
    pub excluded_below: usize,
    pub excluded_above: usize,
}

impl ClassHistogram {
    /// Number of filtered-in records inside the axis.
    pub fn binned_total(&self) -> usize {
        self.bins.iter().map(HistogramBin::total).sum()
    }

    /// Number of records passing the group filter, inside the axis or not.
    pub fn included_total(&self) -> usize {
        self.binned_total() + self.excluded_below + self.excluded_above
    }

    pub fn group_total(&self, outcome: Outcome) -> usize {
        self.bins.iter().map(|b| b.count(outcome)).sum()
    }

    pub fn bin(&self, index: usize) -> Result<&HistogramBin> {
        self.bins
            .get(index)
            .ok_or(Error::BinOutOfRange { index, bins: self.bins.len() })
    }
}

pub fn build_histogram(dataset: &Dataset, class: usize, spec: &HistogramSpec) -> Result<ClassHistogram> {
    spec.validate()?;
    dataset.check_class(class)?;
    let edges = spec.edges();
    let mut hist = ClassHistogram {
        class,
        spec: *spec,
        bins: edges.windows(2).map(|w| HistogramBin::new(w[0], w[1])).collect(),
        excluded_below: 0,
        excluded_above: 0,
    };
    for (i, record) in dataset.records().iter().enumerate() {
        let outcome = dataset.outcome_of(i, class);
        let score = record.scores[class];
        if !spec.admits(outcome, score) {
            continue;
        }
        match place(&edges, score) {
            Placement::Below => hist.excluded_below += 1,
            Placement::Above => hist.excluded_above += 1,
            Placement::Bin(b) => hist.bins[b].members[outcome.slot()].push(i),
        }
    }
    Ok(hist)
}

/// One histogram per class, in canonical class order.
pub fn build_all_histograms(dataset: &Dataset, spec: &HistogramSpec) -> Result<Vec<ClassHistogram>> {
    (0..dataset.class_count())
        .map(|c| build_histogram(dataset, c, spec))
        .collect()
}

/// `(min, max)` of class scores over records passing the group filter,
/// ignoring the axis bounds.
pub fn effective_range(dataset: &Dataset, class: usize, spec: &HistogramSpec) -> Result<(f64, f64)> {
    dataset.check_class(class)?;
    let mut range: Option<(f64, f64)> = None;
    for (i, record) in dataset.records().iter().enumerate() {
        let score = record.scores[class];
        if !spec.admits(dataset.outcome_of(i, class), score) {
            continue;
        }
        range = Some(match range {
            None => (score, score),
            Some((lo, hi)) => (lo.min(score), hi.max(score)),
        });
    }
    range.ok_or(Error::EmptySelection(class))
}

/// Spec whose axis spans the effective range of `class`. A degenerate range
/// `(x, x)` is widened to `[x - 0.05, x + 0.05]` so the single value stays binned.
pub fn fit_to_effective_range(
    dataset: &Dataset,
    class: usize,
    spec: &HistogramSpec,
) -> Result<HistogramSpec> {
    let (lo, hi) = effective_range(dataset, class, spec)?;
    let fitted = if lo < hi {
        spec.with_axis(lo, hi)
    } else {
        spec.with_axis(lo - 0.05, hi + 0.05)
    };
    fitted.validate()?;
    Ok(fitted)
}
