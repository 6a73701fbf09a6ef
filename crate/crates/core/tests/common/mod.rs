//! Test fixtures and a brute-force recount of every definition, written
//! without touching the engine's own code paths.
#![allow(dead_code)]

use classilist_core::{Dataset, PredictionRecord, RawDataset};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const TP: usize = 0;
pub const FP: usize = 1;
pub const FN: usize = 2;
pub const TN: usize = 3;

/// The three-class toy set used across the tests.
pub fn t1_raw() -> RawDataset {
    let rows: [(&str, usize, [f64; 3]); 6] = [
        ("s1", 0, [0.9, 0.1, 0.0]),
        ("s2", 0, [0.4, 0.5, 0.1]),
        ("s3", 1, [0.2, 0.7, 0.1]),
        ("s4", 2, [0.5, 0.2, 0.3]),
        ("s5", 2, [0.0, 0.0, 1.0]),
        ("s6", 1, [0.5, 0.5, 0.0]),
    ];
    RawDataset {
        classes: vec!["A".into(), "B".into(), "C".into()],
        feature_names: vec!["f1".into()],
        records: rows
            .iter()
            .enumerate()
            .map(|(i, (id, actual, scores))| {
                PredictionRecord::new(*id, *actual, scores.to_vec())
                    .with_features(vec![Some(i as f64 + 1.0)])
            })
            .collect(),
        normalized: false,
    }
}

pub fn t1() -> Dataset {
    Dataset::new(t1_raw()).expect("toy set is valid")
}

/// Random valid dataset: 1..=max_n records, 2..=max_k classes. Half the rows
/// use scores on a 0.1 grid so ties and bin-edge hits are common.
pub fn random_dataset(rng: &mut StdRng, max_n: usize, max_k: usize) -> Dataset {
    let n = rng.gen_range(1..=max_n);
    let k = rng.gen_range(2..=max_k);
    let f = rng.gen_range(0..=3);
    let records = (0..n)
        .map(|i| {
            let grid = rng.gen_bool(0.5);
            let mut scores: Vec<f64> = (0..k)
                .map(|_| {
                    if grid {
                        rng.gen_range(0..=10) as f64 / 10.0
                    } else if rng.gen_bool(0.2) {
                        0.0
                    } else {
                        rng.gen::<f64>()
                    }
                })
                .collect();
            if scores.iter().all(|&s| s == 0.0) {
                let j = rng.gen_range(0..k);
                scores[j] = 1.0;
            }
            if rng.gen_bool(0.3) {
                let sum: f64 = scores.iter().sum();
                scores.iter_mut().for_each(|s| *s /= sum);
            }
            let mut rec = PredictionRecord::new(format!("r{i}"), rng.gen_range(0..k), scores);
            if f > 0 && rng.gen_bool(0.9) {
                rec = rec.with_features(
                    (0..f)
                        .map(|_| rng.gen_bool(0.8).then(|| rng.gen_range(-50.0..50.0)))
                        .collect(),
                );
            }
            rec
        })
        .collect();
    Dataset::new(RawDataset {
        classes: (0..k).map(|c| format!("c{c}")).collect(),
        feature_names: (0..f).map(|j| format!("f{j}")).collect(),
        records,
        normalized: false,
    })
    .expect("generator emits valid datasets")
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// ---- oracle --------------------------------------------------------------

/// Highest score, first index wins ties.
pub fn oracle_predicted(scores: &[f64]) -> usize {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    scores.iter().position(|&s| s == max).unwrap()
}

/// Outcome slot (TP, FP, FN, TN) of a record for class `c`.
pub fn oracle_outcome(rec: &PredictionRecord, c: usize) -> usize {
    let p = oracle_predicted(&rec.scores);
    let t = rec.actual;
    if p == c && t == c {
        TP
    } else if p == c {
        FP
    } else if t == c {
        FN
    } else {
        TN
    }
}

pub fn oracle_confusion(ds: &Dataset) -> Vec<Vec<Vec<usize>>> {
    let k = ds.class_count();
    let mut m = vec![vec![Vec::new(); k]; k];
    for (i, r) in ds.records().iter().enumerate() {
        m[r.actual][oracle_predicted(&r.scores)].push(i);
    }
    m
}

pub fn oracle_counts(ds: &Dataset) -> Vec<[usize; 4]> {
    (0..ds.class_count())
        .map(|c| {
            let mut counts = [0; 4];
            for r in ds.records() {
                counts[oracle_outcome(r, c)] += 1;
            }
            counts
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct OracleSpec {
    pub bins: usize,
    pub lo: f64,
    pub hi: f64,
    /// Admitted outcome slots.
    pub groups: [bool; 4],
    pub tn_min: f64,
    pub tp_max: f64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec { bins: 10, lo: 0.0, hi: 1.0, groups: [true, true, true, false], tn_min: 0.01, tp_max: 1.0 }
    }
}

pub fn oracle_admits(spec: &OracleSpec, outcome: usize, score: f64) -> bool {
    spec.groups[outcome]
        && !(outcome == TN && score < spec.tn_min)
        && !(outcome == TP && score > spec.tp_max)
}

pub struct OracleHistogram {
    /// bins[b][slot] = record positions
    pub bins: Vec<[Vec<usize>; 4]>,
    pub below: usize,
    pub above: usize,
}

/// Edge `i` of `n` equal-width bins: `(lo * (n - i) + hi * i) / n`.
/// The two outer edges are the axis bounds themselves.
pub fn oracle_edge(spec: &OracleSpec, i: usize) -> f64 {
    if i == 0 {
        return spec.lo;
    }
    if i == spec.bins {
        return spec.hi;
    }
    let n = spec.bins as f64;
    let i = i as f64;
    (spec.lo * (n - i) + spec.hi * i) / n
}

/// Linear scan over bins: `[e_b, e_{b+1})`, last bin closed.
pub fn oracle_histogram(ds: &Dataset, c: usize, spec: &OracleSpec) -> OracleHistogram {
    let mut h = OracleHistogram {
        bins: (0..spec.bins).map(|_| Default::default()).collect(),
        below: 0,
        above: 0,
    };
    for (i, r) in ds.records().iter().enumerate() {
        let o = oracle_outcome(r, c);
        let s = r.scores[c];
        if !oracle_admits(spec, o, s) {
            continue;
        }
        if s < spec.lo {
            h.below += 1;
            continue;
        }
        if s > spec.hi {
            h.above += 1;
            continue;
        }
        let b = (0..spec.bins)
            .find(|&b| {
                let lo = oracle_edge(spec, b);
                let hi = oracle_edge(spec, b + 1);
                lo <= s && (s < hi || (b + 1 == spec.bins && s <= hi))
            })
            .expect("score inside the axis falls in some bin");
        h.bins[b][o].push(i);
    }
    h
}

/// Where `rec_index` sits in the oracle histogram of class `c`, if anywhere.
pub fn oracle_locate(h: &OracleHistogram, rec_index: usize) -> Option<(usize, usize)> {
    h.bins.iter().enumerate().find_map(|(b, slots)| {
        slots
            .iter()
            .position(|members| members.contains(&rec_index))
            .map(|slot| (b, slot))
    })
}

/// `oracle_locate` for every record at once.
pub fn oracle_locations(h: &OracleHistogram, records: usize) -> Vec<Option<(usize, usize)>> {
    let mut at = vec![None; records];
    for (b, slots) in h.bins.iter().enumerate() {
        for (slot, members) in slots.iter().enumerate() {
            for &i in members {
                at[i] = Some((b, slot));
            }
        }
    }
    at
}
