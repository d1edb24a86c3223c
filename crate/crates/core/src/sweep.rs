//! Discard sweeps over a grid of fractions, policies and seeds.
//!
//! Each cell plans a selection, records the remaining share of normalized
//! discriminability and, optionally, the accuracy of a nearest-centroid
//! classifier trained on even rows and tested on odd rows of the reduced
//! data. A built-in generator provides labeled data whose label signal lives
//! in the low-NID features.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::approx::{DEFAULT_EXACT_THRESHOLD, DEFAULT_SUPPORT_LENGTH};
use crate::error::{Error, Result};
use crate::matrix::DatasetMatrix;
use crate::rng::SplitMix64;
use crate::scores::{score_features_auto, FeatureScore};
use crate::selection::{apply_selection, plan_selection, remaining_share_with, Policy, ShareMode};

/// 1% steps up to 10%, then 10% steps up to 90%.
pub const DEFAULT_GRID: &str = "0.01:0.10:0.01,0.1:0.9:0.1";

const GRID_TOLERANCE: f64 = 1e-12;

/// Parses `start:stop:step` segments joined by commas.
///
/// Endpoints are inclusive within `1e-12`; values are rounded to 12 decimals
/// and duplicates across segments are dropped. A bare number is a single
/// value. The result is sorted ascending.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| Error::InvalidArgument(format!("grid {spec:?}: {msg}"));
    let mut out: Vec<f64> = Vec::new();
    for segment in spec.split(',').map(str::trim) {
        if segment.is_empty() {
            return Err(bad("empty segment".into()));
        }
        let parts: Vec<f64> = segment
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(format!("{segment:?}: {e}")))?;
        let values = match parts.as_slice() {
            [v] => vec![*v],
            [start, stop, step] => {
                if !step.is_finite() || *step <= 0.0 {
                    return Err(bad(format!("step must be positive in {segment:?}")));
                }
                if stop < start {
                    return Err(bad(format!("stop below start in {segment:?}")));
                }
                let mut vals = Vec::new();
                let mut i = 0u32;
                loop {
                    let v = start + i as f64 * step;
                    if v > stop + GRID_TOLERANCE {
                        break;
                    }
                    vals.push((v * 1e12).round() / 1e12);
                    i += 1;
                }
                vals
            }
            _ => return Err(bad(format!("{segment:?} is not start:stop:step"))),
        };
        for v in values {
            if !(0.0..1.0).contains(&v) {
                return Err(bad(format!("value {v} outside [0, 1)")));
            }
            if !out.iter().any(|&o| (o - v).abs() <= GRID_TOLERANCE) {
                out.push(v);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// One `(policy, alpha, seed)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub policy: Policy,
    pub alpha: f64,
    pub seed: u64,
    pub kept: usize,
    pub remaining_share: f64,
    pub accuracy: Option<f64>,
}

/// Rows sorted by `(policy, alpha, seed)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub grid: Vec<f64>,
    pub policies: Vec<Policy>,
    pub seeds: Vec<u64>,
    pub evaluate: bool,
    pub exact_threshold: usize,
    pub support_length: usize,
    pub share_mode: ShareMode,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid: parse_grid(DEFAULT_GRID).expect("default grid parses"),
            policies: Policy::ALL.to_vec(),
            seeds: (0..10).collect(),
            evaluate: false,
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
            support_length: DEFAULT_SUPPORT_LENGTH,
            share_mode: ShareMode::Discriminability,
        }
    }
}

/// Runs every cell of the grid. `alpha = 0` is always included.
pub fn run_sweep(
    data: &DatasetMatrix,
    labels: Option<&[u32]>,
    config: &SweepConfig,
) -> Result<SweepResult> {
    let scores = score_features_auto(data, config.exact_threshold, config.support_length)?;
    run_sweep_with_scores(data, &scores, labels, config)
}

/// As [`run_sweep`], reusing precomputed scores.
pub fn run_sweep_with_scores(
    data: &DatasetMatrix,
    scores: &[FeatureScore],
    labels: Option<&[u32]>,
    config: &SweepConfig,
) -> Result<SweepResult> {
    if config.policies.is_empty() {
        return Err(Error::InvalidArgument("no policies".into()));
    }
    if config.seeds.is_empty() {
        return Err(Error::InvalidArgument("no seeds".into()));
    }
    let labels = match (config.evaluate, labels) {
        (true, None) => {
            return Err(Error::Labels(
                "evaluation requested but no labels given".into(),
            ))
        }
        (true, Some(l)) if l.len() != data.rows() => {
            return Err(Error::Labels(format!(
                "{} labels for {} rows",
                l.len(),
                data.rows()
            )))
        }
        (true, l) => l,
        (false, _) => None,
    };

    let mut grid = config.grid.clone();
    for &a in &grid {
        if !(0.0..1.0).contains(&a) {
            return Err(Error::FractionOutOfRange(a));
        }
    }
    if !grid.contains(&0.0) {
        grid.push(0.0);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut policies = config.policies.clone();
    policies.sort();
    policies.dedup();
    let mut seeds = config.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();

    let cells: Vec<(Policy, f64, u64)> = policies
        .iter()
        .flat_map(|&p| {
            let seeds = &seeds;
            grid.iter()
                .flat_map(move |&a| seeds.iter().map(move |&s| (p, a, s)))
        })
        .collect();

    let mut rows = cells
        .into_par_iter()
        .map(|(policy, alpha, seed)| {
            let plan = plan_selection(scores, policy, alpha, seed)?;
            let remaining_share = remaining_share_with(scores, &plan, config.share_mode)?;
            let accuracy = match labels {
                Some(labels) => Some(nearest_centroid_accuracy(
                    &apply_selection(data, &plan)?,
                    labels,
                )?),
                None => None,
            };
            Ok(SweepRow {
                policy,
                alpha,
                seed,
                kept: plan.kept.len(),
                remaining_share,
                accuracy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        a.policy
            .cmp(&b.policy)
            .then(a.alpha.total_cmp(&b.alpha))
            .then(a.seed.cmp(&b.seed))
    });
    Ok(SweepResult { rows })
}

/// Accuracy of a nearest-centroid classifier fit on even rows and scored on
/// odd rows. Distance ties go to the smaller label.
pub fn nearest_centroid_accuracy(data: &DatasetMatrix, labels: &[u32]) -> Result<f64> {
    if labels.len() != data.rows() {
        return Err(Error::Labels(format!(
            "{} labels for {} rows",
            labels.len(),
            data.rows()
        )));
    }
    if data.rows() < 2 {
        return Err(Error::TooFewRows(data.rows()));
    }
    let d = data.cols();
    let mut classes: Vec<u32> = (0..data.rows()).step_by(2).map(|i| labels[i]).collect();
    classes.sort_unstable();
    classes.dedup();
    let mut sums = vec![vec![0.0_f64; d]; classes.len()];
    let mut counts = vec![0usize; classes.len()];
    for i in (0..data.rows()).step_by(2) {
        let c = classes.binary_search(&labels[i]).expect("train class");
        counts[c] += 1;
        for (acc, v) in sums[c].iter_mut().zip(data.row(i)) {
            *acc += v;
        }
    }
    let centroids: Vec<Vec<f64>> = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &c)| s.into_iter().map(|v| v / c as f64).collect())
        .collect();

    let mut correct = 0usize;
    let mut total = 0usize;
    for i in (1..data.rows()).step_by(2) {
        let row = data.row(i);
        let mut best = (f64::INFINITY, 0usize);
        for (c, centroid) in centroids.iter().enumerate() {
            let dist: f64 = row
                .iter()
                .zip(centroid)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if dist.partial_cmp(&best.0) == Some(Ordering::Less) {
                best = (dist, c);
            }
        }
        if classes[best.1] == labels[i] {
            correct += 1;
        }
        total += 1;
    }
    Ok(correct as f64 / total as f64)
}

/// Splits off a column of non-negative integer class labels.
pub fn split_label_column(
    data: &DatasetMatrix,
    column: usize,
) -> Result<(DatasetMatrix, Vec<u32>)> {
    if data.cols() < 2 {
        return Err(Error::Labels(
            "need a label column and at least one feature".into(),
        ));
    }
    let raw = data.column(column)?;
    let labels = raw
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u32)
            } else {
                Err(Error::Labels(format!("row {i}: {v} is not a class label")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let keep: Vec<usize> = (0..data.cols()).filter(|&j| j != column).collect();
    Ok((data.select_columns(&keep)?, labels))
}

/// Separation between the two class centers of a signal column.
pub const SIGNAL_SEPARATION: f64 = 4.0;
/// Spread of signal columns around their class center.
pub const SIGNAL_SPREAD: f64 = 1.0;
/// Spread of the near-constant noise columns.
pub const NOISE_SPREAD: f64 = 0.01;

/// Labeled two-class data: `d_signal` informative columns followed by
/// `d_noise` near-constant ones.
///
/// Signal columns center on `0` or `4.0` depending on the label with unit
/// spread; noise columns ignore the label and have spread `0.01`, which gives
/// them a far higher NID. Labels alternate within each pair of rows, so both
/// halves of the even/odd split are balanced.
pub fn generate_synthetic(
    n: usize,
    d_signal: usize,
    d_noise: usize,
    seed: u64,
) -> Result<(DatasetMatrix, Vec<u32>)> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "n must be even and >= 4, got {n}"
        )));
    }
    if d_signal == 0 || d_noise == 0 {
        return Err(Error::InvalidArgument(
            "need at least one signal and one noise column".into(),
        ));
    }
    let mut rng = SplitMix64::new(seed);
    let d = d_signal + d_noise;
    let mut values = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = ((i / 2 + i) % 2) as u32;
        labels.push(label);
        let center = if label == 1 { SIGNAL_SEPARATION } else { 0.0 };
        for _ in 0..d_signal {
            values.push(center + SIGNAL_SPREAD * rng.next_gaussian_like());
        }
        for _ in 0..d_noise {
            values.push(NOISE_SPREAD * rng.next_gaussian_like());
        }
    }
    let names = (0..d_signal)
        .map(|j| format!("signal_{j}"))
        .chain((0..d_noise).map(|j| format!("noise_{j}")))
        .collect();
    Ok((DatasetMatrix::new(n, d, values)?.with_names(names)?, labels))
}
