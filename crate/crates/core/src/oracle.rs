//! Brute-force reference implementations.
//!
//! These enumerate every subset directly and take the maximum over all
//! pairs, sharing no code with the sorted-window kernels. Hard size guards
//! keep their exponential cost bounded.

use crate::error::{Error, Result};
use crate::matrix::DatasetMatrix;
use crate::scores::{FeatureScore, Nid};

pub const MAX_PHI_POINTS: usize = 20;
pub const MAX_DELTA_ROWS: usize = 12;
pub const MAX_DELTA_COLS: usize = 6;

fn pairwise_spread(values: &[f64], mask: u32) -> f64 {
    let mut spread = 0.0_f64;
    for i in 0..values.len() {
        if mask & (1 << i) == 0 {
            continue;
        }
        for j in 0..values.len() {
            if mask & (1 << j) != 0 {
                let d = (values[i] - values[j]).abs();
                if d > spread {
                    spread = d;
                }
            }
        }
    }
    spread
}

/// `min` over all `k`-subsets of the largest pairwise difference.
pub fn brute_phi(values: &[f64], k: usize) -> Result<f64> {
    let n = values.len();
    if n > MAX_PHI_POINTS {
        return Err(Error::OracleGuard(format!(
            "{n} points exceeds the limit of {MAX_PHI_POINTS}"
        )));
    }
    if k < 2 || k > n {
        return Err(Error::OracleGuard(format!(
            "subset size {k} invalid for {n} points"
        )));
    }
    let mut best = f64::INFINITY;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize == k {
            best = best.min(pairwise_spread(values, mask));
        }
    }
    Ok(best)
}

/// `phi(k, f)` for every `k = 2..=n` in one pass over all subsets.
fn brute_profile(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut best = vec![f64::INFINITY; n + 1];
    for mask in 0u32..(1u32 << n) {
        let k = mask.count_ones() as usize;
        if k >= 2 {
            best[k] = best[k].min(pairwise_spread(values, mask));
        }
    }
    best.drain(..2);
    best
}

fn guard(data: &DatasetMatrix, max_cols: Option<usize>) -> Result<()> {
    if data.rows() < 2 {
        return Err(Error::TooFewRows(data.rows()));
    }
    if data.rows() > MAX_DELTA_ROWS {
        return Err(Error::OracleGuard(format!(
            "{} rows exceeds the limit of {MAX_DELTA_ROWS}",
            data.rows()
        )));
    }
    if let Some(max) = max_cols {
        if data.cols() > max {
            return Err(Error::OracleGuard(format!(
                "{} columns exceeds the limit of {max}",
                data.cols()
            )));
        }
    }
    Ok(())
}

/// `Delta(D)` by enumeration.
pub fn brute_delta(data: &DatasetMatrix) -> Result<f64> {
    guard(data, Some(MAX_DELTA_COLS))?;
    let profiles: Vec<Vec<f64>> = (0..data.cols())
        .map(|j| brute_profile(&data.column(j).expect("in range")))
        .collect();
    let mut sum = 0.0;
    for k in 0..data.rows() - 1 {
        sum += profiles.iter().map(|p| p[k]).fold(0.0, f64::max);
    }
    Ok(sum / data.rows() as f64)
}

/// Exact per-feature scores by enumeration.
pub fn brute_feature_scores(data: &DatasetMatrix) -> Result<Vec<FeatureScore>> {
    guard(data, None)?;
    let n = data.rows() as f64;
    Ok((0..data.cols())
        .map(|j| {
            let profile = brute_profile(&data.column(j).expect("in range"));
            let mut star = 0.0;
            let mut norm = 0.0;
            for (i, phi) in profile.iter().enumerate() {
                star += phi;
                norm += phi / (i + 2) as f64;
            }
            let delta_norm = norm / n;
            FeatureScore {
                feature: j,
                delta_star: star / n,
                delta_norm,
                nid: Nid::from_discriminability(delta_norm),
                bounds: None,
            }
        })
        .collect())
}
