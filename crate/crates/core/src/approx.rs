//! Support-sequence bounds on `Delta` and the intrinsic dimension.
//!
//! A support sequence `s = (2 = s_1 < ... < s_l = n)` picks the subset sizes
//! at which `phi` is evaluated. Since `phi(k)` is nondecreasing in `k`, every
//! size `j` strictly between `s_i` and `s_{i+1}` satisfies
//! `phi(s_i) <= phi(j) <= phi(s_{i+1})`, so filling the gaps with the left or
//! right support value brackets the exact sum. Gaps are weighted by their
//! length, never expanded term by term.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{id_exact, window_min, IdEstimate, Method};
use crate::matrix::DatasetMatrix;

/// Default row count at or above which [`id_auto`] switches to bounds.
pub const DEFAULT_EXACT_THRESHOLD: usize = 100_000;
/// Default length of the geometric support sequence.
pub const DEFAULT_SUPPORT_LENGTH: usize = 10_000;

/// Strictly increasing subset sizes from 2 to `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSequence {
    entries: Vec<usize>,
}

impl SupportSequence {
    /// Validates a sequence for a data set of `n` rows.
    pub fn new(entries: Vec<usize>, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewRows(n));
        }
        match (entries.first(), entries.last()) {
            (Some(&2), Some(&last)) if last == n => {}
            (Some(&first), Some(&last)) => {
                return Err(Error::InvalidSupport(format!(
                    "must run from 2 to {n}, runs from {first} to {last}"
                )))
            }
            _ => return Err(Error::InvalidSupport("empty".into())),
        }
        if let Some(w) = entries.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSupport(format!(
                "not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self { entries })
    }

    /// The complete sequence `(2, 3, ..., n)`.
    pub fn complete(n: usize) -> Result<Self> {
        Self::new((2..=n).collect(), n)
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The `n` this sequence ends at.
    pub fn rows(&self) -> usize {
        *self.entries.last().expect("validated non-empty")
    }

    pub(crate) fn check_rows(&self, rows: usize) -> Result<()> {
        if self.rows() != rows {
            return Err(Error::SupportMismatch {
                last: self.rows(),
                rows,
            });
        }
        Ok(())
    }

    /// Number of sizes strictly between consecutive support points.
    pub(crate) fn gap_counts(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.windows(2).map(|w| w[1] - w[0] - 1)
    }

    /// `sum_{s_i < j < s_{i+1}} 1/j` per gap, summed ascending in `j`.
    pub(crate) fn harmonic_gap_weights(&self) -> Vec<f64> {
        self.entries
            .windows(2)
            .map(|w| {
                let mut acc = 0.0;
                for j in w[0] + 1..w[1] {
                    acc += 1.0 / j as f64;
                }
                acc
            })
            .collect()
    }
}

/// Geometric support sequence dense near `n`.
///
/// A descending geometric sequence `g_i = n * r^(i-1)`, `r = (2/n)^(1/(l-1))`
/// is reflected to `floor(n + 2 - g_i)` and deduplicated. When `n <= length`
/// the complete sequence is returned.
pub fn default_support_sequence(n: usize, length: usize) -> Result<SupportSequence> {
    if n < 2 {
        return Err(Error::TooFewRows(n));
    }
    if length < 2 {
        return Err(Error::InvalidArgument(format!(
            "support length must be at least 2, got {length}"
        )));
    }
    if n <= length {
        return SupportSequence::complete(n);
    }
    let nf = n as f64;
    let ratio = (2.0 / nf).powf(1.0 / (length - 1) as f64);
    let mut entries = Vec::with_capacity(length);
    // the endpoints are exact by construction; pin them against rounding drift
    entries.push(2);
    for i in 1..length - 1 {
        let g = nf * ratio.powi(i as i32);
        let s = (nf + 2.0 - g).floor() as usize;
        entries.push(s.clamp(2, n));
    }
    entries.push(n);
    entries.sort_unstable();
    entries.dedup();
    SupportSequence::new(entries, n)
}

/// `phi(s_i)` at every support point.
pub(crate) fn support_observable(data: &DatasetMatrix, s: &SupportSequence) -> Vec<f64> {
    let per_feature: Vec<Vec<f64>> = (0..data.cols())
        .into_par_iter()
        .map(|j| {
            let sorted = data.sorted_column(j);
            s.entries()
                .iter()
                .map(|&k| window_min(&sorted, k))
                .collect()
        })
        .collect();
    let mut phi = vec![0.0_f64; s.len()];
    for profile in &per_feature {
        for (acc, &p) in phi.iter_mut().zip(profile) {
            if p > *acc {
                *acc = p;
            }
        }
    }
    phi
}

/// Bracket `(Delta_lower, Delta_upper)` around the exact `Delta`.
pub fn delta_bounds(data: &DatasetMatrix, s: &SupportSequence) -> Result<(f64, f64)> {
    data.require_rows()?;
    s.check_rows(data.rows())?;
    let phi = support_observable(data, s);
    Ok(bracket_sum(
        &phi,
        s.gap_counts().map(|m| m as f64),
        data.rows(),
    ))
}

/// `(1/n) (sum_i v_i + sum_i w_i v_i)` and the same with `v_{i+1}` in the gaps.
pub(crate) fn bracket_sum<W: Iterator<Item = f64>>(
    support_values: &[f64],
    gap_weights: W,
    n: usize,
) -> (f64, f64) {
    let mut lower = 0.0;
    let mut upper = 0.0;
    let mut weights = gap_weights;
    for (i, &v) in support_values.iter().enumerate() {
        lower += v;
        upper += v;
        if i + 1 < support_values.len() {
            let w = weights.next().expect("one weight per gap");
            lower += w * v;
            upper += w * support_values[i + 1];
        }
    }
    (lower / n as f64, upper / n as f64)
}

/// Lower, upper and midpoint intrinsic dimension from a support sequence.
pub fn id_bounds(data: &DatasetMatrix, s: &SupportSequence) -> Result<IdEstimate> {
    let (lower, upper) = delta_bounds(data, s)?;
    Ok(IdEstimate::from_delta_bounds(
        Method::SupportSequence,
        lower,
        upper,
    ))
}

/// Exact below `threshold` rows, support-sequence bounds at or above it.
pub fn id_auto(data: &DatasetMatrix, threshold: usize, length: usize) -> Result<IdEstimate> {
    data.require_rows()?;
    if data.rows() < threshold {
        id_exact(data)
    } else {
        let s = default_support_sequence(data.rows(), length)?;
        id_bounds(data, &s)
    }
}
