//! Exact concentration-based intrinsic dimension.
//!
//! For a feature `f` and subset size `k`, the partial diameter
//! `phi(k, f)` is the smallest spread `max |f(x) - f(y)|` over all `k`-point
//! subsets. On the sorted feature values `v` it reduces to the narrowest
//! window of `k` consecutive values:
//!
//! ```text
//! phi(k, f) = min_i (v[i + k - 1] - v[i])
//! ```
//!
//! The observable diameter at size `k` is `phi(k) = max_f phi(k, f)`, and
//!
//! ```text
//! Delta = (1/n) * sum_{k=2..n} phi(k)        ID = 1 / Delta^2
//! ```
//!
//! Computing every `phi(k, f)` costs `O(n^2)` per feature after sorting.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::DatasetMatrix;

/// `phi(k, f)` for `k = 2..=n` of a single feature.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiProfile {
    pub feature: usize,
    /// Entry `k - 2` holds `phi(k, f)`.
    pub phi: Vec<f64>,
}

impl PhiProfile {
    /// `phi(k, f)`, for `2 <= k <= n`.
    pub fn at(&self, k: usize) -> f64 {
        self.phi[k - 2]
    }
}

/// Which computation produced an [`IdEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    SupportSequence,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::SupportSequence => "support-sequence",
        }
    }
}

/// The intrinsic dimension itself: a finite bracket, or infinite when every
/// feature is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dimension {
    Finite { lower: f64, mid: f64, upper: f64 },
    Infinite,
}

/// Result of an exact or support-sequence ID computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdEstimate {
    pub method: Method,
    pub delta_lower: f64,
    pub delta_upper: f64,
    pub dimension: Dimension,
}

impl IdEstimate {
    pub(crate) fn from_delta_bounds(method: Method, delta_lower: f64, delta_upper: f64) -> Self {
        let dimension = if delta_upper == 0.0 || delta_lower == 0.0 {
            Dimension::Infinite
        } else {
            let lower = 1.0 / (delta_upper * delta_upper);
            let upper = 1.0 / (delta_lower * delta_lower);
            let mid = if method == Method::Exact {
                lower
            } else {
                (upper + lower) / 2.0
            };
            Dimension::Finite { lower, mid, upper }
        };
        Self {
            method,
            delta_lower,
            delta_upper,
            dimension,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.dimension, Dimension::Infinite)
    }

    pub fn id_lower(&self) -> Option<f64> {
        match self.dimension {
            Dimension::Finite { lower, .. } => Some(lower),
            Dimension::Infinite => None,
        }
    }

    pub fn id_mid(&self) -> Option<f64> {
        match self.dimension {
            Dimension::Finite { mid, .. } => Some(mid),
            Dimension::Infinite => None,
        }
    }

    pub fn id_upper(&self) -> Option<f64> {
        match self.dimension {
            Dimension::Finite { upper, .. } => Some(upper),
            Dimension::Infinite => None,
        }
    }
}

/// Narrowest spread of `k` consecutive entries of an ascending slice.
#[inline]
pub(crate) fn window_min(sorted: &[f64], k: usize) -> f64 {
    debug_assert!(k >= 2 && k <= sorted.len());
    let mut best = f64::INFINITY;
    for (hi, lo) in sorted[k - 1..].iter().zip(sorted) {
        let d = hi - lo;
        if d < best {
            best = d;
        }
    }
    best
}

/// Every `phi(k, f)` for `k = 2..=n` from ascending values.
pub(crate) fn sorted_profile(sorted: &[f64]) -> Vec<f64> {
    (2..=sorted.len()).map(|k| window_min(sorted, k)).collect()
}

/// Partial diameters of one feature for every subset size.
pub fn phi_profile(data: &DatasetMatrix, feature: usize) -> Result<PhiProfile> {
    if feature >= data.cols() {
        return Err(Error::FeatureOutOfRange {
            index: feature,
            cols: data.cols(),
        });
    }
    data.require_rows()?;
    Ok(PhiProfile {
        feature,
        phi: sorted_profile(&data.sorted_column(feature)),
    })
}

/// All feature profiles, in ascending feature order.
pub(crate) fn all_profiles(data: &DatasetMatrix) -> Vec<Vec<f64>> {
    (0..data.cols())
        .into_par_iter()
        .map(|j| sorted_profile(&data.sorted_column(j)))
        .collect()
}

/// Observable diameters `phi(k)` for `k = 2..=n`.
pub fn observable_diameters(data: &DatasetMatrix) -> Result<Vec<f64>> {
    data.require_rows()?;
    let profiles = all_profiles(data);
    let mut phi = vec![0.0_f64; data.rows() - 1];
    // ascending feature index
    for profile in &profiles {
        for (acc, &p) in phi.iter_mut().zip(profile) {
            if p > *acc {
                *acc = p;
            }
        }
    }
    Ok(phi)
}

/// Averaged observable diameter `Delta(D)`.
pub fn delta_exact(data: &DatasetMatrix) -> Result<f64> {
    let phi = observable_diameters(data)?;
    let mut sum = 0.0;
    for p in &phi {
        sum += p;
    }
    Ok(sum / data.rows() as f64)
}

/// Exact intrinsic dimension `1 / Delta^2`.
pub fn id_exact(data: &DatasetMatrix) -> Result<IdEstimate> {
    let delta = delta_exact(data)?;
    Ok(IdEstimate::from_delta_bounds(Method::Exact, delta, delta))
}
