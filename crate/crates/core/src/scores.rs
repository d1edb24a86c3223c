//! Per-feature discriminability and normalized intrinsic dimensionality (NID).
//!
//! For a single feature `f`:
//!
//! ```text
//! discriminability             Delta*_f = (1/n) sum_{k=2..n} phi(k, f)
//! normalized discriminability  Delta_f  = (1/n) sum_{k=2..n} phi(k, f) / k
//! NID                          NID_f    = 1 / Delta_f^2
//! ```
//!
//! The `1/k` weight damps the influence of a single outlying value, which
//! would otherwise dominate through `phi(n, f)`. A high NID marks a feature
//! that barely separates the data points. Constant features have
//! `Delta_f = 0` and an infinite NID.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::approx::{bracket_sum, SupportSequence};
use crate::error::{Error, Result};
use crate::exact::{sorted_profile, window_min};
use crate::matrix::DatasetMatrix;

/// A normalized intrinsic dimensionality value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nid {
    Finite(f64),
    Infinite,
}

impl Nid {
    /// `1 / delta^2`, or infinite when `delta == 0`.
    pub fn from_discriminability(delta: f64) -> Self {
        if delta > 0.0 {
            Nid::Finite(1.0 / (delta * delta))
        } else {
            Nid::Infinite
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Nid::Finite(v) => Some(v),
            Nid::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Nid::Infinite)
    }

    /// As a float, with `f64::INFINITY` for the infinite case.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// Total order with infinite values last.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Nid::Finite(a), Nid::Finite(b)) => a.total_cmp(b),
            (Nid::Finite(_), Nid::Infinite) => Ordering::Less,
            (Nid::Infinite, Nid::Finite(_)) => Ordering::Greater,
            (Nid::Infinite, Nid::Infinite) => Ordering::Equal,
        }
    }
}

/// Support-sequence brackets behind an approximated [`FeatureScore`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreBounds {
    pub delta_star_lower: f64,
    pub delta_star_upper: f64,
    pub delta_norm_lower: f64,
    pub delta_norm_upper: f64,
    /// `1 / delta_norm_upper^2`
    pub nid_lower: Nid,
    /// `1 / delta_norm_lower^2`
    pub nid_upper: Nid,
}

/// Scores of one feature.
///
/// For approximated scores `nid` is the midpoint of the NID bracket,
/// `delta_norm` is `1 / sqrt(nid)` and `delta_star` is the midpoint of its
/// bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureScore {
    pub feature: usize,
    pub delta_star: f64,
    pub delta_norm: f64,
    pub nid: Nid,
    pub bounds: Option<ScoreBounds>,
}

impl FeatureScore {
    pub fn approximated(&self) -> bool {
        self.bounds.is_some()
    }
}

fn exact_score(feature: usize, sorted: &[f64]) -> FeatureScore {
    let n = sorted.len() as f64;
    let profile = sorted_profile(sorted);
    let mut star = 0.0;
    let mut norm = 0.0;
    for (i, &phi) in profile.iter().enumerate() {
        let k = (i + 2) as f64;
        star += phi;
        norm += phi / k;
    }
    let delta_norm = norm / n;
    FeatureScore {
        feature,
        delta_star: star / n,
        delta_norm,
        nid: Nid::from_discriminability(delta_norm),
        bounds: None,
    }
}

/// Exact scores for every feature, in feature order.
pub fn score_features_exact(data: &DatasetMatrix) -> Result<Vec<FeatureScore>> {
    data.require_rows()?;
    Ok((0..data.cols())
        .into_par_iter()
        .map(|j| exact_score(j, &data.sorted_column(j)))
        .collect())
}

fn approx_score(
    feature: usize,
    sorted: &[f64],
    s: &SupportSequence,
    counts: &[f64],
    harmonic: &[f64],
) -> FeatureScore {
    let n = sorted.len();
    let phi: Vec<f64> = s.entries().iter().map(|&k| window_min(sorted, k)).collect();
    let (star_lo, star_hi) = bracket_sum(&phi, counts.iter().copied(), n);

    // support terms carry their own 1/s_i weight, gaps carry sum 1/j
    let nf = n as f64;
    let mut lo = 0.0;
    let mut hi = 0.0;
    for (i, (&p, &k)) in phi.iter().zip(s.entries()).enumerate() {
        let own = p / k as f64;
        lo += own;
        hi += own;
        if i + 1 < phi.len() {
            lo += harmonic[i] * p;
            hi += harmonic[i] * phi[i + 1];
        }
    }
    let (norm_lo, norm_hi) = (lo / nf, hi / nf);

    let nid_lower = Nid::from_discriminability(norm_hi);
    let nid_upper = Nid::from_discriminability(norm_lo);
    let (nid, delta_norm) = match (nid_lower, nid_upper) {
        (Nid::Finite(a), Nid::Finite(b)) => {
            let mid = (b + a) / 2.0;
            (Nid::Finite(mid), 1.0 / mid.sqrt())
        }
        _ => (Nid::Infinite, 0.0),
    };
    FeatureScore {
        feature,
        delta_star: (star_lo + star_hi) / 2.0,
        delta_norm,
        nid,
        bounds: Some(ScoreBounds {
            delta_star_lower: star_lo,
            delta_star_upper: star_hi,
            delta_norm_lower: norm_lo,
            delta_norm_upper: norm_hi,
            nid_lower,
            nid_upper,
        }),
    }
}

/// Support-sequence brackets and midpoint NID for every feature.
pub fn score_features_approx(
    data: &DatasetMatrix,
    s: &SupportSequence,
) -> Result<Vec<FeatureScore>> {
    data.require_rows()?;
    s.check_rows(data.rows())?;
    let counts: Vec<f64> = s.gap_counts().map(|m| m as f64).collect();
    let harmonic = s.harmonic_gap_weights();
    Ok((0..data.cols())
        .into_par_iter()
        .map(|j| approx_score(j, &data.sorted_column(j), s, &counts, &harmonic))
        .collect())
}

/// Exact below `threshold` rows, approximated with the default support
/// sequence of `length` at or above it.
pub fn score_features_auto(
    data: &DatasetMatrix,
    threshold: usize,
    length: usize,
) -> Result<Vec<FeatureScore>> {
    data.require_rows()?;
    if data.rows() < threshold {
        score_features_exact(data)
    } else {
        let s = crate::approx::default_support_sequence(data.rows(), length)?;
        score_features_approx(data, &s)
    }
}

/// Feature indices by ascending NID, ties broken by ascending index.
pub fn rank_ascending(scores: &[FeatureScore]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[a]
            .nid
            .total_cmp(&scores[b].nid)
            .then(scores[a].feature.cmp(&scores[b].feature))
    });
    order.into_iter().map(|i| scores[i].feature).collect()
}

/// One feature on the ranked NID curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// 1-based position in ascending NID order.
    pub rank: usize,
    /// `rank / d`
    pub rel_rank: f64,
    pub feature: usize,
    pub nid: Nid,
    /// NID divided by the largest finite NID; 1.0 for infinite entries.
    pub rel_nid: f64,
}

/// Ranked NID values normalized by the largest one.
#[derive(Debug, Clone, PartialEq)]
pub struct NidCurve {
    pub points: Vec<CurvePoint>,
    /// Number of infinite-NID features plotted at 1.0.
    pub infinite_clamped: usize,
}

/// Sorts features by ascending NID and normalizes by the maximum.
///
/// Infinite NIDs sort last and are drawn at 1.0; finite values are divided
/// by the largest finite NID.
pub fn nid_curve(scores: &[FeatureScore]) -> Result<NidCurve> {
    if scores.is_empty() {
        return Err(Error::InvalidArgument("no feature scores".into()));
    }
    let d = scores.len();
    let by_feature: std::collections::HashMap<usize, &FeatureScore> =
        scores.iter().map(|s| (s.feature, s)).collect();
    let max_finite = scores
        .iter()
        .filter_map(|s| s.nid.finite())
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let order = rank_ascending(scores);
    let points = order
        .iter()
        .enumerate()
        .map(|(i, &feature)| {
            let nid = by_feature[&feature].nid;
            let rel_nid = match (nid, max_finite) {
                (Nid::Finite(v), Some(m)) if m > 0.0 => v / m,
                _ => 1.0,
            };
            CurvePoint {
                rank: i + 1,
                rel_rank: (i + 1) as f64 / d as f64,
                feature,
                nid,
                rel_nid,
            }
        })
        .collect();
    Ok(NidCurve {
        points,
        infinite_clamped: scores.iter().filter(|s| s.nid.is_infinite()).count(),
    })
}
