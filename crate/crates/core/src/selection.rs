//! Discarding features by NID rank.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DatasetMatrix;
use crate::rng::sample_indices;
use crate::scores::{rank_ascending, FeatureScore};

/// Which features go first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Highest NID first.
    Top,
    /// Lowest NID first.
    Reversed,
    /// Seeded uniform sample.
    Random,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Top, Policy::Reversed, Policy::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Top => "top",
            Policy::Reversed => "reversed",
            Policy::Random => "random",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "top" => Ok(Policy::Top),
            "reversed" => Ok(Policy::Reversed),
            "random" => Ok(Policy::Random),
            other => Err(Error::InvalidArgument(format!("unknown policy {other:?}"))),
        }
    }
}

/// Which features a policy discards at a given fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionPlan {
    pub policy: Policy,
    pub fraction: f64,
    pub seed: u64,
    pub discarded: Vec<usize>,
    pub kept: Vec<usize>,
}

impl SelectionPlan {
    /// Total feature count the plan was made for.
    pub fn cols(&self) -> usize {
        self.discarded.len() + self.kept.len()
    }

    /// Checks that `kept` and `discarded` partition `0..cols` with `kept`
    /// non-empty.
    pub fn validate(&self, cols: usize) -> Result<()> {
        if self.kept.is_empty() {
            return Err(Error::InvalidPlan("no kept features".into()));
        }
        let mut seen = vec![false; cols];
        for &j in self.kept.iter().chain(&self.discarded) {
            if j >= cols {
                return Err(Error::InvalidPlan(format!(
                    "index {j} out of range for {cols} columns"
                )));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidPlan(format!("index {j} listed twice")));
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPlan(format!("index {missing} not assigned")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Number of features discarded at `fraction` of `cols`.
///
/// `floor(fraction * cols)`, with a `1e-9` allowance so grid values like
/// `0.29` on 100 features discard 29 rather than 28.
pub fn discard_count(fraction: f64, cols: usize) -> Result<usize> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::FractionOutOfRange(fraction));
    }
    let count = ((fraction * cols as f64) + 1e-9).floor() as usize;
    let count = count.min(cols);
    if count >= cols {
        return Err(Error::NothingKept {
            discard: count,
            cols,
        });
    }
    Ok(count)
}

/// Plans which features to discard.
pub fn plan_selection(
    scores: &[FeatureScore],
    policy: Policy,
    fraction: f64,
    seed: u64,
) -> Result<SelectionPlan> {
    let cols = scores.len();
    if cols == 0 {
        return Err(Error::InvalidArgument("no feature scores".into()));
    }
    let count = discard_count(fraction, cols)?;
    let mut discarded = match policy {
        Policy::Top => rank_descending(scores).into_iter().take(count).collect(),
        Policy::Reversed => rank_ascending(scores).into_iter().take(count).collect(),
        Policy::Random => {
            let mut features: Vec<usize> = scores.iter().map(|s| s.feature).collect();
            features.sort_unstable();
            sample_indices(cols, count, seed)
                .into_iter()
                .map(|i| features[i])
                .collect::<Vec<_>>()
        }
    };
    discarded.sort_unstable();
    let mut kept: Vec<usize> = scores
        .iter()
        .map(|s| s.feature)
        .filter(|j| discarded.binary_search(j).is_err())
        .collect();
    kept.sort_unstable();
    let plan = SelectionPlan {
        policy,
        fraction,
        seed,
        discarded,
        kept,
    };
    plan.validate(cols)?;
    Ok(plan)
}

/// Descending NID with ties broken by ascending index.
fn rank_descending(scores: &[FeatureScore]) -> Vec<usize> {
    let mut order: Vec<&FeatureScore> = scores.iter().collect();
    order.sort_by(|a, b| b.nid.total_cmp(&a.nid).then(a.feature.cmp(&b.feature)));
    order.into_iter().map(|s| s.feature).collect()
}

/// The reduced matrix: kept columns in their original relative order.
pub fn apply_selection(data: &DatasetMatrix, plan: &SelectionPlan) -> Result<DatasetMatrix> {
    if plan.cols() != data.cols() {
        return Err(Error::InvalidPlan(format!(
            "plan covers {} features, matrix has {}",
            plan.cols(),
            data.cols()
        )));
    }
    plan.validate(data.cols())?;
    data.select_columns(&plan.kept)
}

/// Quantity summed by [`remaining_share`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShareMode {
    /// Normalized discriminability `Delta_f`.
    #[default]
    Discriminability,
    /// Finite NID values; infinite ones are skipped.
    Nid,
}

/// Share of the total retained by the kept features.
pub fn remaining_share(scores: &[FeatureScore], plan: &SelectionPlan) -> Result<f64> {
    remaining_share_with(scores, plan, ShareMode::Discriminability)
}

pub fn remaining_share_with(
    scores: &[FeatureScore],
    plan: &SelectionPlan,
    mode: ShareMode,
) -> Result<f64> {
    plan.validate(scores.len())?;
    let mut ordered: Vec<&FeatureScore> = scores.iter().collect();
    ordered.sort_by_key(|s| s.feature);
    let value = |s: &FeatureScore| match mode {
        ShareMode::Discriminability => s.delta_norm,
        ShareMode::Nid => s.nid.finite().unwrap_or(0.0),
    };
    let mut total = 0.0;
    let mut kept = 0.0;
    for s in ordered {
        let v = value(s);
        total += v;
        if plan.kept.binary_search(&s.feature).is_ok() {
            kept += v;
        }
    }
    if total <= 0.0 {
        return Err(Error::ZeroDiscriminability);
    }
    Ok(kept / total)
}
