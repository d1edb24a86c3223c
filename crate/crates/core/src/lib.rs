//! Concentration-based intrinsic dimension of finite data sets.
//!
//! A data set is a dense matrix whose rows are points and whose columns are
//! features. The crate computes
//!
//! * the exact intrinsic dimension from sorted sliding-window partial
//!   diameters ([`exact`]),
//! * support-sequence lower/upper bounds for large row counts ([`approx`]),
//! * per-feature normalized intrinsic dimensionality (NID) and the ranked
//!   NID curve ([`scores`]),
//! * NID-driven feature discarding and the remaining-share metric
//!   ([`selection`]), and discard sweeps over fraction grids ([`sweep`]).
//!
//! [`oracle`] holds brute-force references, [`io`] the file formats and
//! [`ontology`] the reproducibility attribute schema.
//!
//! ```
//! use geomdim::{id_exact, DatasetMatrix};
//!
//! let data = DatasetMatrix::from_columns(&[vec![0.0, 1.0, 3.0]])?;
//! let id = id_exact(&data)?;
//! assert!((id.id_mid().unwrap() - 0.5625).abs() < 1e-12);
//! # Ok::<(), geomdim::Error>(())
//! ```
//!
//! All computations are pure. Per-feature work runs on the ambient rayon
//! pool; results are reduced in ascending feature order, so output does not
//! depend on the thread count.

pub mod approx;
pub mod error;
pub mod exact;
pub mod io;
pub mod matrix;
pub mod ontology;
pub mod oracle;
pub mod rng;
pub mod scores;
pub mod selection;
pub mod sweep;

pub use approx::{default_support_sequence, delta_bounds, id_auto, id_bounds, SupportSequence};
pub use error::{Error, Result};
pub use exact::{delta_exact, id_exact, phi_profile, Dimension, IdEstimate, Method, PhiProfile};
pub use matrix::DatasetMatrix;
pub use scores::{
    nid_curve, score_features_approx, score_features_exact, FeatureScore, Nid, NidCurve,
};
pub use selection::{apply_selection, plan_selection, remaining_share, Policy, SelectionPlan};

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/intrinsic-dimension.md")]
    mod intrinsic_dimension {}
    #[doc = include_str!("../../../book/src/support-sequences.md")]
    mod support_sequences {}
    #[doc = include_str!("../../../book/src/feature-scores.md")]
    mod feature_scores {}
    #[doc = include_str!("../../../book/src/selection.md")]
    mod selection {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
    #[doc = include_str!("../../../book/src/file-formats.md")]
    mod file_formats {}
    #[doc = include_str!("../../../book/src/ontology.md")]
    mod ontology {}
}
