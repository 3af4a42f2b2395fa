//! Correspondence verification and homography estimation from randomly
//! sampled pentagons.
//!
//! Given an initial set of keypoint correspondences between two images of a
//! (piecewise) planar scene, this crate verifies them geometrically: pentagons
//! are sampled per grid block of the first image, their cross-ratio signatures
//! are compared across views, shape-matched pentagons are merged into coplanar
//! groups, one homography is fitted per group, and every correspondence is
//! finally labeled inlier or outlier against the fitted constraints. A
//! classical consensus RANSAC estimator, a synthetic scene generator and a
//! recall-AUC metric are included for benchmarking.
//!
//! The crate is `no_std`-compatible (requires `alloc`); enable the `libm`
//! feature when building without `std`.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("pmatch-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod classify;
pub mod eval;
pub mod geometry;
pub mod merge;
mod mathk;
pub mod pipeline;
pub mod pmatch;
pub mod ransac;
pub mod rng;
pub mod synth;

pub use classify::{
    classify, four_way, ErrorMetric, FourWayCategory, FourWayLabel, FourWaySummary, MatchLabel,
};
pub use eval::{auc, auc_at, EvalError};
pub use geometry::{
    convex_hull_area, corner_error, cr_pair_matches, cr_signature, cross2, cross_ratio,
    estimate_homography, CrossRatioSignature, GeometryError, Homography, Point2,
};
pub use merge::{build_planar_groups, cross_merge_test, MergeConfig, MergeError, PlanarGroup};
pub use pmatch::{
    find_matched_pentagons, partition, pentagon_shape_match, BlockStats, Correspondence,
    MatchConfig, PentagonMatches, PentagonPair, PmatchError,
};
pub use ransac::{ransac_homography, RansacConfig, RansacError, RansacEstimate};
pub use synth::{synth_scene, PlantedLabel, SyntheticScene, SyntheticSceneConfig};
