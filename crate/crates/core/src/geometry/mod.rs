//! Pure 2D projective geometry: cross products, cross-ratios, homographies,
//! convex hulls and corner error.
//!
//! All operations are pure functions over immutable value types and are safe
//! to call concurrently.

mod cross_ratio;
mod dlt;
mod homography;
mod hull;
mod point;

pub use cross_ratio::{cr_pair_matches, cr_signature, cross2, cross_ratio, CrossRatioSignature};
pub use dlt::estimate_homography;
pub use homography::{corner_error, Homography};
pub use hull::convex_hull_area;
pub use point::Point2;

/// Errors raised by the geometry kernel.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    /// A coordinate or matrix entry was NaN or infinite.
    #[error("non-finite coordinate")]
    NonFinite,
    /// Points are collinear or coincident beyond the scale-relative tolerance.
    #[error("degenerate point configuration")]
    DegenerateConfiguration,
    /// A homogeneous point mapped to (or too close to) the line at infinity.
    #[error("point maps to infinity")]
    PointAtInfinity,
    /// The matrix is singular (|det| below tolerance after normalization).
    #[error("singular matrix")]
    SingularMatrix,
    /// The homogeneous system has no unique null direction.
    #[error("rank-deficient system")]
    RankDeficient,
    /// Fewer points than the operation requires.
    #[error("not enough points")]
    InsufficientPoints,
}

/// Degeneracy tolerances are relative to the squared bounding-box diagonal of
/// the points involved, so behavior is resolution-independent.
pub(crate) const EPS_REL: f64 = 1e-9;

/// Squared bounding-box diagonal of a point set (degeneracy length² scale).
pub(crate) fn bbox_diag_sq(points: &[Point2]) -> f64 {
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for p in points {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let dx = max_x - min_x;
    let dy = max_y - min_y;
    dx * dx + dy * dy
}
