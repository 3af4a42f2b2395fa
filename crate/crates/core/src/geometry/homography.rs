use super::{GeometryError, Point2};
use crate::mathk;

/// A 3×3 planar projective transform, stored row-major.
///
/// The representation is canonical: Frobenius norm 1, with the sign fixed so
/// that `h[8]` (the bottom-right entry) is positive — or, when that entry is
/// zero, the first nonzero entry of the last row is. The matrix is guaranteed
/// invertible (|det| > 1e-12 after normalization).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    h: [f64; 9],
}

/// Determinant threshold below which a normalized matrix counts as singular.
const DET_EPS: f64 = 1e-12;

/// Homogeneous scale threshold for the line at infinity.
const W_EPS: f64 = 1e-12;

impl Homography {
    /// Build a homography from row-major entries, canonicalizing scale and
    /// sign. Fails on non-finite entries and on singular matrices.
    pub fn new(h: [f64; 9]) -> Result<Self, GeometryError> {
        if h.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let h = canonicalize(h).ok_or(GeometryError::SingularMatrix)?;
        if det3(&h).abs() <= DET_EPS {
            return Err(GeometryError::SingularMatrix);
        }
        Ok(Self { h })
    }

    pub fn identity() -> Self {
        Self {
            h: canonicalize([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap(),
        }
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self::new([1.0, 0.0, tx, 0.0, 1.0, ty, 0.0, 0.0, 1.0]).unwrap()
    }

    pub fn scaling(sx: f64, sy: f64) -> Self {
        Self::new([sx, 0.0, 0.0, 0.0, sy, 0.0, 0.0, 0.0, 1.0]).unwrap()
    }

    /// Row-major entries.
    pub fn as_array(&self) -> &[f64; 9] {
        &self.h
    }

    pub fn det(&self) -> f64 {
        det3(&self.h)
    }

    /// Apply the homogeneous map `(x, y, 1) → H·(x, y, 1)` and dehomogenize.
    pub fn project(&self, p: Point2) -> Result<Point2, GeometryError> {
        let h = &self.h;
        let w = h[6] * p.x + h[7] * p.y + h[8];
        if w.abs() < W_EPS {
            return Err(GeometryError::PointAtInfinity);
        }
        let x = (h[0] * p.x + h[1] * p.y + h[2]) / w;
        let y = (h[3] * p.x + h[4] * p.y + h[5]) / w;
        if !(x.is_finite() && y.is_finite()) {
            return Err(GeometryError::PointAtInfinity);
        }
        Ok(Point2 { x, y })
    }

    /// Forward transfer error `‖H·p1 − p2‖₂`; infinite if p1 maps to infinity.
    pub fn transfer_error(&self, p1: Point2, p2: Point2) -> f64 {
        match self.project(p1) {
            Ok(q) => q.dist(&p2),
            Err(_) => f64::INFINITY,
        }
    }

    /// Squared forward transfer error; the cheap form for threshold tests.
    pub fn transfer_error_sq(&self, p1: Point2, p2: Point2) -> f64 {
        match self.project(p1) {
            Ok(q) => q.dist_sq(&p2),
            Err(_) => f64::INFINITY,
        }
    }

    /// Inverse map (the invertibility invariant makes this total).
    pub fn inverse(&self) -> Homography {
        let h = &self.h;
        let inv = [
            h[4] * h[8] - h[5] * h[7],
            h[2] * h[7] - h[1] * h[8],
            h[1] * h[5] - h[2] * h[4],
            h[5] * h[6] - h[3] * h[8],
            h[0] * h[8] - h[2] * h[6],
            h[2] * h[3] - h[0] * h[5],
            h[3] * h[7] - h[4] * h[6],
            h[1] * h[6] - h[0] * h[7],
            h[0] * h[4] - h[1] * h[3],
        ];
        // The adjugate of an invertible matrix is invertible and has no zero
        // row, so canonicalization cannot fail; skip the determinant
        // re-check, which would reject near-singular (but valid) inputs.
        let h = canonicalize(inv).expect("adjugate of invertible matrix is nonzero");
        Homography { h }
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Homography) -> Result<Homography, GeometryError> {
        let a = &self.h;
        let b = &other.h;
        let mut m = [0.0; 9];
        for r in 0..3 {
            for c in 0..3 {
                m[3 * r + c] =
                    a[3 * r] * b[c] + a[3 * r + 1] * b[3 + c] + a[3 * r + 2] * b[6 + c];
            }
        }
        Homography::new(m)
    }
}

/// Scale to unit Frobenius norm and fix the sign. Returns `None` when the
/// matrix is all zeros (or the last row is zero with a zero corner — such
/// matrices are singular and rejected anyway).
///
/// Idempotent bit-for-bit: matrices already unit-norm (within 1e-12) with the
/// correct sign are returned unchanged.
fn canonicalize(h: [f64; 9]) -> Option<[f64; 9]> {
    let norm = mathk::sqrt(h.iter().map(|v| v * v).sum::<f64>());
    if norm == 0.0 {
        return None;
    }
    let sign_entry = if h[8] != 0.0 {
        h[8]
    } else if h[6] != 0.0 {
        h[6]
    } else if h[7] != 0.0 {
        h[7]
    } else {
        return None;
    };
    let flip = sign_entry < 0.0;
    if (norm - 1.0).abs() <= 1e-12 {
        if !flip {
            return Some(h);
        }
        return Some(h.map(|v| -v));
    }
    let s = if flip { -1.0 / norm } else { 1.0 / norm };
    Some(h.map(|v| v * s))
}

fn det3(h: &[f64; 9]) -> f64 {
    h[0] * (h[4] * h[8] - h[5] * h[7]) - h[1] * (h[3] * h[8] - h[5] * h[6])
        + h[2] * (h[3] * h[7] - h[4] * h[6])
}

/// Mean displacement of the four image corners between two homographies.
///
/// Corners are `(0,0), (w,0), (w,h), (0,h)`; the error is the mean Euclidean
/// distance between their images under `h_est` and `h_gt`.
pub fn corner_error(
    h_est: &Homography,
    h_gt: &Homography,
    width: f64,
    height: f64,
) -> Result<f64, GeometryError> {
    let corners = [
        Point2 { x: 0.0, y: 0.0 },
        Point2 { x: width, y: 0.0 },
        Point2 {
            x: width,
            y: height,
        },
        Point2 {
            x: 0.0,
            y: height,
        },
    ];
    let mut total = 0.0;
    for c in corners {
        let a = h_est.project(c)?;
        let b = h_gt.project(c)?;
        total += a.dist(&b);
    }
    Ok(total / 4.0)
}
