use super::{bbox_diag_sq, GeometryError, Point2, EPS_REL};

/// Signed z-component of the 2D cross product `u × v`.
#[inline]
pub fn cross2(u: (f64, f64), v: (f64, f64)) -> f64 {
    u.0 * v.1 - u.1 * v.0
}

/// Cross-ratio of four points seen from an origin vertex.
///
/// With position vectors taken relative to `origin`, the value is
///
/// ```text
///        |a × c| · |b × d|
/// CR = ─────────────────────
///        |b × c| · |a × d|
/// ```
///
/// which is invariant under projective maps of the plane. Fails with
/// [`GeometryError::DegenerateConfiguration`] when any of the four cross
/// products falls below the scale-relative tolerance, i.e. when three of the
/// five points are (nearly) collinear.
pub fn cross_ratio(
    origin: Point2,
    a: Point2,
    b: Point2,
    c: Point2,
    d: Point2,
) -> Result<f64, GeometryError> {
    let (value, _) = cross_ratio_signed(origin, a, b, c, d)?;
    Ok(value)
}

/// Cross-ratio plus the signs of the four signed cross products
/// (a×c, b×d, b×c, a×d), each encoded as a bit (1 = positive).
pub(crate) fn cross_ratio_signed(
    origin: Point2,
    a: Point2,
    b: Point2,
    c: Point2,
    d: Point2,
) -> Result<(f64, u8), GeometryError> {
    let va = (a.x - origin.x, a.y - origin.y);
    let vb = (b.x - origin.x, b.y - origin.y);
    let vc = (c.x - origin.x, c.y - origin.y);
    let vd = (d.x - origin.x, d.y - origin.y);

    let ac = cross2(va, vc);
    let bd = cross2(vb, vd);
    let bc = cross2(vb, vc);
    let ad = cross2(va, vd);

    let eps = EPS_REL * bbox_diag_sq(&[origin, a, b, c, d]);
    if ac.abs() < eps || bd.abs() < eps || bc.abs() < eps || ad.abs() < eps {
        return Err(GeometryError::DegenerateConfiguration);
    }

    let value = (ac.abs() * bd.abs()) / (bc.abs() * ad.abs());
    let signs = (ac > 0.0) as u8
        | ((bd > 0.0) as u8) << 1
        | ((bc > 0.0) as u8) << 2
        | ((ad > 0.0) as u8) << 3;
    Ok((value, signs))
}

/// The five per-vertex cross-ratios of a pentagon.
///
/// Entry `i` takes vertex `i` as the origin and the remaining four vertices,
/// in ascending index order, as (a, b, c, d). The same fixed ordering is
/// applied in both images so that signature entries pair up across views.
///
/// `signs` additionally records the orientation (sign) of each of the four
/// signed cross products per vertex — 20 bits, vertex-major. Two matching
/// pentagons must have equal sign patterns, or globally negated ones
/// (mirrored views); this rejects vertex-order scrambles that happen to
/// produce similar cross-ratio magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossRatioSignature {
    pub cr: [f64; 5],
    pub signs: u32,
}

/// All 20 sign bits.
pub(crate) const SIGN_MASK: u32 = (1 << 20) - 1;

impl CrossRatioSignature {
    /// True when the orientation patterns are equal or globally negated.
    pub fn signs_compatible(&self, other: &CrossRatioSignature) -> bool {
        self.signs == other.signs || self.signs == other.signs ^ SIGN_MASK
    }
}

/// Compute the [`CrossRatioSignature`] of a pentagon given in matched index
/// order. Propagates [`GeometryError::DegenerateConfiguration`] from any
/// vertex; a pentagon that passes has all five cross-ratios finite and
/// strictly positive.
pub fn cr_signature(pentagon: &[Point2; 5]) -> Result<CrossRatioSignature, GeometryError> {
    let mut cr = [0.0; 5];
    let mut signs = 0u32;
    for i in 0..5 {
        let rest: [Point2; 4] = {
            let mut it = (0..5).filter(|&j| j != i).map(|j| pentagon[j]);
            [
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
            ]
        };
        let (value, s) = cross_ratio_signed(pentagon[i], rest[0], rest[1], rest[2], rest[3])?;
        cr[i] = value;
        signs |= (s as u32) << (4 * i);
    }
    Ok(CrossRatioSignature { cr, signs })
}

/// Relative cross-ratio agreement test:
/// `|cr − cr′| / |cr + cr′| ≤ cr_th`.
#[inline]
pub fn cr_pair_matches(cr: f64, cr_prime: f64, cr_th: f64) -> bool {
    (cr - cr_prime).abs() / (cr + cr_prime).abs() <= cr_th
}
