//! Shared helpers for the integration tests.

use pmatch_core::{Homography, Point2};

/// Conditioning of a pentagon's signature terms: the smallest
/// `|u × v| / (|u|·|v|)` (sine of the spanned angle) over all twenty cross
/// products entering the five cross-ratios. Small values amplify rounding,
/// so invariance tests demand a floor.
pub fn min_conditioning(pentagon: &[Point2; 5]) -> f64 {
    let mut worst = f64::INFINITY;
    for i in 0..5 {
        let rest: Vec<Point2> = (0..5).filter(|&j| j != i).map(|j| pentagon[j]).collect();
        let o = pentagon[i];
        let v = |p: Point2| (p.x - o.x, p.y - o.y);
        let (a, b, c, d) = (v(rest[0]), v(rest[1]), v(rest[2]), v(rest[3]));
        for (u, w) in [(a, c), (b, d), (b, c), (a, d)] {
            let cross = (u.0 * w.1 - u.1 * w.0).abs();
            let lens = (u.0.hypot(u.1)) * (w.0.hypot(w.1));
            worst = worst.min(cross / lens);
        }
    }
    worst
}

/// Identity perturbation parameters mirroring the synthetic scene generator,
/// but applied around the origin (tests pick frame-sized translations).
#[derive(Debug, Clone, Copy)]
pub struct PerturbationParams {
    pub angle: f64,
    pub sx: f64,
    pub sy: f64,
    pub g: f64,
    pub h: f64,
    pub tx: f64,
    pub ty: f64,
}

pub fn perturbation_homography(p: &PerturbationParams) -> Homography {
    let (c, s) = (p.angle.cos(), p.angle.sin());
    // Conjugate about the frame center (640×480) so the perspective terms
    // stay well-conditioned over the frame.
    let (cx, cy) = (320.0, 240.0);
    let (a, b) = (c * p.sx, -s * p.sy);
    let (d, e) = (s * p.sx, c * p.sy);
    let w_off = -p.g * cx - p.h * cy + 1.0;
    Homography::new([
        a + cx * p.g,
        b + cx * p.h,
        (-a * cx - b * cy + p.tx) + cx * w_off,
        d + cy * p.g,
        e + cy * p.h,
        (-d * cx - e * cy + p.ty) + cy * w_off,
        p.g,
        p.h,
        w_off,
    ])
    .expect("bounded perturbation is invertible")
}
