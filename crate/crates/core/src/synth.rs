//! Synthetic correspondence scenes with known ground truth.
//!
//! Scenes mirror the planar-dataset construction: a random homography per
//! plane (a bounded perturbation of the identity), inliers generated by
//! projecting uniform first-image points through it (plus optional Gaussian
//! noise), and outliers paired with uniform scatter in the second image.
//! Everything is a pure function of the configuration, including its seed.

use crate::geometry::{corner_error, Homography, Point2};
use crate::mathk;
use crate::pmatch::Correspondence;
use crate::rng;
use alloc::vec::Vec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSceneConfig {
    pub width: f64,
    pub height: f64,
    pub n_inliers: usize,
    pub n_outliers: usize,
    /// Standard deviation of the Gaussian noise added to inlier positions in
    /// the second image (pixels).
    pub noise_sigma: f64,
    /// 1 or 2. Two-plane scenes split the first image at `width / 2`.
    pub n_planes: u8,
    /// Scale in [0, 1] for the identity perturbation: at 1 the homography
    /// draws rotation up to ±30°, anisotropic scale in [0.7, 1.4],
    /// perspective terms up to ±1e-3 and translation up to ±20% of the
    /// frame. At 0 the homography is exactly the identity.
    pub homography_magnitude: f64,
    pub seed: u64,
}

impl Default for SyntheticSceneConfig {
    fn default() -> Self {
        Self {
            width: 640.0,
            height: 480.0,
            n_inliers: 200,
            n_outliers: 0,
            noise_sigma: 0.0,
            n_planes: 1,
            homography_magnitude: 1.0,
            seed: 0,
        }
    }
}

/// Ground-truth label carried by each generated correspondence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantedLabel {
    Inlier { plane: usize },
    Outlier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene {
    /// Inliers first (indices `0..n_inliers`), then outliers.
    pub correspondences: Vec<Correspondence>,
    /// One ground-truth homography per plane.
    pub homographies: Vec<Homography>,
    /// Label per correspondence, aligned with `correspondences`.
    pub labels: Vec<PlantedLabel>,
}

/// Minimum corner discrepancy enforced between the two planes of a two-plane
/// scene (whenever `homography_magnitude > 0`), so the planes are actually
/// distinguishable.
pub const TWO_PLANE_MIN_SEPARATION: f64 = 50.0;

/// Generate a scene. Deterministic: identical configurations (including the
/// seed) produce identical scenes bit for bit.
pub fn synth_scene(cfg: &SyntheticSceneConfig) -> SyntheticScene {
    assert!(cfg.n_planes == 1 || cfg.n_planes == 2, "n_planes must be 1 or 2");
    assert!(cfg.noise_sigma >= 0.0 && cfg.width > 0.0 && cfg.height > 0.0);

    let mut rng = rng::stream(cfg.seed, &[0x5ce]);

    let mut homographies = Vec::with_capacity(cfg.n_planes as usize);
    homographies.push(random_homography(&mut rng, cfg));
    if cfg.n_planes == 2 {
        let mut second = random_homography(&mut rng, cfg);
        if cfg.homography_magnitude > 0.0 {
            // Redraw until the planes are separated; bounded so magnitude
            // settings that cannot separate still terminate.
            for _ in 0..100 {
                let sep = corner_error(&second, &homographies[0], cfg.width, cfg.height)
                    .unwrap_or(f64::INFINITY);
                if sep >= TWO_PLANE_MIN_SEPARATION {
                    break;
                }
                second = random_homography(&mut rng, cfg);
            }
        }
        homographies.push(second);
    }

    let mut correspondences = Vec::with_capacity(cfg.n_inliers + cfg.n_outliers);
    let mut labels = Vec::with_capacity(cfg.n_inliers + cfg.n_outliers);

    let mut made = 0usize;
    while made < cfg.n_inliers {
        let plane = if cfg.n_planes == 1 { 0 } else { made % 2 };
        let (x_lo, x_hi) = if cfg.n_planes == 1 {
            (0.0, cfg.width)
        } else if plane == 0 {
            (0.0, cfg.width / 2.0)
        } else {
            (cfg.width / 2.0, cfg.width)
        };
        let p1 = Point2::new(rng.random_range(x_lo..x_hi), rng.random_range(0.0..cfg.height));
        let Ok(projected) = homographies[plane].project(p1) else {
            continue; // cannot happen for the bounded perturbations; retry
        };
        let (nx, ny) = if cfg.noise_sigma > 0.0 {
            (
                gaussian(&mut rng) * cfg.noise_sigma,
                gaussian(&mut rng) * cfg.noise_sigma,
            )
        } else {
            (0.0, 0.0)
        };
        let p2 = Point2::new(projected.x + nx, projected.y + ny);
        correspondences.push(Correspondence::new(p1, p2));
        labels.push(PlantedLabel::Inlier { plane });
        made += 1;
    }

    for _ in 0..cfg.n_outliers {
        let p1 = Point2::new(
            rng.random_range(0.0..cfg.width),
            rng.random_range(0.0..cfg.height),
        );
        let p2 = Point2::new(
            rng.random_range(0.0..cfg.width),
            rng.random_range(0.0..cfg.height),
        );
        correspondences.push(Correspondence::new(p1, p2));
        labels.push(PlantedLabel::Outlier);
    }

    SyntheticScene {
        correspondences,
        homographies,
        labels,
    }
}

/// Identity perturbed about the frame center; exactly the identity at
/// magnitude 0 (the generator stream still advances identically).
fn random_homography(rng: &mut ChaCha8Rng, cfg: &SyntheticSceneConfig) -> Homography {
    let m = cfg.homography_magnitude;
    let max_angle = core::f64::consts::FRAC_PI_6; // ±30°
    let angle = m * rng.random_range(-max_angle..max_angle);
    let sx = 1.0 + m * rng.random_range(-0.3..0.4);
    let sy = 1.0 + m * rng.random_range(-0.3..0.4);
    let g = m * rng.random_range(-1e-3..1e-3);
    let h = m * rng.random_range(-1e-3..1e-3);
    let tx = m * rng.random_range(-0.2..0.2) * cfg.width;
    let ty = m * rng.random_range(-0.2..0.2) * cfg.height;

    let (cos_a, sin_a) = (mathk::cos(angle), mathk::sin(angle));
    let (a, b) = (cos_a * sx, -sin_a * sy);
    let (c, d) = (sin_a * sx, cos_a * sy);

    // Conjugate about the frame center so rotation and perspective act on
    // the visible region rather than the origin corner:
    // H = T(center) · [a b tx; c d ty; g h 1] · T(−center), in closed form
    // so magnitude 0 yields the identity exactly.
    let (cx, cy) = (cfg.width / 2.0, cfg.height / 2.0);
    let w_off = -g * cx - h * cy + 1.0;
    Homography::new([
        a + cx * g,
        b + cx * h,
        (-a * cx - b * cy + tx) + cx * w_off,
        c + cy * g,
        d + cy * h,
        (-c * cx - d * cy + ty) + cy * w_off,
        g,
        h,
        w_off,
    ])
    .expect("bounded perturbation is invertible")
}

/// Standard normal deviate (Box–Muller, two uniforms per call).
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random_range(0.0..1.0); // (0, 1]
    let u2: f64 = rng.random_range(0.0..1.0);
    mathk::sqrt(-2.0 * mathk::ln(u1)) * mathk::cos(core::f64::consts::TAU * u2)
}
