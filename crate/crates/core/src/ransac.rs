//! Baseline RANSAC homography estimator.
//!
//! The default scoring maximizes the consensus (inlier count at the error
//! threshold) and refits the best model on its consensus set: the literal
//! accept-on-global-error rule never fires under heavy outliers, so the
//! consensus variant is what the comparisons use. `literal: true` switches
//! to the verbatim rule — accept the first minimal fit whose mean transfer
//! error over all correspondences is below the threshold, no refit.

use crate::geometry::{estimate_homography, Homography};
use crate::pmatch::Correspondence;
use crate::rng;
use alloc::vec::Vec;
use rand::seq::index;

#[derive(Debug, Clone, PartialEq)]
pub struct RansacConfig {
    /// Inlier / fitting-error threshold in pixels.
    pub error_threshold: f64,
    /// Maximum number of iterations.
    pub max_iterations: u32,
    /// Minimal sample size; 4 points determine a homography.
    pub sample_size: usize,
    pub seed: u64,
    /// Refit the accepted model on its consensus set (consensus mode only).
    pub refit: bool,
    /// Use the verbatim accept-on-global-mean-error rule.
    pub literal: bool,
}

impl Default for RansacConfig {
    fn default() -> Self {
        Self {
            error_threshold: 10.0,
            max_iterations: 1000,
            sample_size: 4,
            seed: 0,
            refit: true,
            literal: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RansacEstimate {
    pub homography: Homography,
    /// Exactly the correspondences within the threshold under the returned
    /// homography, ascending.
    pub inliers: Vec<usize>,
    /// Iterations actually executed.
    pub iterations: u32,
    /// Consensus mode: mean transfer error over the returned inliers.
    /// Literal mode: the accepted global mean error.
    pub mean_error: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RansacError {
    #[error("need at least sample_size (>= 4) correspondences")]
    InsufficientData,
    /// No iteration produced an acceptable model.
    #[error("no acceptable model within the iteration budget")]
    Failure,
}

/// Minimum consensus beyond the minimal sample itself for a model to count.
const MIN_EXTRA_INLIERS: usize = 4;

/// Estimate a homography robustly. Deterministic given `cfg.seed`: each
/// iteration draws its sample from a stream derived from `(seed, iteration)`,
/// so iterations are order-independent; the best consensus is tie-broken by
/// the lower iteration index.
pub fn ransac_homography(
    corrs: &[Correspondence],
    cfg: &RansacConfig,
) -> Result<RansacEstimate, RansacError> {
    let sample_size = cfg.sample_size.max(4);
    if corrs.len() < sample_size {
        return Err(RansacError::InsufficientData);
    }
    if cfg.literal {
        return literal_mode(corrs, cfg, sample_size);
    }

    let tol = cfg.error_threshold;
    let tol_sq = tol * tol;
    let mut best: Option<(usize, Homography)> = None;

    for iteration in 0..cfg.max_iterations {
        let Some(model) = minimal_fit(corrs, cfg.seed, iteration, sample_size) else {
            continue;
        };
        let count = corrs
            .iter()
            .filter(|c| model.transfer_error_sq(c.p1, c.p2) <= tol_sq)
            .count();
        if best.as_ref().is_none_or(|(best_count, _)| count > *best_count) {
            best = Some((count, model));
        }
    }

    let (best_count, mut model) = best.ok_or(RansacError::Failure)?;
    if best_count < sample_size + MIN_EXTRA_INLIERS {
        return Err(RansacError::Failure);
    }

    if cfg.refit {
        let consensus: Vec<_> = corrs
            .iter()
            .filter(|c| model.transfer_error(c.p1, c.p2) <= tol)
            .map(|c| (c.p1, c.p2))
            .collect();
        if let Ok(refit) = estimate_homography(&consensus) {
            model = refit;
        }
    }

    let inliers: Vec<usize> = corrs
        .iter()
        .enumerate()
        .filter(|(_, c)| model.transfer_error(c.p1, c.p2) <= tol)
        .map(|(i, _)| i)
        .collect();
    let mean_error = if inliers.is_empty() {
        f64::INFINITY
    } else {
        inliers
            .iter()
            .map(|&i| model.transfer_error(corrs[i].p1, corrs[i].p2))
            .sum::<f64>()
            / inliers.len() as f64
    };

    Ok(RansacEstimate {
        homography: model,
        inliers,
        iterations: cfg.max_iterations,
        mean_error,
    })
}

fn literal_mode(
    corrs: &[Correspondence],
    cfg: &RansacConfig,
    sample_size: usize,
) -> Result<RansacEstimate, RansacError> {
    for iteration in 0..cfg.max_iterations {
        let Some(model) = minimal_fit(corrs, cfg.seed, iteration, sample_size) else {
            continue;
        };
        let global_mean = corrs
            .iter()
            .map(|c| model.transfer_error(c.p1, c.p2))
            .sum::<f64>()
            / corrs.len() as f64;
        if global_mean < cfg.error_threshold {
            let inliers: Vec<usize> = corrs
                .iter()
                .enumerate()
                .filter(|(_, c)| model.transfer_error(c.p1, c.p2) <= cfg.error_threshold)
                .map(|(i, _)| i)
                .collect();
            return Ok(RansacEstimate {
                homography: model,
                inliers,
                iterations: iteration + 1,
                mean_error: global_mean,
            });
        }
    }
    Err(RansacError::Failure)
}

fn minimal_fit(
    corrs: &[Correspondence],
    seed: u64,
    iteration: u32,
    sample_size: usize,
) -> Option<Homography> {
    let mut rng = rng::stream(seed, &[0xa5a, iteration as u64]);
    let picks = index::sample(&mut rng, corrs.len(), sample_size);
    let sample: Vec<_> = picks.iter().map(|i| (corrs[i].p1, corrs[i].p2)).collect();
    estimate_homography(&sample).ok()
}
