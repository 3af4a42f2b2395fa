//! Grid partition, random pentagon sampling and cross-ratio shape matching.
//!
//! The first image is split into an N×N grid; each block with at least five
//! correspondences is sampled for random pentagons until one (or a configured
//! quota) passes the cross-ratio shape match against its counterpart in the
//! second image, or the trial budget runs out.

use crate::geometry::{cr_pair_matches, cr_signature, CrossRatioSignature, Point2};
use crate::rng;
use alloc::vec::Vec;
use rand::seq::index;

/// One matched keypoint pair with an optional matcher confidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    /// Keypoint in the first image (pixels).
    pub p1: Point2,
    /// Matched keypoint in the second image (pixels).
    pub p2: Point2,
    /// Matcher confidence in [0, 1], when the source provides one.
    pub confidence: Option<f64>,
}

impl Correspondence {
    pub fn new(p1: Point2, p2: Point2) -> Self {
        Self {
            p1,
            p2,
            confidence: None,
        }
    }

    pub fn with_confidence(p1: Point2, p2: Point2, confidence: f64) -> Self {
        assert!(
            (0.0..=1.0).contains(&confidence),
            "confidence must be in [0, 1]"
        );
        Self {
            p1,
            p2,
            confidence: Some(confidence),
        }
    }
}

/// Pentagon search configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchConfig {
    /// N of the N×N grid partition of the first image.
    pub grid_n: u32,
    /// Relative cross-ratio agreement threshold (0.05 = 5%).
    pub cr_th: f64,
    /// Trial budget per block.
    pub k_p: u32,
    /// Matched pentagons to keep per block before moving on.
    pub pentagons_per_block: u32,
    /// Minimum pairwise vertex distance in the first image (pixels).
    pub min_vertex_separation: f64,
    /// Seed for the deterministic per-block sampling streams.
    pub seed: u64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            grid_n: 3,
            cr_th: 0.05,
            k_p: 1000,
            pentagons_per_block: 1,
            min_vertex_separation: 5.0,
            seed: 0,
        }
    }
}

impl MatchConfig {
    fn validate(&self) -> Result<(), PmatchError> {
        let cr_th_valid = self.cr_th.is_finite() && self.cr_th > 0.0 && self.cr_th < 1.0;
        let sep_valid =
            self.min_vertex_separation.is_finite() && self.min_vertex_separation >= 0.0;
        if self.grid_n < 1 || self.k_p < 1 || self.pentagons_per_block < 1 || !cr_th_valid
            || !sep_valid
        {
            return Err(PmatchError::InvalidConfig);
        }
        Ok(())
    }
}

/// Five correspondences forming shape-matched pentagons in both images.
#[derive(Debug, Clone, PartialEq)]
pub struct PentagonPair {
    /// Correspondence indices, ascending.
    pub indices: [usize; 5],
    /// Signature of the pentagon in the first image.
    pub sig1: CrossRatioSignature,
    /// Signature of the matched pentagon in the second image.
    pub sig2: CrossRatioSignature,
    /// Grid block (row, col) the pentagon was sampled from.
    pub block: (u32, u32),
}

/// Per-block sampling statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockStats {
    pub row: u32,
    pub col: u32,
    /// Correspondences whose first-image point falls in this block.
    pub correspondences: usize,
    /// Candidate draws evaluated (bounded by `k_p`).
    pub draws: u32,
    /// Matched pentagons kept.
    pub found: u32,
    /// True when the block had fewer than five correspondences.
    pub skipped: bool,
}

/// Result of a pentagon search over all grid blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct PentagonMatches {
    pub pairs: Vec<PentagonPair>,
    pub blocks: Vec<BlockStats>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PmatchError {
    #[error("invalid match configuration")]
    InvalidConfig,
    /// No block produced a shape-matched pentagon within the trial budget.
    #[error("no matched pentagon found ({usable_blocks} of {total_blocks} blocks had >= 5 correspondences)")]
    NoPentagonFound {
        usable_blocks: usize,
        total_blocks: usize,
    },
}

/// Assign each correspondence index to a grid block by its first-image point.
///
/// Cells are half-open `[i·w/n, (i+1)·w/n)` with the outer edge of the last
/// cell closed; indexing is `grid[row][col]`. Points outside the frame are
/// clamped into the nearest cell.
pub fn partition(
    corrs: &[Correspondence],
    width: f64,
    height: f64,
    n: u32,
) -> Vec<Vec<Vec<usize>>> {
    let n = n.max(1) as usize;
    let mut grid = alloc::vec![alloc::vec![Vec::new(); n]; n];
    for (idx, c) in corrs.iter().enumerate() {
        let col = cell_index(c.p1.x, width, n);
        let row = cell_index(c.p1.y, height, n);
        grid[row][col].push(idx);
    }
    grid
}

#[inline]
fn cell_index(coord: f64, extent: f64, n: usize) -> usize {
    let raw = crate::mathk::floor(coord * n as f64 / extent);
    (raw.max(0.0) as usize).min(n - 1)
}

/// Shape test for one candidate pentagon pair: all five cross-ratio pairs
/// must agree within `cr_th` and the orientation patterns must be equal or
/// globally negated. Degenerate pentagons never match.
pub fn pentagon_shape_match(pts1: &[Point2; 5], pts2: &[Point2; 5], cr_th: f64) -> bool {
    match_signatures(pts1, pts2, cr_th).is_some()
}

pub(crate) fn match_signatures(
    pts1: &[Point2; 5],
    pts2: &[Point2; 5],
    cr_th: f64,
) -> Option<(CrossRatioSignature, CrossRatioSignature)> {
    let sig1 = cr_signature(pts1).ok()?;
    let sig2 = cr_signature(pts2).ok()?;
    if !sig1.signs_compatible(&sig2) {
        return None;
    }
    for i in 0..5 {
        if !cr_pair_matches(sig1.cr[i], sig2.cr[i], cr_th) {
            return None;
        }
    }
    Some((sig1, sig2))
}

/// Search every grid block for shape-matched pentagon pairs.
///
/// Deterministic: each block draws from its own stream derived from
/// `(cfg.seed, row, col)`, so results are independent of block scheduling.
/// Blocks with fewer than five correspondences are skipped and reported in
/// the block statistics.
pub fn find_matched_pentagons(
    corrs: &[Correspondence],
    width: f64,
    height: f64,
    cfg: &MatchConfig,
) -> Result<PentagonMatches, PmatchError> {
    cfg.validate()?;
    let grid = partition(corrs, width, height, cfg.grid_n);
    let min_sep_sq = cfg.min_vertex_separation * cfg.min_vertex_separation;

    let mut pairs = Vec::new();
    let mut blocks = Vec::new();
    let mut usable_blocks = 0usize;

    for (row, row_cells) in grid.iter().enumerate() {
        for (col, cell) in row_cells.iter().enumerate() {
            let mut stats = BlockStats {
                row: row as u32,
                col: col as u32,
                correspondences: cell.len(),
                draws: 0,
                found: 0,
                skipped: cell.len() < 5,
            };
            if stats.skipped {
                blocks.push(stats);
                continue;
            }
            usable_blocks += 1;

            let mut rng = rng::stream(cfg.seed, &[row as u64, col as u64]);
            while stats.draws < cfg.k_p && stats.found < cfg.pentagons_per_block {
                stats.draws += 1;
                let mut chosen: [usize; 5] = [0; 5];
                for (slot, pick) in index::sample(&mut rng, cell.len(), 5).iter().enumerate() {
                    chosen[slot] = cell[pick];
                }
                chosen.sort_unstable();

                let pts1 = chosen.map(|i| corrs[i].p1);
                if !separated(&pts1, min_sep_sq) {
                    continue;
                }
                let pts2 = chosen.map(|i| corrs[i].p2);
                if let Some((sig1, sig2)) = match_signatures(&pts1, &pts2, cfg.cr_th) {
                    stats.found += 1;
                    pairs.push(PentagonPair {
                        indices: chosen,
                        sig1,
                        sig2,
                        block: (row as u32, col as u32),
                    });
                }
            }
            blocks.push(stats);
        }
    }

    if pairs.is_empty() {
        return Err(PmatchError::NoPentagonFound {
            usable_blocks,
            total_blocks: blocks.len(),
        });
    }
    Ok(PentagonMatches { pairs, blocks })
}

fn separated(pts: &[Point2; 5], min_sep_sq: f64) -> bool {
    for i in 0..5 {
        for j in (i + 1)..5 {
            if pts[i].dist_sq(&pts[j]) < min_sep_sq {
                return false;
            }
        }
    }
    true
}
