//! Convenience wrapper running the full verification pipeline:
//! pentagon search → planar merge.

use crate::merge::{build_planar_groups, MergeConfig, MergeError, PlanarGroup};
use crate::pmatch::{
    find_matched_pentagons, BlockStats, Correspondence, MatchConfig, PentagonPair, PmatchError,
};
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineConfig {
    pub matching: MatchConfig,
    pub merging: MergeConfig,
}

impl PipelineConfig {
    /// Propagate one seed to both stages.
    pub fn seeded(seed: u64) -> Self {
        Self {
            matching: MatchConfig {
                seed,
                ..Default::default()
            },
            merging: MergeConfig {
                seed,
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub pentagons: Vec<PentagonPair>,
    pub blocks: Vec<BlockStats>,
    /// Planar groups, largest first.
    pub groups: Vec<PlanarGroup>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Pmatch(#[from] PmatchError),
    #[error(transparent)]
    Merge(#[from] MergeError),
}

pub fn run(
    corrs: &[Correspondence],
    width: f64,
    height: f64,
    cfg: &PipelineConfig,
) -> Result<PipelineOutput, PipelineError> {
    let found = find_matched_pentagons(corrs, width, height, &cfg.matching)?;
    let groups = build_planar_groups(&found.pairs, corrs, width, height, &cfg.merging)?;
    Ok(PipelineOutput {
        pentagons: found.pairs,
        blocks: found.blocks,
        groups,
    })
}
