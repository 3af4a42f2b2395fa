//! HPatches-style sequence directory ingestion.
//!
//! A sequence directory holds one reference image and five targets related
//! by ground-truth homographies `H_1_2` … `H_1_6`. The tool never reads
//! pixels; match CSVs must be supplied per pair as `matches_1_k.csv`.

use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct SequencePair {
    /// `<sequence>/1_<k>`.
    pub id: String,
    pub target: u32,
    pub matches_csv: PathBuf,
    pub gt_homography: PathBuf,
}

#[derive(Debug, Clone)]
pub struct Sequence {
    pub name: String,
    pub pairs: Vec<SequencePair>,
}

#[derive(Debug, Clone, Default)]
pub struct Discovery {
    pub sequences: Vec<Sequence>,
    /// Directories or pairs skipped, with reasons.
    pub warnings: Vec<String>,
}

/// Scan `root` for sequence subdirectories, sorted by name. A pair needs
/// both its `H_1_k` ground-truth file and its `matches_1_k.csv`; incomplete
/// pairs and empty directories are skipped with a warning.
pub fn discover(root: &Path) -> std::io::Result<Discovery> {
    let mut out = Discovery::default();
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(root)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();

    for dir in dirs {
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut pairs = Vec::new();
        for k in 2..=6u32 {
            let gt = dir.join(format!("H_1_{k}"));
            let csv = dir.join(format!("matches_1_{k}.csv"));
            match (gt.is_file(), csv.is_file()) {
                (true, true) => pairs.push(SequencePair {
                    id: format!("{name}/1_{k}"),
                    target: k,
                    matches_csv: csv,
                    gt_homography: gt,
                }),
                (true, false) => out
                    .warnings
                    .push(format!("{name}: missing matches_1_{k}.csv, pair skipped")),
                (false, true) => out
                    .warnings
                    .push(format!("{name}: missing H_1_{k}, pair skipped")),
                (false, false) => {}
            }
        }
        if pairs.is_empty() {
            out.warnings
                .push(format!("{name}: no usable pairs, sequence skipped"));
        } else {
            out.sequences.push(Sequence { name, pairs });
        }
    }
    Ok(out)
}
