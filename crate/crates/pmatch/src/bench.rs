//! Benchmark orchestration: synthetic sweeps and HPatches-style datasets,
//! per-pair records, AUC aggregation and report rendering.

use crate::hpatches;
use crate::io::{self, FormatError};
use pmatch_core::pipeline::{self, PipelineConfig};
use pmatch_core::rng::derive_seed;
use pmatch_core::{
    auc, corner_error, ransac_homography, synth_scene, Correspondence, Homography, MatchConfig,
    MergeConfig, RansacConfig, SyntheticSceneConfig,
};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

/// Estimators the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pmatch,
    Ransac,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pmatch" => Ok(Method::Pmatch),
            "ransac" => Ok(Method::Ransac),
            other => Err(format!("unknown method `{other}` (expected pmatch|ransac)")),
        }
    }
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Pmatch => "pmatch",
            Method::Ransac => "ransac",
        }
    }
}

/// Synthetic sweep configuration (`--synthetic sweep.json`). All fields are
/// optional in the file; defaults reproduce the standard operating point.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub scenes: usize,
    pub seed: u64,
    pub width: f64,
    pub height: f64,
    pub n_inliers: usize,
    pub n_outliers: usize,
    pub noise_sigma: f64,
    pub n_planes: u8,
    pub homography_magnitude: f64,
    pub grid_n: u32,
    pub cr_th: f64,
    pub k_p: u32,
    pub pentagons_per_block: u32,
    pub min_vertex_separation: f64,
    pub merge_trials: u32,
    pub min_support: usize,
    pub inlier_tol: f64,
    pub refit: bool,
    pub ransac_threshold: f64,
    pub ransac_iterations: u32,
    pub thresholds: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let m = MatchConfig::default();
        let g = MergeConfig::default();
        let r = RansacConfig::default();
        Self {
            scenes: 50,
            seed: 0,
            width: 640.0,
            height: 480.0,
            n_inliers: 300,
            n_outliers: 300,
            noise_sigma: 0.5,
            n_planes: 1,
            homography_magnitude: 1.0,
            grid_n: m.grid_n,
            cr_th: m.cr_th,
            k_p: m.k_p,
            pentagons_per_block: m.pentagons_per_block,
            min_vertex_separation: m.min_vertex_separation,
            merge_trials: g.merge_trials,
            min_support: g.min_support,
            inlier_tol: g.inlier_tol,
            refit: g.refit,
            ransac_threshold: r.error_threshold,
            ransac_iterations: r.max_iterations,
            thresholds: vec![3.0, 5.0, 10.0],
        }
    }
}

impl SweepConfig {
    pub fn scene_config(&self, scene_idx: usize) -> SyntheticSceneConfig {
        SyntheticSceneConfig {
            width: self.width,
            height: self.height,
            n_inliers: self.n_inliers,
            n_outliers: self.n_outliers,
            noise_sigma: self.noise_sigma,
            n_planes: self.n_planes,
            homography_magnitude: self.homography_magnitude,
            seed: derive_seed(self.seed, &[0x5ce7e, scene_idx as u64]),
        }
    }

    pub fn pipeline_config(&self, pair_seed: u64) -> PipelineConfig {
        PipelineConfig {
            matching: MatchConfig {
                grid_n: self.grid_n,
                cr_th: self.cr_th,
                k_p: self.k_p,
                pentagons_per_block: self.pentagons_per_block,
                min_vertex_separation: self.min_vertex_separation,
                seed: pair_seed,
            },
            merging: MergeConfig {
                cr_th: self.cr_th,
                merge_trials: self.merge_trials,
                min_support: self.min_support,
                inlier_tol: self.inlier_tol,
                refit: self.refit,
                seed: pair_seed,
            },
        }
    }

    pub fn ransac_config(&self, seed: u64) -> RansacConfig {
        RansacConfig {
            error_threshold: self.ransac_threshold,
            max_iterations: self.ransac_iterations,
            seed,
            ..Default::default()
        }
    }
}

/// One method run on one image pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalRecord {
    pub pair_id: String,
    pub method: String,
    /// Repetition index (RANSAC repeats; 0 for single runs).
    pub repeat: u32,
    pub success: bool,
    /// Mean corner displacement vs. ground truth (present on success).
    pub corner_error: Option<f64>,
    pub runtime_s: f64,
    /// Convex-hull area fraction of the winning group (pmatch only).
    pub hull_area_fraction: Option<f64>,
}

impl EvalRecord {
    fn error_value(&self) -> f64 {
        match self.corner_error {
            Some(e) if self.success => e,
            _ => f64::INFINITY,
        }
    }
}

/// AUC summary of one method (or one RANSAC repeat aggregate).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    /// `single`, or `best` / `mean` / `worst` across RANSAC repeats.
    pub aggregate: String,
    pub thresholds: Vec<f64>,
    pub auc: Vec<f64>,
    pub pairs: usize,
    pub successes: usize,
    pub mean_runtime_s: f64,
}

/// Per-sequence AUC (pair ids group by their `<sequence>/` prefix). RANSAC
/// repeats enter as the best error per pair, matching the best-of-N
/// selection protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceSummary {
    pub sequence: String,
    pub method: String,
    pub thresholds: Vec<f64>,
    pub auc: Vec<f64>,
    pub pairs: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub thresholds: Vec<f64>,
    pub records: Vec<EvalRecord>,
    pub summaries: Vec<MethodSummary>,
    pub per_sequence: Vec<SequenceSummary>,
    pub warnings: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("no sequences found in dataset directory")]
    EmptyDataset,
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Hull fractions below this trigger a small-hull warning in the report.
pub const HULL_WARN_FRACTION: f64 = 0.20;

/// Run the synthetic sweep for the requested methods.
pub fn run_synthetic(sweep: &SweepConfig, methods: &[Method], repeats: u32) -> BenchReport {
    let mut records = Vec::new();
    let mut warnings = Vec::new();

    for scene_idx in 0..sweep.scenes {
        let scene_cfg = sweep.scene_config(scene_idx);
        let scene = synth_scene(&scene_cfg);
        let pair_id = format!("synthetic/{scene_idx}");
        let pair_seed = derive_seed(sweep.seed, &[0xbe7c, scene_idx as u64]);

        for &method in methods {
            match method {
                Method::Pmatch => {
                    let record = run_pmatch_pair(
                        &pair_id,
                        &scene.correspondences,
                        &scene.homographies,
                        sweep.width,
                        sweep.height,
                        &sweep.pipeline_config(pair_seed),
                        &mut warnings,
                    );
                    records.push(record);
                }
                Method::Ransac => {
                    for rep in 0..repeats.max(1) {
                        let cfg = sweep.ransac_config(derive_seed(pair_seed, &[rep as u64]));
                        records.push(run_ransac_pair(
                            &pair_id,
                            rep,
                            &scene.correspondences,
                            &scene.homographies,
                            sweep.width,
                            sweep.height,
                            &cfg,
                        ));
                    }
                }
            }
        }
    }

    summarize(records, warnings, &sweep.thresholds, methods, repeats)
}

/// Dataset benchmark configuration beyond the sweep knobs.
#[derive(Debug, Clone)]
pub struct DatasetOptions {
    pub width: f64,
    pub height: f64,
    pub min_conf: Option<f64>,
    pub seed: u64,
    pub thresholds: Vec<f64>,
}

/// Run the methods over an HPatches-style dataset directory.
pub fn run_dataset(
    root: &Path,
    opts: &DatasetOptions,
    sweep: &SweepConfig,
    methods: &[Method],
    repeats: u32,
) -> Result<BenchReport, BenchError> {
    let discovery = hpatches::discover(root)?;
    if discovery.sequences.is_empty() {
        return Err(BenchError::EmptyDataset);
    }

    let mut records = Vec::new();
    let mut warnings = discovery.warnings;

    for sequence in &discovery.sequences {
        for pair in &sequence.pairs {
            let gt = match io::read_homography_text(&pair.gt_homography) {
                Ok(h) => h,
                Err(e) => {
                    warnings.push(format!("{}: {e}, pair skipped", pair.id));
                    continue;
                }
            };
            let corrs = match io::read_correspondences(&pair.matches_csv) {
                Ok(mut corrs) => {
                    if let Some(min_conf) = opts.min_conf {
                        corrs.retain(|c| c.confidence.is_none_or(|v| v >= min_conf));
                    }
                    corrs
                }
                Err(e) => {
                    warnings.push(format!("{}: {e}, pair skipped", pair.id));
                    continue;
                }
            };
            let gts = [gt];
            let pair_seed = derive_seed(opts.seed, &[hash_str(&pair.id)]);

            for &method in methods {
                match method {
                    Method::Pmatch => {
                        records.push(run_pmatch_pair(
                            &pair.id,
                            &corrs,
                            &gts,
                            opts.width,
                            opts.height,
                            &sweep.pipeline_config(pair_seed),
                            &mut warnings,
                        ));
                    }
                    Method::Ransac => {
                        for rep in 0..repeats.max(1) {
                            let cfg = sweep.ransac_config(derive_seed(pair_seed, &[rep as u64]));
                            records.push(run_ransac_pair(
                                &pair.id,
                                rep,
                                &corrs,
                                &gts,
                                opts.width,
                                opts.height,
                                &cfg,
                            ));
                        }
                    }
                }
            }
        }
    }

    Ok(summarize(
        records,
        warnings,
        &opts.thresholds,
        methods,
        repeats,
    ))
}

fn hash_str(s: &str) -> u64 {
    // FNV-1a; stable across runs and platforms.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn run_pmatch_pair(
    pair_id: &str,
    corrs: &[Correspondence],
    gts: &[Homography],
    width: f64,
    height: f64,
    cfg: &PipelineConfig,
    warnings: &mut Vec<String>,
) -> EvalRecord {
    let start = Instant::now();
    let outcome = pipeline::run(corrs, width, height, cfg);
    let runtime_s = start.elapsed().as_secs_f64();

    match outcome {
        Ok(out) => {
            // Single ground truth: score the primary group. Multi-plane:
            // every plane must be matched by some group; score the worst.
            let error = if gts.len() == 1 {
                corner_error(&out.groups[0].homography, &gts[0], width, height)
                    .unwrap_or(f64::INFINITY)
            } else {
                gts.iter()
                    .map(|gt| {
                        out.groups
                            .iter()
                            .map(|g| {
                                corner_error(&g.homography, gt, width, height)
                                    .unwrap_or(f64::INFINITY)
                            })
                            .fold(f64::INFINITY, f64::min)
                    })
                    .fold(0.0, f64::max)
            };
            let hull = out.groups[0].hull_area_fraction;
            if hull < HULL_WARN_FRACTION {
                warnings.push(format!(
                    "{pair_id}: pentagon hull covers only {:.1}% of the image; expect degraded accuracy",
                    100.0 * hull
                ));
            }
            EvalRecord {
                pair_id: pair_id.to_string(),
                method: "pmatch".into(),
                repeat: 0,
                success: error.is_finite(),
                corner_error: error.is_finite().then_some(error),
                runtime_s,
                hull_area_fraction: Some(hull),
            }
        }
        Err(_) => EvalRecord {
            pair_id: pair_id.to_string(),
            method: "pmatch".into(),
            repeat: 0,
            success: false,
            corner_error: None,
            runtime_s,
            hull_area_fraction: None,
        },
    }
}

fn run_ransac_pair(
    pair_id: &str,
    repeat: u32,
    corrs: &[Correspondence],
    gts: &[Homography],
    width: f64,
    height: f64,
    cfg: &RansacConfig,
) -> EvalRecord {
    let start = Instant::now();
    let outcome = ransac_homography(corrs, cfg);
    let runtime_s = start.elapsed().as_secs_f64();
    match outcome {
        Ok(est) => {
            // RANSAC fits one model; score it against its best-matching
            // plane.
            let error = gts
                .iter()
                .map(|gt| {
                    corner_error(&est.homography, gt, width, height).unwrap_or(f64::INFINITY)
                })
                .fold(f64::INFINITY, f64::min);
            EvalRecord {
                pair_id: pair_id.to_string(),
                method: "ransac".into(),
                repeat,
                success: error.is_finite(),
                corner_error: error.is_finite().then_some(error),
                runtime_s,
                hull_area_fraction: None,
            }
        }
        Err(_) => EvalRecord {
            pair_id: pair_id.to_string(),
            method: "ransac".into(),
            repeat,
            success: false,
            corner_error: None,
            runtime_s,
            hull_area_fraction: None,
        },
    }
}

fn summarize(
    records: Vec<EvalRecord>,
    warnings: Vec<String>,
    thresholds: &[f64],
    methods: &[Method],
    repeats: u32,
) -> BenchReport {
    let mut summaries = Vec::new();

    for &method in methods {
        let rows: Vec<&EvalRecord> = records
            .iter()
            .filter(|r| r.method == method.name())
            .collect();
        if rows.is_empty() {
            continue;
        }
        if method == Method::Ransac && repeats > 1 {
            // Collapse per-pair repeats to best / mean / worst errors.
            let mut by_pair: std::collections::BTreeMap<&str, Vec<f64>> = Default::default();
            for r in &rows {
                by_pair.entry(&r.pair_id).or_default().push(r.error_value());
            }
            for (aggregate, pick) in [
                ("best", 0usize),
                ("mean", 1),
                ("worst", 2),
            ] {
                let errors: Vec<f64> = by_pair
                    .values()
                    .map(|errs| match pick {
                        0 => errs.iter().copied().fold(f64::INFINITY, f64::min),
                        1 => {
                            if errs.iter().any(|e| !e.is_finite()) {
                                f64::INFINITY
                            } else {
                                errs.iter().sum::<f64>() / errs.len() as f64
                            }
                        }
                        _ => errs.iter().copied().fold(0.0, f64::max),
                    })
                    .collect();
                summaries.push(make_summary(
                    method.name(),
                    aggregate,
                    &errors,
                    thresholds,
                    &rows,
                ));
            }
        } else {
            let errors: Vec<f64> = rows.iter().map(|r| r.error_value()).collect();
            summaries.push(make_summary(
                method.name(),
                "single",
                &errors,
                thresholds,
                &rows,
            ));
        }
    }

    let mut per_sequence = Vec::new();
    for &method in methods {
        // Best error per pair, bucketed by the sequence prefix.
        let mut by_sequence: std::collections::BTreeMap<String, std::collections::BTreeMap<&str, f64>> =
            Default::default();
        for r in records.iter().filter(|r| r.method == method.name()) {
            let sequence = r.pair_id.split('/').next().unwrap_or("").to_string();
            let entry = by_sequence
                .entry(sequence)
                .or_default()
                .entry(&r.pair_id)
                .or_insert(f64::INFINITY);
            *entry = entry.min(r.error_value());
        }
        for (sequence, pairs) in by_sequence {
            let errors: Vec<f64> = pairs.values().copied().collect();
            per_sequence.push(SequenceSummary {
                sequence,
                method: method.name().to_string(),
                thresholds: thresholds.to_vec(),
                auc: thresholds
                    .iter()
                    .map(|&t| auc(&errors, t).unwrap_or(0.0))
                    .collect(),
                pairs: errors.len(),
            });
        }
    }

    BenchReport {
        thresholds: thresholds.to_vec(),
        records,
        summaries,
        per_sequence,
        warnings,
    }
}

fn make_summary(
    method: &str,
    aggregate: &str,
    errors: &[f64],
    thresholds: &[f64],
    rows: &[&EvalRecord],
) -> MethodSummary {
    let auc_values: Vec<f64> = thresholds
        .iter()
        .map(|&t| auc(errors, t).unwrap_or(0.0))
        .collect();
    MethodSummary {
        method: method.to_string(),
        aggregate: aggregate.to_string(),
        thresholds: thresholds.to_vec(),
        auc: auc_values,
        pairs: errors.len(),
        successes: errors.iter().filter(|e| e.is_finite()).count(),
        mean_runtime_s: rows.iter().map(|r| r.runtime_s).sum::<f64>() / rows.len() as f64,
    }
}

/// Human-readable table mirroring the AUC columns of the report.
pub fn render_text_report(report: &BenchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "Homography estimation AUC (fraction of pairs under the corner-error threshold, integrated)"
    );
    let mut header = format!("{:<18}", "method");
    for t in &report.thresholds {
        header.push_str(&format!("{:>10}", format!("@{t}px")));
    }
    header.push_str(&format!("{:>12}{:>10}", "time(s)", "ok/pairs"));
    let _ = writeln!(s, "{header}");
    let _ = writeln!(s, "{}", "-".repeat(header.len()));
    for m in &report.summaries {
        let label = if m.aggregate == "single" {
            m.method.clone()
        } else {
            format!("{}({})", m.method, m.aggregate)
        };
        let mut row = format!("{label:<18}");
        for v in &m.auc {
            row.push_str(&format!("{:>10.4}", v));
        }
        row.push_str(&format!(
            "{:>12.3}{:>10}",
            m.mean_runtime_s,
            format!("{}/{}", m.successes, m.pairs)
        ));
        let _ = writeln!(s, "{row}");
    }
    if !report.warnings.is_empty() {
        let _ = writeln!(s, "\nwarnings:");
        for w in &report.warnings {
            let _ = writeln!(s, "  - {w}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_defaults_parse_from_empty_json() {
        let cfg: SweepConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg.scenes, 50);
        assert_eq!(cfg.thresholds, vec![3.0, 5.0, 10.0]);
    }

    #[test]
    fn sweep_rejects_unknown_keys() {
        let err = serde_json::from_str::<SweepConfig>("{\"bogus\": 1}").unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn synthetic_sweep_produces_records_and_summaries() {
        let sweep = SweepConfig {
            scenes: 3,
            n_inliers: 150,
            n_outliers: 50,
            seed: 11,
            ..Default::default()
        };
        let report = run_synthetic(&sweep, &[Method::Pmatch, Method::Ransac], 1);
        assert_eq!(report.records.len(), 6);
        assert_eq!(report.summaries.len(), 2);
        for summary in &report.summaries {
            assert_eq!(summary.pairs, 3);
            // Easy scenes: everything succeeds with high AUC.
            assert_eq!(summary.successes, 3);
            assert!(summary.auc[2] > 0.9, "AUC@10 {:?}", summary.auc);
        }
        let text = render_text_report(&report);
        assert!(text.contains("pmatch"));
        assert!(text.contains("ransac"));
        // All synthetic pairs fall in one "sequence".
        assert_eq!(report.per_sequence.len(), 2);
        for s in &report.per_sequence {
            assert_eq!(s.sequence, "synthetic");
            assert_eq!(s.pairs, 3);
        }
    }

    #[test]
    fn ransac_repeats_add_best_mean_worst() {
        let sweep = SweepConfig {
            scenes: 2,
            n_inliers: 120,
            n_outliers: 40,
            seed: 3,
            ..Default::default()
        };
        let report = run_synthetic(&sweep, &[Method::Ransac], 3);
        let aggregates: Vec<&str> = report
            .summaries
            .iter()
            .map(|s| s.aggregate.as_str())
            .collect();
        assert_eq!(aggregates, ["best", "mean", "worst"]);
        assert_eq!(report.records.len(), 6);
        // best-AUC dominates worst-AUC at every threshold.
        let best = &report.summaries[0];
        let worst = &report.summaries[2];
        for (b, w) in best.auc.iter().zip(&worst.auc) {
            assert!(b >= w);
        }
    }

    #[test]
    fn aggregate_auc_equals_mean_of_per_pair_integrals() {
        // The pooled step-curve integral equals the mean of the per-pair
        // (single-error) integrals; cross-check on a real sweep report.
        let sweep = SweepConfig {
            scenes: 6,
            n_inliers: 150,
            n_outliers: 150,
            noise_sigma: 1.0,
            seed: 29,
            ..Default::default()
        };
        let report = run_synthetic(&sweep, &[Method::Pmatch], 1);
        let summary = &report.summaries[0];
        for (k, &t) in summary.thresholds.iter().enumerate() {
            let mean_of_singles: f64 = report
                .records
                .iter()
                .map(|r| pmatch_core::auc(&[r.error_value()], t).unwrap())
                .sum::<f64>()
                / report.records.len() as f64;
            assert!(
                (summary.auc[k] - mean_of_singles).abs() <= 1e-12,
                "threshold {t}: {} vs {}",
                summary.auc[k],
                mean_of_singles
            );
        }
    }

    #[test]
    fn forced_exact_estimates_give_unit_auc() {
        // Records with zero error at every pair must aggregate to AUC 1.
        let records: Vec<EvalRecord> = (0..5)
            .map(|i| EvalRecord {
                pair_id: format!("p{i}"),
                method: "pmatch".into(),
                repeat: 0,
                success: true,
                corner_error: Some(0.0),
                runtime_s: 0.0,
                hull_area_fraction: Some(0.9),
            })
            .collect();
        let report = summarize(records, vec![], &[3.0, 5.0, 10.0], &[Method::Pmatch], 1);
        assert_eq!(report.summaries[0].auc, vec![1.0, 1.0, 1.0]);
    }
}
