//! Inlier/outlier labeling against planar-group homographies, and the
//! four-way estimated-vs-ground-truth confusion.

use crate::geometry::Homography;
use crate::merge::PlanarGroup;
use crate::pmatch::Correspondence;
use alloc::vec::Vec;

/// How reprojection error is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorMetric {
    /// `‖H·p1 − p2‖₂` — the prediction check in the second image.
    #[default]
    Forward,
    /// Max of the forward error and `‖H⁻¹·p2 − p1‖₂`.
    Symmetric,
}

impl ErrorMetric {
    fn error(&self, h: &Homography, c: &Correspondence) -> f64 {
        let forward = h.transfer_error(c.p1, c.p2);
        match self {
            ErrorMetric::Forward => forward,
            ErrorMetric::Symmetric => {
                forward.max(h.inverse().transfer_error(c.p2, c.p1))
            }
        }
    }
}

/// Label for one correspondence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchLabel {
    pub corr_id: usize,
    /// Group index the correspondence belongs to, or `None` for outliers.
    pub group: Option<usize>,
    /// Minimum reprojection error over all groups (pixels).
    pub reproj_error: f64,
}

impl MatchLabel {
    pub fn is_inlier(&self) -> bool {
        self.group.is_some()
    }
}

/// Label every correspondence as inlier of its best-fitting group or as an
/// outlier.
///
/// Per correspondence the reprojection error is evaluated against every
/// group homography; the correspondence is an inlier of the group with the
/// smallest error if that error is within `inlier_tol`, with exact ties
/// going to the lower group index. Pure and order-independent.
pub fn classify(
    corrs: &[Correspondence],
    groups: &[PlanarGroup],
    inlier_tol: f64,
    metric: ErrorMetric,
) -> Vec<MatchLabel> {
    corrs
        .iter()
        .enumerate()
        .map(|(corr_id, c)| {
            let mut best_group = 0usize;
            let mut best_err = f64::INFINITY;
            for (gid, g) in groups.iter().enumerate() {
                let e = metric.error(&g.homography, c);
                if e < best_err {
                    best_err = e;
                    best_group = gid;
                }
            }
            let inlier = !groups.is_empty() && best_err <= inlier_tol;
            MatchLabel {
                corr_id,
                group: inlier.then_some(best_group),
                reproj_error: best_err,
            }
        })
        .collect()
}

/// The four-way category of a correspondence under an estimated homography
/// `H_P` and a ground-truth homography `H_G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourWayCategory {
    /// Inlier under both (the yellow points).
    BothInlier,
    /// Outlier under both (blue).
    BothOutlier,
    /// Inlier under the estimate but not the ground truth (red).
    POnly,
    /// Outlier under the estimate but inlier under the ground truth (purple).
    GOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourWayLabel {
    pub corr_id: usize,
    pub category: FourWayCategory,
    pub error_p: f64,
    pub error_g: f64,
}

/// Counts of the four categories; they partition the correspondence set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FourWaySummary {
    pub both_inlier: usize,
    pub both_outlier: usize,
    pub p_only: usize,
    pub g_only: usize,
}

impl FourWaySummary {
    pub fn total(&self) -> usize {
        self.both_inlier + self.both_outlier + self.p_only + self.g_only
    }

    /// Fraction of correspondences that are inliers under both matrices.
    pub fn inlier_rate(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.both_inlier as f64 / self.total() as f64
        }
    }
}

/// Classify every correspondence under both homographies at tolerance `tol`
/// (forward transfer error).
pub fn four_way(
    corrs: &[Correspondence],
    h_p: &Homography,
    h_g: &Homography,
    tol: f64,
) -> (Vec<FourWayLabel>, FourWaySummary) {
    let mut labels = Vec::with_capacity(corrs.len());
    let mut summary = FourWaySummary::default();
    for (corr_id, c) in corrs.iter().enumerate() {
        let error_p = h_p.transfer_error(c.p1, c.p2);
        let error_g = h_g.transfer_error(c.p1, c.p2);
        let category = match (error_p <= tol, error_g <= tol) {
            (true, true) => {
                summary.both_inlier += 1;
                FourWayCategory::BothInlier
            }
            (false, false) => {
                summary.both_outlier += 1;
                FourWayCategory::BothOutlier
            }
            (true, false) => {
                summary.p_only += 1;
                FourWayCategory::POnly
            }
            (false, true) => {
                summary.g_only += 1;
                FourWayCategory::GOnly
            }
        };
        labels.push(FourWayLabel {
            corr_id,
            category,
            error_p,
            error_g,
        });
    }
    (labels, summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::merge::{build_planar_groups, MergeConfig};
    use crate::pmatch::{find_matched_pentagons, MatchConfig};
    use crate::synth::{synth_scene, PlantedLabel, SyntheticSceneConfig};

    fn group_from(h: Homography) -> PlanarGroup {
        PlanarGroup {
            pentagon_ids: alloc::vec![0],
            vertex_corr_ids: alloc::vec![0, 1, 2, 3, 4],
            homography: h,
            hull_area_fraction: 1.0,
            support: 5,
        }
    }

    #[test]
    fn exact_inlier_has_zero_error() {
        let h = Homography::translation(10.0, -4.0);
        let p1 = Point2::new(100.0, 50.0);
        let corrs = [Correspondence::new(p1, h.project(p1).unwrap())];
        let labels = classify(&corrs, &[group_from(h)], 10.0, ErrorMetric::Forward);
        assert_eq!(labels[0].group, Some(0));
        assert!(labels[0].reproj_error < 1e-9);
    }

    #[test]
    fn displaced_point_is_outlier() {
        let h = Homography::identity();
        let p1 = Point2::new(100.0, 50.0);
        let corrs = [Correspondence::new(p1, Point2::new(120.0, 50.0))]; // 20 px off
        let labels = classify(&corrs, &[group_from(h)], 10.0, ErrorMetric::Forward);
        assert_eq!(labels[0].group, None);
        assert!((labels[0].reproj_error - 20.0).abs() < 1e-9);
    }

    #[test]
    fn two_plane_assignment_picks_right_group() {
        let scene_cfg = SyntheticSceneConfig {
            n_inliers: 300,
            n_planes: 2,
            seed: 8,
            ..Default::default()
        };
        let scene = synth_scene(&scene_cfg);
        let found = find_matched_pentagons(
            &scene.correspondences,
            scene_cfg.width,
            scene_cfg.height,
            &MatchConfig {
                grid_n: 2,
                ..Default::default()
            },
        )
        .unwrap();
        let groups = build_planar_groups(
            &found.pairs,
            &scene.correspondences,
            scene_cfg.width,
            scene_cfg.height,
            &MergeConfig::default(),
        )
        .unwrap();
        assert_eq!(groups.len(), 2);

        // Map group index -> generating plane by comparing homographies.
        let plane_of_group: Vec<usize> = groups
            .iter()
            .map(|g| {
                let e0 = crate::geometry::corner_error(
                    &g.homography,
                    &scene.homographies[0],
                    scene_cfg.width,
                    scene_cfg.height,
                )
                .unwrap();
                let e1 = crate::geometry::corner_error(
                    &g.homography,
                    &scene.homographies[1],
                    scene_cfg.width,
                    scene_cfg.height,
                )
                .unwrap();
                usize::from(e1 < e0)
            })
            .collect();

        let labels = classify(&scene.correspondences, &groups, 10.0, ErrorMetric::Forward);
        for (label, planted) in labels.iter().zip(&scene.labels) {
            let PlantedLabel::Inlier { plane } = *planted else {
                continue;
            };
            let gid = label.group.expect("planted inlier must classify");
            assert_eq!(plane_of_group[gid], plane);
        }
    }

    #[test]
    fn symmetric_metric_at_least_forward() {
        let h = Homography::new([1.3, 0.02, 14.0, -0.01, 0.8, 3.0, 1e-4, -2e-4, 1.0]).unwrap();
        let c = Correspondence::new(Point2::new(50.0, 60.0), Point2::new(80.0, 40.0));
        let f = ErrorMetric::Forward.error(&h, &c);
        let s = ErrorMetric::Symmetric.error(&h, &c);
        assert!(s >= f);
    }

    #[test]
    fn four_way_identical_matrices_have_no_disagreement() {
        let scene = synth_scene(&SyntheticSceneConfig {
            n_inliers: 100,
            n_outliers: 60,
            noise_sigma: 1.0,
            seed: 40,
            ..Default::default()
        });
        let h = &scene.homographies[0];
        let (_, summary) = four_way(&scene.correspondences, h, h, 10.0);
        assert_eq!(summary.p_only, 0);
        assert_eq!(summary.g_only, 0);
        assert_eq!(summary.total(), 160);
    }

    #[test]
    fn four_way_scatter_is_mostly_both_outlier() {
        // No planted model at all; compare two far-apart homographies.
        let scene = synth_scene(&SyntheticSceneConfig {
            n_inliers: 0,
            n_outliers: 400,
            seed: 41,
            ..Default::default()
        });
        let h_p = Homography::identity();
        let h_g = Homography::translation(200.0, 120.0);
        let (_, summary) = four_way(&scene.correspondences, &h_p, &h_g, 10.0);
        assert!(summary.both_outlier as f64 >= 0.95 * summary.total() as f64);
    }
}
