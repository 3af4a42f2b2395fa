//! Aggregation of shape-matched pentagon pairs into coplanar groups, one
//! fitted homography per group.
//!
//! Two pentagons are deemed coplanar when mixed pentagons — three vertices
//! from one and two from the other, plus the complementary five — still
//! shape-match across views. Groups grow greedily to a fixpoint; pentagons
//! that merge with nobody and whose own homography explains almost no
//! correspondences are dropped as erroneous matches.

use crate::geometry::{convex_hull_area, estimate_homography, Homography, Point2};
use crate::pmatch::{match_signatures, Correspondence, PentagonPair};
use crate::rng;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use rand::seq::index;

#[derive(Debug, Clone, PartialEq)]
pub struct MergeConfig {
    /// Cross-ratio agreement threshold for the mixed-pentagon tests.
    pub cr_th: f64,
    /// Random (3, 2) vertex splits to try before two pentagons are declared
    /// non-coplanar.
    pub merge_trials: u32,
    /// Minimum number of correspondences a lone pentagon's homography must
    /// explain (within `inlier_tol`) to survive.
    pub min_support: usize,
    /// Reprojection tolerance (pixels) used for support counting and refit.
    pub inlier_tol: f64,
    /// Refit each group homography once on every correspondence the vertex
    /// fit explains, keeping the refit only if support does not drop.
    /// Disable for the plain vertex-only fit.
    pub refit: bool,
    pub seed: u64,
}

impl Default for MergeConfig {
    fn default() -> Self {
        Self {
            cr_th: 0.05,
            merge_trials: 5,
            min_support: 8,
            inlier_tol: 10.0,
            refit: true,
            seed: 0,
        }
    }
}

/// A set of merged pentagon pairs sharing one planar homography.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarGroup {
    /// Indices into the input pentagon list, ascending.
    pub pentagon_ids: Vec<usize>,
    /// Deduplicated correspondence indices of all member vertices, ascending.
    pub vertex_corr_ids: Vec<usize>,
    /// Homography fitted from the member vertices (optionally refit on the
    /// correspondences it explains).
    pub homography: Homography,
    /// Convex hull area of the member vertices in the first image, as a
    /// fraction of the image area.
    pub hull_area_fraction: f64,
    /// Correspondences within `inlier_tol` of the homography.
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MergeError {
    /// Every pentagon was discarded as unsupported or degenerate.
    #[error("no planar group could be established")]
    NoGroupFound,
}

/// Coplanarity test between two pentagon pairs.
///
/// Each trial draws m = 3 vertices of `pa` and n = 2 of `pb` to form one
/// mixed pentagon, with the remaining 2 + 3 forming the complementary one;
/// both mixed pairs must shape-match across the views. Up to
/// `cfg.merge_trials` vertex splits are tried (a degenerate split counts as
/// a failed trial). The split stream is derived from the seed and both
/// pentagons' vertices, so the test is deterministic and independent of
/// evaluation order.
pub fn cross_merge_test(
    pa: &PentagonPair,
    pb: &PentagonPair,
    corrs: &[Correspondence],
    cfg: &MergeConfig,
) -> bool {
    let mut parts: Vec<u64> = Vec::with_capacity(10);
    parts.extend(pa.indices.iter().map(|&i| i as u64));
    parts.extend(pb.indices.iter().map(|&i| i as u64));
    let mut rng = rng::stream(cfg.seed, &parts);

    for _ in 0..cfg.merge_trials {
        let from_a = index::sample(&mut rng, 5, 3);
        let from_b = index::sample(&mut rng, 5, 2);
        let mut take_a = [false; 5];
        let mut take_b = [false; 5];
        for i in from_a {
            take_a[i] = true;
        }
        for i in from_b {
            take_b[i] = true;
        }

        let mut first = Vec::with_capacity(5);
        let mut second = Vec::with_capacity(5);
        for (slot, &corr_id) in pa.indices.iter().enumerate() {
            if take_a[slot] {
                first.push(corr_id);
            } else {
                second.push(corr_id);
            }
        }
        for (slot, &corr_id) in pb.indices.iter().enumerate() {
            if take_b[slot] {
                first.push(corr_id);
            } else {
                second.push(corr_id);
            }
        }

        if mixed_matches(&first, corrs, cfg.cr_th) && mixed_matches(&second, corrs, cfg.cr_th) {
            return true;
        }
    }
    false
}

fn mixed_matches(ids: &[usize], corrs: &[Correspondence], cr_th: f64) -> bool {
    debug_assert_eq!(ids.len(), 5);
    let pts1: [Point2; 5] = core::array::from_fn(|k| corrs[ids[k]].p1);
    let pts2: [Point2; 5] = core::array::from_fn(|k| corrs[ids[k]].p2);
    match_signatures(&pts1, &pts2, cr_th).is_some()
}

/// Greedy agglomeration of pentagon pairs into planar groups.
///
/// A group is seeded with the first unassigned pentagon and absorbs, to a
/// fixpoint, every unassigned pentagon that passes [`cross_merge_test`]
/// against any current member; remaining pentagons seed further groups.
/// Each group's homography is then fitted from its member vertices.
/// Singleton groups whose homography explains fewer than `cfg.min_support`
/// correspondences are discarded as erroneous matches. Groups are sorted by
/// descending member count (ties: descending support, then first pentagon
/// id).
pub fn build_planar_groups(
    pentagons: &[PentagonPair],
    corrs: &[Correspondence],
    width: f64,
    height: f64,
    cfg: &MergeConfig,
) -> Result<Vec<PlanarGroup>, MergeError> {
    let mut out = Vec::new();

    // Shape matches can be positional flukes, so groups are validated after
    // fitting and inconsistent members evicted; evicted pentagons get one
    // more agglomeration round to form their own groups (a fluke merge must
    // not swallow a genuine plane), then count as erroneous matches.
    let mut pool: Vec<usize> = (0..pentagons.len()).collect();
    for _round in 0..2 {
        if pool.is_empty() {
            break;
        }
        let mut evicted = Vec::new();
        for members in agglomerate(&pool, pentagons, corrs, cfg) {
            if let Some(group) =
                fit_group(members, pentagons, corrs, width, height, cfg, &mut evicted)
            {
                out.push(group);
            }
        }
        pool = evicted;
    }

    if cfg.refit {
        refit_groups(&mut out, corrs, cfg);
    }

    if out.is_empty() {
        return Err(MergeError::NoGroupFound);
    }
    out.sort_by(|a, b| {
        b.pentagon_ids
            .len()
            .cmp(&a.pentagon_ids.len())
            .then(b.support.cmp(&a.support))
            .then(a.pentagon_ids[0].cmp(&b.pentagon_ids[0]))
    });
    Ok(out)
}

/// One round of guarded re-estimation. Each correspondence within tolerance
/// is assigned to the group that explains it best (ties to the earlier
/// group), so a correspondence near the intersection line of two planes
/// never biases the other plane's fit; each group is then refit on its
/// assignment, keeping the refit only when its support does not drop
/// materially.
fn refit_groups(groups: &mut [PlanarGroup], corrs: &[Correspondence], cfg: &MergeConfig) {
    let tol_sq = cfg.inlier_tol * cfg.inlier_tol;
    let mut buckets: Vec<Vec<(Point2, Point2)>> = alloc::vec![Vec::new(); groups.len()];
    for c in corrs {
        let mut best: Option<(usize, f64)> = None;
        for (gid, g) in groups.iter().enumerate() {
            let err_sq = g.homography.transfer_error_sq(c.p1, c.p2);
            if err_sq <= tol_sq && best.is_none_or(|(_, e)| err_sq < e) {
                best = Some((gid, err_sq));
            }
        }
        if let Some((gid, _)) = best {
            buckets[gid].push((c.p1, c.p2));
        }
    }
    for (g, bucket) in groups.iter_mut().zip(&buckets) {
        if bucket.len() < 4 {
            continue;
        }
        if let Ok(refit) = estimate_homography(bucket) {
            let refit_support = count_support(&refit, corrs, cfg.inlier_tol);
            // The refit may shed a few straggler outliers that sat inside
            // the vertex fit's tolerance; a material drop means divergence.
            if refit_support * 10 >= g.support * 9 {
                g.homography = refit;
                g.support = refit_support;
            }
        }
    }
}

/// Greedy agglomeration over the given pentagon ids: seed a group with the
/// first unassigned pentagon, absorb (to a fixpoint) everything that merges
/// with any current member, then open the next group.
fn agglomerate(
    pool: &[usize],
    pentagons: &[PentagonPair],
    corrs: &[Correspondence],
    cfg: &MergeConfig,
) -> Vec<Vec<usize>> {
    let mut assigned = alloc::vec![false; pool.len()];
    let mut groups = Vec::new();
    for seed_slot in 0..pool.len() {
        if assigned[seed_slot] {
            continue;
        }
        assigned[seed_slot] = true;
        let mut members = alloc::vec![pool[seed_slot]];
        loop {
            let mut absorbed = false;
            for (slot, &cand) in pool.iter().enumerate() {
                if assigned[slot] {
                    continue;
                }
                let merges = members
                    .iter()
                    .any(|&m| cross_merge_test(&pentagons[m], &pentagons[cand], corrs, cfg));
                if merges {
                    assigned[slot] = true;
                    members.push(cand);
                    absorbed = true;
                }
            }
            if !absorbed {
                break;
            }
        }
        members.sort_unstable();
        groups.push(members);
    }
    groups
}

/// Fit the group homography from the member vertices, evicting members the
/// fit cannot explain within `inlier_tol` (worst first); then count support
/// and apply the lone-pentagon support gate. Evicted member ids are appended
/// to `evicted`.
fn fit_group(
    mut members: Vec<usize>,
    pentagons: &[PentagonPair],
    corrs: &[Correspondence],
    width: f64,
    height: f64,
    cfg: &MergeConfig,
    evicted: &mut Vec<usize>,
) -> Option<PlanarGroup> {
    let vertex_ids_of = |members: &[usize]| -> Vec<usize> {
        members
            .iter()
            .flat_map(|&m| pentagons[m].indices)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    };

    let mut homography = None;
    while !members.is_empty() {
        let vertex_pairs: Vec<(Point2, Point2)> = vertex_ids_of(&members)
            .iter()
            .map(|&i| (corrs[i].p1, corrs[i].p2))
            .collect();
        let Ok(h) = estimate_homography(&vertex_pairs) else {
            // Degenerate vertex set: shed the last member and retry.
            evicted.push(members.pop().expect("nonempty"));
            continue;
        };
        let (worst_slot, worst_err) = members
            .iter()
            .enumerate()
            .map(|(slot, &m)| {
                let err = pentagons[m]
                    .indices
                    .iter()
                    .map(|&i| h.transfer_error(corrs[i].p1, corrs[i].p2))
                    .fold(0.0, f64::max);
                (slot, err)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("group is never empty");
        if worst_err <= cfg.inlier_tol {
            homography = Some(h);
            break;
        }
        evicted.push(members.remove(worst_slot));
    }
    let homography = homography?;
    let vertex_ids = vertex_ids_of(&members);
    let support = count_support(&homography, corrs, cfg.inlier_tol);

    if members.len() == 1 && support < cfg.min_support {
        return None; // unsupported lone pentagon: erroneous match
    }

    let hull_points: Vec<Point2> = vertex_ids.iter().map(|&i| corrs[i].p1).collect();
    Some(PlanarGroup {
        pentagon_ids: members,
        vertex_corr_ids: vertex_ids,
        homography,
        hull_area_fraction: convex_hull_area(&hull_points) / (width * height),
        support,
    })
}

fn count_support(h: &Homography, corrs: &[Correspondence], tol: f64) -> usize {
    let tol_sq = tol * tol;
    corrs
        .iter()
        .filter(|c| h.transfer_error_sq(c.p1, c.p2) <= tol_sq)
        .count()
}
