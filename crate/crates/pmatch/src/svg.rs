//! Match-overlay SVG: both images side by side, points colored by label,
//! pentagons outlined. Output is deterministic byte for byte.

use pmatch_core::{Correspondence, FourWayCategory as Cat, FourWayLabel, MatchLabel};
use std::fmt::Write as _;

/// Point palette following the four-way convention: yellow = inlier under
/// both matrices, blue = outlier under both, red = estimate-only inlier,
/// purple = ground-truth-only inlier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointColor {
    Yellow,
    Blue,
    Red,
    Purple,
}

impl PointColor {
    fn hex(self) -> &'static str {
        match self {
            PointColor::Yellow => "#f5c400",
            PointColor::Blue => "#1e6fd8",
            PointColor::Red => "#e00000",
            PointColor::Purple => "#8c1fd1",
        }
    }
}

/// Inlier/outlier coloring (no ground truth available).
pub fn colors_from_labels(labels: &[MatchLabel]) -> Vec<PointColor> {
    labels
        .iter()
        .map(|l| {
            if l.is_inlier() {
                PointColor::Yellow
            } else {
                PointColor::Blue
            }
        })
        .collect()
}

/// Four-way coloring.
pub fn colors_from_four_way(labels: &[FourWayLabel]) -> Vec<PointColor> {
    labels
        .iter()
        .map(|l| match l.category {
            Cat::BothInlier => PointColor::Yellow,
            Cat::BothOutlier => PointColor::Blue,
            Cat::POnly => PointColor::Red,
            Cat::GOnly => PointColor::Purple,
        })
        .collect()
}

const GAP: f64 = 24.0;
const MARGIN: f64 = 8.0;

/// Render the overlay. `pentagons` are drawn as closed red outlines in both
/// panes, from the five correspondence indices each.
pub fn render_overlay(
    corrs: &[Correspondence],
    colors: &[PointColor],
    pentagons: &[[usize; 5]],
    width: f64,
    height: f64,
) -> String {
    assert_eq!(corrs.len(), colors.len());
    let total_w = 2.0 * width + GAP + 2.0 * MARGIN;
    let total_h = height + 2.0 * MARGIN;
    let left = MARGIN;
    let right = MARGIN + width + GAP;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_w:.0}\" height=\"{total_h:.0}\" viewBox=\"0 0 {total_w:.2} {total_h:.2}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    for x0 in [left, right] {
        let _ = writeln!(
            s,
            "<rect x=\"{x0:.2}\" y=\"{MARGIN:.2}\" width=\"{width:.2}\" height=\"{height:.2}\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>"
        );
    }

    for (c, color) in corrs.iter().zip(colors) {
        let _ = writeln!(
            s,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{}\"/>",
            left + c.p1.x,
            MARGIN + c.p1.y,
            color.hex()
        );
        let _ = writeln!(
            s,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{}\"/>",
            right + c.p2.x,
            MARGIN + c.p2.y,
            color.hex()
        );
    }

    for pentagon in pentagons {
        for (offset, pick) in [(left, 0u8), (right, 1u8)] {
            let mut points = String::new();
            for &i in pentagon {
                let p = if pick == 0 { corrs[i].p1 } else { corrs[i].p2 };
                let _ = write!(points, "{:.2},{:.2} ", offset + p.x, MARGIN + p.y);
            }
            let _ = writeln!(
                s,
                "<polygon points=\"{}\" fill=\"none\" stroke=\"#e00000\" stroke-width=\"1.5\"/>",
                points.trim_end()
            );
        }
    }

    s.push_str("</svg>\n");
    s
}
