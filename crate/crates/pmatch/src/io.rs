//! Readers and writers for the on-disk formats.

use pmatch_core::{Correspondence, Homography, PentagonPair, PlanarGroup, Point2};
use pmatch_core::{FourWaySummary, MatchLabel};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
}

impl FormatError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    fn parse(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        Self::Parse {
            path: path.display().to_string(),
            line,
            msg: msg.into(),
        }
    }
}

/// Read a correspondence CSV. The header must be `x1,y1,x2,y2` with an
/// optional trailing `conf` column; malformed lines are reported with their
/// line number.
pub fn read_correspondences(path: &Path) -> Result<Vec<Correspondence>, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| FormatError::parse(path, 1, "empty file"))?;
    let columns: Vec<String> = header
        .split(',')
        .map(|c| c.trim().to_ascii_lowercase())
        .collect();
    let has_conf = match columns.as_slice() {
        [x1, y1, x2, y2] if x1 == "x1" && y1 == "y1" && x2 == "x2" && y2 == "y2" => false,
        [x1, y1, x2, y2, c] if x1 == "x1" && y1 == "y1" && x2 == "x2" && y2 == "y2" && c == "conf" => true,
        _ => {
            return Err(FormatError::parse(
                path,
                1,
                "expected header `x1,y1,x2,y2` or `x1,y1,x2,y2,conf`",
            ))
        }
    };

    let mut out = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let expected = if has_conf { 5 } else { 4 };
        if fields.len() != expected {
            return Err(FormatError::parse(
                path,
                line_no,
                format!("expected {expected} fields, found {}", fields.len()),
            ));
        }
        let mut nums = [0.0f64; 5];
        for (slot, field) in fields.iter().enumerate() {
            nums[slot] = field.parse::<f64>().map_err(|_| {
                FormatError::parse(path, line_no, format!("invalid number `{field}`"))
            })?;
        }
        let p1 = Point2::try_new(nums[0], nums[1])
            .ok_or_else(|| FormatError::parse(path, line_no, "non-finite coordinate"))?;
        let p2 = Point2::try_new(nums[2], nums[3])
            .ok_or_else(|| FormatError::parse(path, line_no, "non-finite coordinate"))?;
        let corr = if has_conf {
            let conf = nums[4];
            if !(0.0..=1.0).contains(&conf) {
                return Err(FormatError::parse(
                    path,
                    line_no,
                    format!("confidence {conf} outside [0, 1]"),
                ));
            }
            Correspondence::with_confidence(p1, p2, conf)
        } else {
            Correspondence::new(p1, p2)
        };
        out.push(corr);
    }
    Ok(out)
}

/// Serialize correspondences in the CSV format accepted by
/// [`read_correspondences`]. Writes the `conf` column when any
/// correspondence carries a confidence.
pub fn correspondences_to_csv(corrs: &[Correspondence]) -> String {
    let with_conf = corrs.iter().any(|c| c.confidence.is_some());
    let mut out = String::new();
    out.push_str(if with_conf {
        "x1,y1,x2,y2,conf\n"
    } else {
        "x1,y1,x2,y2\n"
    });
    for c in corrs {
        if with_conf {
            let conf = c.confidence.unwrap_or(1.0);
            let _ = writeln!(out, "{},{},{},{},{}", c.p1.x, c.p1.y, c.p2.x, c.p2.y, conf);
        } else {
            let _ = writeln!(out, "{},{},{},{}", c.p1.x, c.p1.y, c.p2.x, c.p2.y);
        }
    }
    out
}

/// Parse a homography text file: nine whitespace-separated decimals in
/// row-major order (any line layout; HPatches uses three per line).
pub fn read_homography_text(path: &Path) -> Result<Homography, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    parse_homography_text(&text).map_err(|msg| FormatError::Invalid {
        path: path.display().to_string(),
        msg,
    })
}

pub fn parse_homography_text(text: &str) -> Result<Homography, String> {
    let values: Result<Vec<f64>, _> = text.split_whitespace().map(str::parse::<f64>).collect();
    let values = values.map_err(|e| format!("invalid number: {e}"))?;
    let entries: [f64; 9] = values
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 9 values, found {}", v.len()))?;
    Homography::new(entries).map_err(|e| e.to_string())
}

/// Render a homography as 3 lines × 3 decimals, row-major. Values use the
/// shortest exact decimal representation, so write → read round-trips to the
/// same matrix and reruns are byte-identical.
pub fn homography_to_text(h: &Homography) -> String {
    let m = h.as_array();
    format!(
        "{} {} {}\n{} {} {}\n{} {} {}\n",
        m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7], m[8]
    )
}

/// One planar group in `groups.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupRecord {
    pub id: usize,
    pub pentagon_ids: Vec<usize>,
    pub correspondence_ids: Vec<usize>,
    /// Row-major 3×3 matrix.
    pub homography: [[f64; 3]; 3],
    pub hull_area_fraction: f64,
    pub support: usize,
    /// Member pentagons with their five correspondence indices, so overlays
    /// can be drawn from the file alone.
    pub pentagons: Vec<PentagonRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PentagonRecord {
    pub id: usize,
    pub indices: [usize; 5],
    pub block: [u32; 2],
}

pub fn homography_to_rows(h: &Homography) -> [[f64; 3]; 3] {
    let m = h.as_array();
    [
        [m[0], m[1], m[2]],
        [m[3], m[4], m[5]],
        [m[6], m[7], m[8]],
    ]
}

pub fn homography_from_rows(rows: &[[f64; 3]; 3]) -> Result<Homography, String> {
    Homography::new([
        rows[0][0], rows[0][1], rows[0][2], rows[1][0], rows[1][1], rows[1][2], rows[2][0],
        rows[2][1], rows[2][2],
    ])
    .map_err(|e| e.to_string())
}

/// Build the `groups.json` records from pipeline output.
pub fn group_records(groups: &[PlanarGroup], pentagons: &[PentagonPair]) -> Vec<GroupRecord> {
    groups
        .iter()
        .enumerate()
        .map(|(id, g)| GroupRecord {
            id,
            pentagon_ids: g.pentagon_ids.clone(),
            correspondence_ids: g.vertex_corr_ids.clone(),
            homography: homography_to_rows(&g.homography),
            hull_area_fraction: g.hull_area_fraction,
            support: g.support,
            pentagons: g
                .pentagon_ids
                .iter()
                .map(|&pid| PentagonRecord {
                    id: pid,
                    indices: pentagons[pid].indices,
                    block: [pentagons[pid].block.0, pentagons[pid].block.1],
                })
                .collect(),
        })
        .collect()
}

pub fn read_groups(path: &Path) -> Result<Vec<GroupRecord>, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| FormatError::Invalid {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// `labels.csv` body: `corr_id,category,group_id,error_px` with an empty
/// group for outliers.
pub fn labels_to_csv(labels: &[MatchLabel]) -> String {
    let mut out = String::from("corr_id,category,group_id,error_px\n");
    for l in labels {
        match l.group {
            Some(g) => {
                let _ = writeln!(out, "{},inlier,{},{}", l.corr_id, g, l.reproj_error);
            }
            None => {
                let _ = writeln!(out, "{},outlier,,{}", l.corr_id, l.reproj_error);
            }
        }
    }
    out
}

/// Four-way summary JSON payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FourWayJson {
    pub both_inlier: usize,
    pub both_outlier: usize,
    pub p_only: usize,
    pub g_only: usize,
    pub inlier_rate: f64,
}

impl From<FourWaySummary> for FourWayJson {
    fn from(s: FourWaySummary) -> Self {
        Self {
            both_inlier: s.both_inlier,
            both_outlier: s.both_outlier,
            p_only: s.p_only,
            g_only: s.g_only,
            inlier_rate: s.inlier_rate(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp_dir() -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "pmatch-io-test-{}-{}",
            std::process::id(),
            std::thread::current().name().unwrap_or("t").replace("::", "-")
        ));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn csv_round_trip() {
        let corrs = vec![
            Correspondence::new(Point2::new(1.5, 2.0), Point2::new(3.25, -4.0)),
            Correspondence::new(Point2::new(0.1, 0.2), Point2::new(0.3, 0.4)),
        ];
        let dir = tmp_dir();
        let path = dir.join("matches.csv");
        std::fs::write(&path, correspondences_to_csv(&corrs)).unwrap();
        let back = read_correspondences(&path).unwrap();
        assert_eq!(corrs, back);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn csv_reports_line_numbers() {
        let dir = tmp_dir();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "x1,y1,x2,y2\n1,2,3,4\n1,2,oops,4\n").unwrap();
        let err = read_correspondences(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":3:"), "missing line number: {msg}");
        assert!(msg.contains("oops"));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn csv_rejects_bad_header_and_conf_range() {
        let dir = tmp_dir();
        let path = dir.join("h.csv");
        std::fs::write(&path, "a,b,c,d\n").unwrap();
        assert!(read_correspondences(&path).is_err());
        std::fs::write(&path, "x1,y1,x2,y2,conf\n1,2,3,4,1.5\n").unwrap();
        let err = read_correspondences(&path).unwrap_err().to_string();
        assert!(err.contains("confidence"));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn homography_text_round_trip() {
        let h = Homography::new([1.1, 0.01, -24.0, -0.02, 0.93, 13.5, 1e-5, -3e-5, 1.0]).unwrap();
        let text = homography_to_text(&h);
        assert_eq!(text.lines().count(), 3);
        let back = parse_homography_text(&text).unwrap();
        assert_eq!(h.as_array(), back.as_array());
    }

    #[test]
    fn homography_text_accepts_hpatches_layout() {
        // Typical HPatches ground-truth formatting.
        let text = "0.87976964  0.30735334  -47.537171\n-0.18708227  0.92026707  68.273518\n0.00019761165  -2.0172435e-05  1.0005611\n";
        let h = parse_homography_text(text).unwrap();
        assert!(h.det().abs() > 1e-12);
    }

    #[test]
    fn labels_csv_shape() {
        let labels = vec![
            MatchLabel {
                corr_id: 0,
                group: Some(0),
                reproj_error: 0.5,
            },
            MatchLabel {
                corr_id: 1,
                group: None,
                reproj_error: 25.0,
            },
        ];
        let csv = labels_to_csv(&labels);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "corr_id,category,group_id,error_px");
        assert_eq!(lines[1], "0,inlier,0,0.5");
        assert_eq!(lines[2], "1,outlier,,25");
    }
}
