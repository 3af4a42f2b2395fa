//! End-to-end CLI tests: the synth → estimate → classify chain, exit codes,
//! config files and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pmatch")
}

fn tmp(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::remove_dir_all(&dir).ok();
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn pmatch")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn synth_estimate_classify_chain() {
    let dir = tmp("chain");
    let out_s = dir.to_str().unwrap();

    let synth = run(&[
        "synth", "--inliers", "200", "--outliers", "60", "--sigma", "0.5", "--seed", "7",
        "--out-dir", out_s,
    ]);
    assert!(synth.status.success(), "{}", stderr(&synth));
    assert!(dir.join("matches.csv").is_file());
    assert!(dir.join("H_plane_0.txt").is_file());
    assert!(dir.join("planted.csv").is_file());
    assert!(dir.join("manifest.json").is_file());

    let matches = dir.join("matches.csv");
    let estimate = run(&[
        "estimate", matches.to_str().unwrap(), "--width", "640", "--height", "480", "--seed",
        "3", "--out-dir", out_s,
    ]);
    assert!(estimate.status.success(), "{}", stderr(&estimate));
    let groups_path = dir.join("groups.json");
    assert!(groups_path.is_file());
    assert!(dir.join("H_0.txt").is_file());

    // The estimated homography should be close to the planted one: classify
    // with the ground truth and expect no estimate-vs-truth disagreement on
    // the planted inliers.
    let svg_path = dir.join("overlay.svg");
    let classify = run(&[
        "classify", matches.to_str().unwrap(), "--groups", groups_path.to_str().unwrap(),
        "--gt", dir.join("H_plane_0.txt").to_str().unwrap(), "--svg", svg_path.to_str().unwrap(),
        "--width", "640", "--height", "480", "--out-dir", out_s,
    ]);
    assert!(classify.status.success(), "{}", stderr(&classify));
    assert!(dir.join("labels.csv").is_file());
    let fourway: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("fourway.json")).unwrap()).unwrap();
    assert!(fourway["both_inlier"].as_u64().unwrap() >= 195);
    assert_eq!(fourway["p_only"].as_u64().unwrap(), 0);

    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("polygon"));

    // Classify against the estimate itself: identical predicates, so the
    // four-way disagreement counts must both be zero.
    let self_check = run(&[
        "classify", matches.to_str().unwrap(), "--homography", dir.join("H_0.txt").to_str().unwrap(),
        "--gt", dir.join("H_0.txt").to_str().unwrap(), "--out-dir", out_s,
    ]);
    assert!(self_check.status.success());
    let fourway: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("fourway.json")).unwrap()).unwrap();
    assert_eq!(fourway["p_only"].as_u64().unwrap(), 0);
    assert_eq!(fourway["g_only"].as_u64().unwrap(), 0);
}

#[test]
fn estimate_rejects_tiny_input_with_exit_3() {
    let dir = tmp("tiny");
    let csv = dir.join("four.csv");
    std::fs::write(&csv, "x1,y1,x2,y2\n1,1,1,1\n2,2,2,2\n3,1,3,1\n4,5,4,5\n").unwrap();
    let out = run(&[
        "estimate", csv.to_str().unwrap(), "--width", "100", "--height", "100",
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("need at least 5 correspondences"));
}

#[test]
fn malformed_csv_exits_4_with_line_number() {
    let dir = tmp("malformed");
    let csv = dir.join("bad.csv");
    std::fs::write(&csv, "x1,y1,x2,y2\n1,2,3,4\n5,6,7\n").unwrap();
    let out = run(&[
        "estimate", csv.to_str().unwrap(), "--width", "100", "--height", "100",
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains(":3:"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_2() {
    let out = run(&["estimate", "nonexistent.csv", "--width", "100"]);
    // Missing --height is a usage problem.
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    let out = run(&["bench", "--dataset", "x", "--synthetic", "y"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn estimate_is_byte_deterministic() {
    let dir = tmp("determinism");
    let out_s = dir.to_str().unwrap();
    let synth = run(&[
        "synth", "--inliers", "150", "--outliers", "150", "--sigma", "0.5", "--seed", "11",
        "--out-dir", out_s,
    ]);
    assert!(synth.status.success());
    let matches = dir.join("matches.csv");

    let args = [
        "estimate", matches.to_str().unwrap(), "--width", "640", "--height", "480", "--seed",
        "9", "--out-dir", out_s,
    ];
    assert!(run(&args).status.success());
    let first_groups = std::fs::read(dir.join("groups.json")).unwrap();
    let first_h = std::fs::read(dir.join("H_0.txt")).unwrap();
    let first_manifest = std::fs::read(dir.join("manifest.json")).unwrap();

    assert!(run(&args).status.success());
    assert_eq!(first_groups, std::fs::read(dir.join("groups.json")).unwrap());
    assert_eq!(first_h, std::fs::read(dir.join("H_0.txt")).unwrap());
    assert_eq!(first_manifest, std::fs::read(dir.join("manifest.json")).unwrap());
}

#[test]
fn config_file_supplies_defaults_and_rejects_unknown_keys() {
    let dir = tmp("config");
    let out_s = dir.to_str().unwrap();
    run(&["synth", "--inliers", "120", "--seed", "5", "--out-dir", out_s]);
    let matches = dir.join("matches.csv");

    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "width = 640\nheight = 480\n# comment\ngrid-n = 2\nseed = 4\n").unwrap();
    let out = run(&[
        "estimate", matches.to_str().unwrap(), "--config", cfg.to_str().unwrap(),
        "--out-dir", out_s,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["grid_n"].as_u64(), Some(2));
    assert_eq!(manifest["seed"].as_u64(), Some(4));

    std::fs::write(&cfg, "width = 640\nheight = 480\nwat = 1\n").unwrap();
    let out = run(&[
        "estimate", matches.to_str().unwrap(), "--config", cfg.to_str().unwrap(),
        "--out-dir", out_s,
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("wat"));
}

#[test]
fn bench_empty_dataset_reports_no_sequences() {
    let dir = tmp("empty-dataset");
    let out = run(&[
        "bench", "--dataset", dir.to_str().unwrap(), "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("no sequences found"));
}

#[test]
fn bench_synthetic_sweep_reports_both_methods() {
    let dir = tmp("bench-sweep");
    let sweep = dir.join("sweep.json");
    std::fs::write(
        &sweep,
        "{\"scenes\": 2, \"n_inliers\": 150, \"n_outliers\": 50, \"seed\": 13}",
    )
    .unwrap();
    let out = run(&[
        "bench", "--synthetic", sweep.to_str().unwrap(), "--out-dir", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["thresholds"], serde_json::json!([3.0, 5.0, 10.0]));
    let methods: Vec<&str> = report["summaries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["method"].as_str().unwrap())
        .collect();
    assert!(methods.contains(&"pmatch") && methods.contains(&"ransac"));
    for summary in report["summaries"].as_array().unwrap() {
        assert_eq!(summary["auc"].as_array().unwrap().len(), 3);
    }
    assert!(dir.join("report.txt").is_file());
}

#[test]
fn bench_ransac_repeats_report_best_mean_worst() {
    let dir = tmp("bench-repeats");
    let sweep = dir.join("sweep.json");
    std::fs::write(&sweep, "{\"scenes\": 2, \"n_inliers\": 120, \"seed\": 21}").unwrap();
    let out = run(&[
        "bench", "--synthetic", sweep.to_str().unwrap(), "--methods", "ransac",
        "--repeats", "3", "--out-dir", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.join("report.txt")).unwrap();
    assert!(text.contains("ransac(best)"));
    assert!(text.contains("ransac(mean)"));
    assert!(text.contains("ransac(worst)"));
}

#[test]
fn bench_dataset_mode_ingests_hpatches_layout() {
    let dir = tmp("bench-dataset");
    let out_s = dir.to_str().unwrap();
    // Build one sequence with two pairs from synthetic scenes.
    let seq = dir.join("v_synth");
    std::fs::create_dir_all(&seq).unwrap();
    for k in 2..=3u32 {
        let scene_dir = dir.join(format!("scene{k}"));
        let scene = run(&[
            "synth", "--inliers", "200", "--outliers", "40", "--sigma", "0.5", "--seed",
            &k.to_string(), "--out-dir", scene_dir.to_str().unwrap(),
        ]);
        assert!(scene.status.success());
        std::fs::copy(scene_dir.join("matches.csv"), seq.join(format!("matches_1_{k}.csv")))
            .unwrap();
        std::fs::copy(scene_dir.join("H_plane_0.txt"), seq.join(format!("H_1_{k}"))).unwrap();
    }
    let out = run(&[
        "bench", "--dataset", out_s, "--methods", "pmatch", "--width", "640", "--height",
        "480", "--out-dir", out_s,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    let records = report["records"].as_array().unwrap();
    assert_eq!(records.len(), 2);
    for r in records {
        assert_eq!(r["success"].as_bool(), Some(true));
        assert!(r["corner_error"].as_f64().unwrap() < 3.0);
    }
}

#[test]
fn two_plane_scene_labels_carry_both_group_ids() {
    let dir = tmp("two-plane");
    let out_s = dir.to_str().unwrap();
    let synth = run(&[
        "synth", "--inliers", "300", "--planes", "2", "--seed", "19", "--out-dir", out_s,
    ]);
    assert!(synth.status.success(), "{}", stderr(&synth));
    let matches = dir.join("matches.csv");
    let estimate = run(&[
        "estimate", matches.to_str().unwrap(), "--width", "640", "--height", "480",
        "--grid-n", "2", "--seed", "2", "--out-dir", out_s,
    ]);
    assert!(estimate.status.success(), "{}", stderr(&estimate));
    let groups: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("groups.json")).unwrap()).unwrap();
    assert_eq!(groups.as_array().unwrap().len(), 2);

    let classify = run(&[
        "classify", matches.to_str().unwrap(), "--groups",
        dir.join("groups.json").to_str().unwrap(), "--out-dir", out_s,
    ]);
    assert!(classify.status.success());
    let labels = std::fs::read_to_string(dir.join("labels.csv")).unwrap();
    let mut group_ids: Vec<&str> = labels
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap())
        .filter(|g| !g.is_empty())
        .collect();
    group_ids.sort_unstable();
    group_ids.dedup();
    assert_eq!(group_ids, ["0", "1"]);
}
