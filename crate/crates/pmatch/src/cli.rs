//! The `pmatch` command-line tool.
//!
//! Subcommands: `estimate` (match CSV → planar groups + homographies),
//! `classify` (label matches against groups, four-way comparison, SVG
//! overlay), `bench` (synthetic sweeps or HPatches-style datasets) and
//! `synth` (dump a synthetic scene). Exit codes: 0 success, 2 usage,
//! 3 no match found, 4 I/O or malformed input.

use crate::bench::{self, DatasetOptions, Method, SweepConfig};
use crate::io;
use crate::manifest::{atomic_write, RunManifest};
use crate::svg;
use clap::{Args, Parser, Subcommand};
use pmatch_core::pipeline::{self, PipelineConfig};
use pmatch_core::{
    classify, four_way, synth_scene, ErrorMetric, MatchConfig, MergeConfig, PlanarGroup,
    PlantedLabel, SyntheticSceneConfig,
};
use serde_json::json;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    NoMatch(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NoMatch(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::NoMatch(m) | CliError::Io(m) => m,
        }
    }
}

impl From<io::FormatError> for CliError {
    fn from(e: io::FormatError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "pmatch",
    version,
    about = "Pentagon-based correspondence verification and homography estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find matched pentagons, merge planar groups and fit homographies.
    Estimate(EstimateArgs),
    /// Label correspondences against planar groups; optional four-way
    /// comparison against a ground-truth homography and SVG overlay.
    Classify(ClassifyArgs),
    /// Benchmark estimators over a synthetic sweep or a dataset directory.
    Bench(BenchArgs),
    /// Generate a synthetic scene (match CSV + ground-truth files).
    Synth(SynthArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Correspondence CSV (`x1,y1,x2,y2[,conf]`).
    matches: PathBuf,
    /// First-image width in pixels.
    #[arg(long)]
    width: Option<f64>,
    /// First-image height in pixels.
    #[arg(long)]
    height: Option<f64>,
    /// N of the N×N grid partition.
    #[arg(long)]
    grid_n: Option<u32>,
    /// Cross-ratio agreement threshold.
    #[arg(long)]
    cr_th: Option<f64>,
    /// Pentagon trial budget per block.
    #[arg(long)]
    kp: Option<u32>,
    #[arg(long)]
    pentagons_per_block: Option<u32>,
    /// Minimum pairwise vertex separation in the first image (px).
    #[arg(long)]
    min_sep: Option<f64>,
    /// Random (3,2) splits per pentagon pair during merging.
    #[arg(long)]
    merge_trials: Option<u32>,
    /// Minimum support for a lone pentagon to survive.
    #[arg(long)]
    min_support: Option<usize>,
    /// Inlier tolerance in pixels.
    #[arg(long)]
    inlier_tol: Option<f64>,
    /// Skip the guarded refit of each group homography.
    #[arg(long)]
    no_refit: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Drop correspondences with confidence below this value.
    #[arg(long)]
    min_conf: Option<f64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// key=value file with defaults for the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Correspondence CSV (`x1,y1,x2,y2[,conf]`).
    matches: PathBuf,
    /// groups.json from `estimate`.
    #[arg(long, group = "model", required = true)]
    groups: Option<PathBuf>,
    /// Single homography text file instead of groups.json.
    #[arg(long, group = "model")]
    homography: Option<PathBuf>,
    /// Ground-truth homography text file; enables the four-way summary.
    #[arg(long)]
    gt: Option<PathBuf>,
    /// Inlier tolerance in pixels.
    #[arg(long)]
    tol: Option<f64>,
    /// Use symmetric transfer error (max of forward and inverse).
    #[arg(long)]
    symmetric: bool,
    /// Write a side-by-side SVG overlay to this path.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Image width for the SVG canvas (defaults to the coordinate extent).
    #[arg(long)]
    width: Option<f64>,
    /// Image height for the SVG canvas.
    #[arg(long)]
    height: Option<f64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// HPatches-style dataset directory (H_1_k + matches_1_k.csv per pair).
    #[arg(long, group = "source", required = true)]
    dataset: Option<PathBuf>,
    /// Synthetic sweep JSON.
    #[arg(long, group = "source")]
    synthetic: Option<PathBuf>,
    /// Comma-separated methods to run.
    #[arg(long, default_value = "pmatch,ransac")]
    methods: String,
    /// RANSAC repetitions per pair (reports best/mean/worst when > 1).
    #[arg(long, default_value_t = 1)]
    repeats: u32,
    #[arg(long)]
    seed: Option<u64>,
    /// Frame width for corner error on dataset pairs.
    #[arg(long)]
    width: Option<f64>,
    /// Frame height for corner error on dataset pairs.
    #[arg(long)]
    height: Option<f64>,
    /// Drop correspondences with confidence below this value.
    #[arg(long)]
    min_conf: Option<f64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    height: Option<f64>,
    #[arg(long)]
    inliers: Option<usize>,
    #[arg(long)]
    outliers: Option<usize>,
    /// Gaussian noise sigma on inlier positions (px).
    #[arg(long)]
    sigma: Option<f64>,
    /// Number of planes (1 or 2).
    #[arg(long)]
    planes: Option<u8>,
    /// Homography perturbation magnitude in [0, 1].
    #[arg(long)]
    magnitude: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Parse arguments and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version on stdout (code 0) and usage errors
            // on stderr (code 2).
            e.exit()
        }
    };
    let result = match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

// ---------------------------------------------------------------------------
// key=value config files

/// Keys accepted in `--config` files; each subcommand consumes the subset it
/// understands and ignores the rest of the vocabulary.
const CONFIG_KEYS: &[&str] = &[
    "width",
    "height",
    "grid_n",
    "cr_th",
    "kp",
    "pentagons_per_block",
    "min_sep",
    "merge_trials",
    "min_support",
    "inlier_tol",
    "refit",
    "seed",
    "min_conf",
    "tol",
    "symmetric",
    "repeats",
    "inliers",
    "outliers",
    "sigma",
    "planes",
    "magnitude",
];

struct Kv {
    map: BTreeMap<String, String>,
}

impl Kv {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        let Some(path) = path else {
            return Ok(Self { map });
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected `key = value`",
                    path.display(),
                    idx + 1
                )));
            };
            let key = key.trim().replace('-', "_");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "{}:{}: unknown config key `{key}`",
                    path.display(),
                    idx + 1
                )));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(Self { map })
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Usage(format!("config key `{key}`: cannot parse `{raw}`"))
            }),
        }
    }
}

fn resolve<T: std::str::FromStr>(
    flag: Option<T>,
    kv: &Kv,
    key: &str,
    default: T,
) -> Result<T, CliError> {
    match flag {
        Some(v) => Ok(v),
        None => Ok(kv.get(key)?.unwrap_or(default)),
    }
}

fn require<T: std::str::FromStr>(flag: Option<T>, kv: &Kv, key: &str) -> Result<T, CliError> {
    match flag {
        Some(v) => Ok(v),
        None => kv
            .get(key)?
            .ok_or_else(|| CliError::Usage(format!("--{key} is required (flag or config file)"))),
    }
}

fn apply_min_conf(corrs: &mut Vec<pmatch_core::Correspondence>, min_conf: Option<f64>) {
    if let Some(threshold) = min_conf {
        corrs.retain(|c| c.confidence.is_none_or(|v| v >= threshold));
    }
}

// ---------------------------------------------------------------------------
// estimate

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let kv = Kv::load(args.config.as_deref())?;
    let width: f64 = require(args.width, &kv, "width")?;
    let height: f64 = require(args.height, &kv, "height")?;
    let seed: u64 = resolve(args.seed, &kv, "seed", 0)?;
    let refit = if args.no_refit {
        false
    } else {
        resolve(None, &kv, "refit", true)?
    };
    let cfg = PipelineConfig {
        matching: MatchConfig {
            grid_n: resolve(args.grid_n, &kv, "grid_n", 3)?,
            cr_th: resolve(args.cr_th, &kv, "cr_th", 0.05)?,
            k_p: resolve(args.kp, &kv, "kp", 1000)?,
            pentagons_per_block: resolve(args.pentagons_per_block, &kv, "pentagons_per_block", 1)?,
            min_vertex_separation: resolve(args.min_sep, &kv, "min_sep", 5.0)?,
            seed,
        },
        merging: MergeConfig {
            cr_th: resolve(args.cr_th, &kv, "cr_th", 0.05)?,
            merge_trials: resolve(args.merge_trials, &kv, "merge_trials", 5)?,
            min_support: resolve(args.min_support, &kv, "min_support", 8)?,
            inlier_tol: resolve(args.inlier_tol, &kv, "inlier_tol", 10.0)?,
            refit,
            seed,
        },
    };

    let mut corrs = io::read_correspondences(&args.matches)?;
    apply_min_conf(&mut corrs, resolve(args.min_conf, &kv, "min_conf", f64::NAN).ok().filter(|v| v.is_finite()));
    if corrs.len() < 5 {
        return Err(CliError::NoMatch("need at least 5 correspondences".into()));
    }

    let out = pipeline::run(&corrs, width, height, &cfg)
        .map_err(|e| CliError::NoMatch(e.to_string()))?;

    let mut manifest = RunManifest::new(
        "estimate",
        seed,
        json!({
            "matches": args.matches.display().to_string(),
            "width": width,
            "height": height,
            "grid_n": cfg.matching.grid_n,
            "cr_th": cfg.matching.cr_th,
            "kp": cfg.matching.k_p,
            "pentagons_per_block": cfg.matching.pentagons_per_block,
            "min_sep": cfg.matching.min_vertex_separation,
            "merge_trials": cfg.merging.merge_trials,
            "min_support": cfg.merging.min_support,
            "inlier_tol": cfg.merging.inlier_tol,
            "refit": cfg.merging.refit,
        }),
    );
    manifest.input(&args.matches);

    let records = io::group_records(&out.groups, &out.pentagons);
    let groups_path = args.out_dir.join("groups.json");
    let mut body = serde_json::to_string_pretty(&records).expect("groups serialize");
    body.push('\n');
    atomic_write(&groups_path, body.as_bytes())?;
    manifest.output(&groups_path);

    for (i, group) in out.groups.iter().enumerate() {
        let path = args.out_dir.join(format!("H_{i}.txt"));
        atomic_write(&path, io::homography_to_text(&group.homography).as_bytes())?;
        manifest.output(&path);
    }
    let manifest_path = manifest.write(&args.out_dir)?;

    println!(
        "{} planar group(s), {} pentagon(s); wrote {} and {}",
        out.groups.len(),
        out.pentagons.len(),
        groups_path.display(),
        manifest_path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// classify

fn cmd_classify(args: ClassifyArgs) -> Result<(), CliError> {
    let kv = Kv::load(args.config.as_deref())?;
    let tol: f64 = resolve(args.tol, &kv, "tol", 10.0)?;
    let symmetric = args.symmetric || kv.get::<bool>("symmetric")?.unwrap_or(false);
    let metric = if symmetric {
        ErrorMetric::Symmetric
    } else {
        ErrorMetric::Forward
    };

    let corrs = io::read_correspondences(&args.matches)?;

    // Model source: groups.json or a single homography file.
    let (groups, pentagon_outlines, model_input): (Vec<PlanarGroup>, Vec<[usize; 5]>, PathBuf) =
        if let Some(path) = &args.groups {
            let records = io::read_groups(path)?;
            if records.is_empty() {
                return Err(CliError::NoMatch(format!(
                    "{}: no groups in file",
                    path.display()
                )));
            }
            let mut groups = Vec::new();
            let mut outlines = Vec::new();
            for r in &records {
                let homography = io::homography_from_rows(&r.homography)
                    .map_err(|msg| CliError::Io(format!("{}: {msg}", path.display())))?;
                for p in &r.pentagons {
                    outlines.push(p.indices);
                }
                groups.push(PlanarGroup {
                    pentagon_ids: r.pentagon_ids.clone(),
                    vertex_corr_ids: r.correspondence_ids.clone(),
                    homography,
                    hull_area_fraction: r.hull_area_fraction,
                    support: r.support,
                });
            }
            (groups, outlines, path.clone())
        } else {
            let path = args.homography.as_ref().expect("clap enforces the group");
            let homography = io::read_homography_text(path)?;
            let group = PlanarGroup {
                pentagon_ids: vec![],
                vertex_corr_ids: vec![],
                homography,
                hull_area_fraction: 0.0,
                support: 0,
            };
            (vec![group], vec![], path.clone())
        };

    for outline in &pentagon_outlines {
        if outline.iter().any(|&i| i >= corrs.len()) {
            return Err(CliError::Io(
                "groups.json references correspondence indices beyond the match file".into(),
            ));
        }
    }

    let labels = classify(&corrs, &groups, tol, metric);

    let mut manifest = RunManifest::new(
        "classify",
        0,
        json!({
            "matches": args.matches.display().to_string(),
            "model": model_input.display().to_string(),
            "tol": tol,
            "symmetric": symmetric,
        }),
    );
    manifest.input(&args.matches);
    manifest.input(&model_input);

    let labels_path = args.out_dir.join("labels.csv");
    atomic_write(&labels_path, io::labels_to_csv(&labels).as_bytes())?;
    manifest.output(&labels_path);

    let mut four_way_labels = None;
    if let Some(gt_path) = &args.gt {
        let h_gt = io::read_homography_text(gt_path)?;
        let (fw_labels, summary) = four_way(&corrs, &groups[0].homography, &h_gt, tol);
        let json_path = args.out_dir.join("fourway.json");
        let mut body =
            serde_json::to_string_pretty(&io::FourWayJson::from(summary)).expect("summary");
        body.push('\n');
        atomic_write(&json_path, body.as_bytes())?;
        manifest.input(gt_path);
        manifest.output(&json_path);
        four_way_labels = Some(fw_labels);
        println!(
            "four-way: both_inlier={} both_outlier={} p_only={} g_only={}",
            summary.both_inlier, summary.both_outlier, summary.p_only, summary.g_only
        );
    }

    if let Some(svg_path) = &args.svg {
        let extent_w = args.width.unwrap_or_else(|| frame_extent(corrs.iter().map(|c| (c.p1.x, c.p2.x))));
        let extent_h = args.height.unwrap_or_else(|| frame_extent(corrs.iter().map(|c| (c.p1.y, c.p2.y))));
        let colors = match &four_way_labels {
            Some(fw) => svg::colors_from_four_way(fw),
            None => svg::colors_from_labels(&labels),
        };
        let overlay =
            svg::render_overlay(&corrs, &colors, &pentagon_outlines, extent_w, extent_h);
        atomic_write(svg_path, overlay.as_bytes())?;
        manifest.output(svg_path);
    }

    let manifest_path = manifest.write(&args.out_dir)?;
    let inliers = labels.iter().filter(|l| l.is_inlier()).count();
    println!(
        "{inliers}/{} inliers at {tol} px; wrote {} and {}",
        labels.len(),
        labels_path.display(),
        manifest_path.display()
    );
    Ok(())
}

fn frame_extent(values: impl Iterator<Item = (f64, f64)>) -> f64 {
    let max = values
        .flat_map(|(a, b)| [a, b])
        .fold(0.0f64, f64::max);
    (max + 10.0).ceil()
}

// ---------------------------------------------------------------------------
// bench

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let kv = Kv::load(args.config.as_deref())?;
    let methods: Vec<Method> = args
        .methods
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_, String>>()
        .map_err(CliError::Usage)?;
    if methods.is_empty() {
        return Err(CliError::Usage("no methods selected".into()));
    }

    let (report, source, seed) = if let Some(sweep_path) = &args.synthetic {
        let text = std::fs::read_to_string(sweep_path)
            .map_err(|e| CliError::Io(format!("{}: {e}", sweep_path.display())))?;
        let mut sweep: SweepConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Io(format!("{}: {e}", sweep_path.display())))?;
        if let Some(seed) = args.seed {
            sweep.seed = seed;
        }
        let report = bench::run_synthetic(&sweep, &methods, args.repeats);
        (report, sweep_path.clone(), sweep.seed)
    } else {
        let root = args.dataset.as_ref().expect("clap enforces the group");
        let seed: u64 = resolve(args.seed, &kv, "seed", 0)?;
        let opts = DatasetOptions {
            width: resolve(args.width, &kv, "width", 640.0)?,
            height: resolve(args.height, &kv, "height", 480.0)?,
            min_conf: match args.min_conf {
                Some(v) => Some(v),
                None => kv.get::<f64>("min_conf")?,
            },
            seed,
            thresholds: vec![3.0, 5.0, 10.0],
        };
        let mut sweep = SweepConfig {
            seed,
            ..Default::default()
        };
        sweep.grid_n = resolve(None, &kv, "grid_n", sweep.grid_n)?;
        sweep.cr_th = resolve(None, &kv, "cr_th", sweep.cr_th)?;
        sweep.k_p = resolve(None, &kv, "kp", sweep.k_p)?;
        sweep.inlier_tol = resolve(None, &kv, "inlier_tol", sweep.inlier_tol)?;
        sweep.min_support = resolve(None, &kv, "min_support", sweep.min_support)?;
        let report = match bench::run_dataset(root, &opts, &sweep, &methods, args.repeats) {
            Ok(report) => report,
            Err(bench::BenchError::EmptyDataset) => {
                return Err(CliError::NoMatch("no sequences found".into()))
            }
            Err(bench::BenchError::Format(e)) => return Err(CliError::Io(e.to_string())),
            Err(bench::BenchError::Io(e)) => return Err(CliError::Io(e.to_string())),
        };
        (report, root.clone(), seed)
    };

    let mut manifest = RunManifest::new(
        "bench",
        seed,
        json!({
            "source": source.display().to_string(),
            "methods": methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
            "repeats": args.repeats,
        }),
    );
    manifest.input(&source);

    let json_path = args.out_dir.join("report.json");
    let mut body = serde_json::to_string_pretty(&report).expect("report serialize");
    body.push('\n');
    atomic_write(&json_path, body.as_bytes())?;
    manifest.output(&json_path);

    let text = bench::render_text_report(&report);
    let text_path = args.out_dir.join("report.txt");
    atomic_write(&text_path, text.as_bytes())?;
    manifest.output(&text_path);
    manifest.write(&args.out_dir)?;

    print!("{text}");
    Ok(())
}

// ---------------------------------------------------------------------------
// synth

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let kv = Kv::load(args.config.as_deref())?;
    let cfg = SyntheticSceneConfig {
        width: resolve(args.width, &kv, "width", 640.0)?,
        height: resolve(args.height, &kv, "height", 480.0)?,
        n_inliers: resolve(args.inliers, &kv, "inliers", 200)?,
        n_outliers: resolve(args.outliers, &kv, "outliers", 0)?,
        noise_sigma: resolve(args.sigma, &kv, "sigma", 0.0)?,
        n_planes: resolve(args.planes, &kv, "planes", 1)?,
        homography_magnitude: resolve(args.magnitude, &kv, "magnitude", 1.0)?,
        seed: resolve(args.seed, &kv, "seed", 0)?,
    };
    if cfg.n_planes != 1 && cfg.n_planes != 2 {
        return Err(CliError::Usage("--planes must be 1 or 2".into()));
    }
    if cfg.n_inliers + cfg.n_outliers < 5 {
        return Err(CliError::Usage(
            "need at least 5 correspondences in total".into(),
        ));
    }

    let scene = synth_scene(&cfg);

    let mut manifest = RunManifest::new(
        "synth",
        cfg.seed,
        json!({
            "width": cfg.width,
            "height": cfg.height,
            "inliers": cfg.n_inliers,
            "outliers": cfg.n_outliers,
            "sigma": cfg.noise_sigma,
            "planes": cfg.n_planes,
            "magnitude": cfg.homography_magnitude,
        }),
    );

    let csv_path = args.out_dir.join("matches.csv");
    atomic_write(
        &csv_path,
        io::correspondences_to_csv(&scene.correspondences).as_bytes(),
    )?;
    manifest.output(&csv_path);

    for (i, h) in scene.homographies.iter().enumerate() {
        let path = args.out_dir.join(format!("H_plane_{i}.txt"));
        atomic_write(&path, io::homography_to_text(h).as_bytes())?;
        manifest.output(&path);
    }

    let mut planted = String::from("corr_id,label,plane\n");
    for (i, label) in scene.labels.iter().enumerate() {
        match label {
            PlantedLabel::Inlier { plane } => {
                let _ = writeln!(planted, "{i},inlier,{plane}");
            }
            PlantedLabel::Outlier => {
                let _ = writeln!(planted, "{i},outlier,");
            }
        }
    }
    let planted_path = args.out_dir.join("planted.csv");
    atomic_write(&planted_path, planted.as_bytes())?;
    manifest.output(&planted_path);
    let manifest_path = manifest.write(&args.out_dir)?;

    println!(
        "wrote {} correspondences ({} planes) to {} (+{})",
        scene.correspondences.len(),
        scene.homographies.len(),
        csv_path.display(),
        manifest_path.display()
    );
    Ok(())
}
