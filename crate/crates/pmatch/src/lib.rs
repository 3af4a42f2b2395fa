//! File formats, benchmark harness, SVG overlays and the `pmatch` CLI on top
//! of [`pmatch_core`].
//!
//! Formats:
//! - correspondence CSV: header `x1,y1,x2,y2` or `x1,y1,x2,y2,conf`, one
//!   match per line;
//! - homography text: 3 lines × 3 whitespace-separated decimals, row-major
//!   (compatible with HPatches `H_1_x` ground-truth files);
//! - `groups.json`: array of planar groups with member pentagons, fitted
//!   homography, hull fraction and support;
//! - `labels.csv`, four-way summary JSON, benchmark reports (JSON + text).

pub mod bench;
pub mod cli;
pub mod hpatches;
pub mod io;
pub mod manifest;
pub mod svg;

pub use pmatch_core as core;
