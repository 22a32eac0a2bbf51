//! Files written by `run` and `reproduce`.
//!
//! Curve CSVs have the fixed header `iteration,mse_db_raw,mse_db_smoothed`,
//! one row per iteration starting at 0. Floats use the shortest
//! representation that parses back to the same `f64`, so identical results
//! give identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use flaf_core::{Algorithm, ExperimentConfig, ExperimentResult, MseCurve};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const CURVE_HEADER: [&str; 3] = ["iteration", "mse_db_raw", "mse_db_smoothed"];
pub const CHART_FILE: &str = "learning_curves.svg";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const WEIGHTS_FILE: &str = "weights.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

pub fn curve_file_name(algorithm: Algorithm) -> String {
    format!("{}.csv", algorithm.name())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub iteration: u64,
    pub mse_db_raw: f64,
    pub mse_db_smoothed: f64,
}

pub fn curve_rows(curve: &MseCurve) -> Vec<CurveRow> {
    curve
        .raw_db
        .iter()
        .zip(&curve.smoothed_db)
        .enumerate()
        .map(|(i, (&raw, &smoothed))| CurveRow {
            iteration: i as u64,
            mse_db_raw: raw,
            mse_db_smoothed: smoothed,
        })
        .collect()
}

pub fn write_curve_csv<W: std::io::Write>(rows: &[CurveRow], sink: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(CURVE_HEADER)?;
    for row in rows {
        writer.write_record([
            row.iteration.to_string(),
            row.mse_db_raw.to_string(),
            row.mse_db_smoothed.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_curve_csv<R: std::io::Read>(source: R) -> Result<Vec<CurveRow>, String> {
    let mut reader = csv::Reader::from_reader(source);
    let header = reader.headers().map_err(|e| e.to_string())?;
    if header.iter().ne(CURVE_HEADER) {
        return Err(format!("unexpected header {header:?}"));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        let field = |i: usize| record.get(i).ok_or_else(|| format!("short row {record:?}"));
        rows.push(CurveRow {
            iteration: field(0)?.parse().map_err(|e| format!("iteration: {e}"))?,
            mse_db_raw: field(1)?.parse().map_err(|e| format!("mse_db_raw: {e}"))?,
            mse_db_smoothed: field(2)?.parse().map_err(|e| format!("mse_db_smoothed: {e}"))?,
        });
    }
    Ok(rows)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Writes `bytes` next to `path` and renames over it, so readers never see
/// a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    write_file(&tmp, bytes)?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Hex SHA-256 of the effective config, after scaling and seed overrides.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(format!("{cfg:?}").as_bytes()))
}

pub struct RunArtifacts {
    pub curve_files: Vec<PathBuf>,
    pub chart: PathBuf,
    pub manifest: PathBuf,
    pub weights: Option<PathBuf>,
}

/// Writes curves, chart, optional weights and, last, the manifest.
pub fn write_run(
    out_dir: &Path,
    cfg: &ExperimentConfig,
    result: &ExperimentResult,
    weights: bool,
    elapsed: Duration,
) -> Result<RunArtifacts> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;

    let mut curve_files = Vec::new();
    for curve in &result.curves {
        let path = out_dir.join(curve_file_name(curve.algorithm));
        let mut bytes = Vec::new();
        write_curve_csv(&curve_rows(curve), &mut bytes).map_err(|e| CliError::io(&path, std::io::Error::other(e)))?;
        write_file(&path, &bytes)?;
        curve_files.push(path);
    }

    let chart = out_dir.join(CHART_FILE);
    write_file(&chart, render_svg(result).as_bytes())?;

    let weights = if weights {
        let path = out_dir.join(WEIGHTS_FILE);
        let mut bytes = Vec::new();
        write_weights_csv(result, &mut bytes).map_err(|e| CliError::io(&path, std::io::Error::other(e)))?;
        write_file(&path, &bytes)?;
        Some(path)
    } else {
        None
    };

    let manifest = out_dir.join(MANIFEST_FILE);
    let mut text = String::new();
    let _ = writeln!(text, "config_hash = sha256:{}", config_hash(cfg));
    let _ = writeln!(text, "tool_version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(text, "experiment = {}", cfg.name);
    let _ = writeln!(text, "base_seed = {}", cfg.base_seed);
    let _ = writeln!(text, "n_runs = {}", cfg.n_runs);
    let _ = writeln!(text, "n_iterations = {}", cfg.n_iterations);
    let _ = writeln!(text, "m_taps = {}", cfg.params.m_taps);
    for (curve, path) in result.curves.iter().zip(&curve_files) {
        let _ = writeln!(text, "curve.{} = {}", curve.algorithm.name(), file_name(path));
    }
    let _ = writeln!(text, "chart = {}", file_name(&chart));
    if let Some(path) = &weights {
        let _ = writeln!(text, "weights = {}", file_name(path));
    }
    let _ = writeln!(text, "duration_s = {:.3}", elapsed.as_secs_f64());
    write_atomic(&manifest, text.as_bytes())?;

    Ok(RunArtifacts {
        curve_files,
        chart,
        manifest,
        weights,
    })
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Final weights of run 0, long format: `algorithm,vector,index,value`.
pub fn write_weights_csv<W: std::io::Write>(result: &ExperimentResult, sink: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["algorithm", "vector", "index", "value"])?;
    for curve in &result.curves {
        for vector in &curve.final_weights {
            for (i, v) in vector.values.iter().enumerate() {
                writer.write_record([curve.algorithm.name(), vector.name, &i.to_string(), &v.to_string()])?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"];
const MAX_POINTS: usize = 1000;

/// Smoothed learning curves on shared axes: iteration against MSE in dB.
pub fn render_svg(result: &ExperimentResult) -> String {
    let (width, height) = (800.0, 500.0);
    let (left, right, top, bottom) = (70.0, 180.0, 30.0, 50.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;

    let n = result.curves.iter().map(MseCurve::len).max().unwrap_or(0).max(2);
    let finite = result
        .curves
        .iter()
        .flat_map(|c| c.smoothed_db.iter().copied())
        .filter(|v| v.is_finite());
    let (mut lo, mut hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (-1.0, 1.0);
    }
    lo = (lo / 5.0).floor() * 5.0;
    hi = ((hi / 5.0).ceil() * 5.0).max(lo + 5.0);

    let sx = |i: usize| left + plot_w * i as f64 / (n - 1) as f64;
    let sy = |v: f64| top + plot_h * (hi - v.clamp(lo, hi)) / (hi - lo);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="18" text-anchor="middle">{} ({} runs)</text>"#,
        left + plot_w / 2.0,
        escape(&result.name),
        result.n_runs
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    let mut db = lo;
    while db <= hi + 1e-9 {
        let y = sy(db);
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">{db}</text>"##,
            left + plot_w,
            left - 6.0,
            y + 4.0
        );
        db += if hi - lo > 40.0 { 10.0 } else { 5.0 };
    }
    for k in 0..=4 {
        let i = (n - 1) * k / 4;
        let x = sx(i);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{}" text-anchor="middle">{i}</text>"#,
            top + plot_h + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">iteration</text>"#,
        left + plot_w / 2.0,
        height - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">MSE (dB)</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    );

    for (k, curve) in result.curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        // Dashed so it stays visible on top of the identical TFLAF curve.
        let dash = if curve.algorithm == Algorithm::SinglePhiTflaf {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let stride = curve.len().div_ceil(MAX_POINTS).max(1);
        let mut points = String::new();
        for (i, v) in curve.smoothed_db.iter().enumerate() {
            if (i % stride == 0 || i + 1 == curve.len()) && v.is_finite() {
                let _ = write!(points, "{:.1},{:.1} ", sx(i), sy(*v));
            }
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2"{dash} points="{}"/>"#,
            points.trim_end()
        );
        let ly = top + 10.0 + 20.0 * k as f64;
        let lx = left + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(curve.algorithm.label())
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Steady-state table plus every pairwise gap, `row − column` in dB.
pub fn render_summary(result: &ExperimentResult) -> String {
    let mut text = String::new();
    let _ = writeln!(
        text,
        "experiment {}: {} runs, steady state over the last {} iterations",
        result.name, result.n_runs, result.steady_state_window
    );
    let _ = writeln!(text);
    let _ = writeln!(text, "{:<18} {:>12} {:>10}", "algorithm", "mse_db", "stderr_db");
    let states: Vec<_> = result
        .curves
        .iter()
        .map(|c| (c.algorithm, result.steady_state(c.algorithm)))
        .collect();
    for (alg, state) in &states {
        match state {
            Some(s) => {
                let _ = writeln!(text, "{:<18} {:>12.3} {:>10.3}", alg.name(), s.mse_db, s.std_error_db);
            }
            None => {
                let _ = writeln!(text, "{:<18} {:>12} {:>10}", alg.name(), "n/a", "n/a");
            }
        }
    }
    if let Some((best, _)) = states
        .iter()
        .filter_map(|(a, s)| s.map(|s| (*a, s.mse_db)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
    {
        let _ = writeln!(text);
        let _ = writeln!(text, "lowest: {}", best.name());
    }
    let _ = writeln!(text);
    let _ = writeln!(text, "pairwise gaps (row - column, dB)");
    let _ = write!(text, "{:<18}", "");
    for (alg, _) in &states {
        let _ = write!(text, " {:>16}", alg.name());
    }
    let _ = writeln!(text);
    for (row, rs) in &states {
        let _ = write!(text, "{:<18}", row.name());
        for (_, cs) in &states {
            match (rs, cs) {
                (Some(r), Some(c)) => {
                    let _ = write!(text, " {:>16.3}", r.mse_db - c.mse_db);
                }
                _ => {
                    let _ = write!(text, " {:>16}", "n/a");
                }
            }
        }
        let _ = writeln!(text);
    }
    text
}

pub fn write_summary(out_dir: &Path, result: &ExperimentResult) -> Result<PathBuf> {
    let path = out_dir.join(SUMMARY_FILE);
    write_file(&path, render_summary(result).as_bytes())?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve(raw: Vec<f64>) -> MseCurve {
        MseCurve {
            algorithm: Algorithm::Lms,
            smoothed_db: flaf_core::moving_average(&raw, 2),
            raw_db: raw,
            run_steady_state: vec![],
            final_weights: vec![],
        }
    }

    #[test]
    fn csv_layout() {
        let mut bytes = Vec::new();
        write_curve_csv(&curve_rows(&curve(vec![-1.5, 0.1])), &mut bytes).unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "iteration,mse_db_raw,mse_db_smoothed\n0,-1.5,-1.5\n1,0.1,-0.7\n"
        );
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(read_curve_csv("iter,a,b\n0,1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn svg_has_one_polyline_per_curve() {
        let result = ExperimentResult {
            name: "t<1>".into(),
            n_runs: 3,
            steady_state_window: 1,
            curves: vec![curve(vec![0.0, -3.0, -6.0]), curve(vec![1.0, 2.0, f64::NAN])],
        };
        let svg = render_svg(&result);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("t&lt;1&gt;"));
        assert!(svg.ends_with("</svg>\n"));
    }

    proptest! {
        #[test]
        fn csv_round_trips_bit_exact(values in prop::collection::vec((any::<f64>(), any::<f64>()), 0..50)) {
            let rows: Vec<CurveRow> = values
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| CurveRow { iteration: i as u64, mse_db_raw: a, mse_db_smoothed: b })
                .collect();
            let mut bytes = Vec::new();
            write_curve_csv(&rows, &mut bytes).unwrap();
            let back = read_curve_csv(bytes.as_slice()).unwrap();
            prop_assert_eq!(back.len(), rows.len());
            for (x, y) in rows.iter().zip(&back) {
                prop_assert_eq!(x.iteration, y.iteration);
                prop_assert!(x.mse_db_raw.to_bits() == y.mse_db_raw.to_bits()
                    || (x.mse_db_raw.is_nan() && y.mse_db_raw.is_nan()));
                prop_assert!(x.mse_db_smoothed.to_bits() == y.mse_db_smoothed.to_bits()
                    || (x.mse_db_smoothed.is_nan() && y.mse_db_smoothed.is_nan()));
            }
        }
    }
}
