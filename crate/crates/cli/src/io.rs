//! CSV ingestion and emission plus atomic file writes.
//!
//! Two formatting regimes, both deterministic:
//! - series data (prices, sample pairs) round-trips bit-exactly, using
//!   Rust's shortest-round-trip float formatting, so emit-then-ingest is the
//!   identity on valid files;
//! - estimator outputs (volatilities, densities, reports) are fixed at 12
//!   significant digits, enough for reproducible goldens without binary
//!   dumps.

use std::io::Write;
use std::path::Path;

use chrono::DateTime;
use estimkit::series::{PriceSeries, SamplePairs};

use crate::error::CliError;

/// Format with 12 significant digits. Plain decimal notation in the range
/// a spreadsheet handles comfortably, scientific outside it.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Write through a temporary file in the target directory and rename into
/// place, so a failed run never leaves a partial output file.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let io_err = |source: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(io_err)?;
    tmp.write_all(content.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn split2(line: &str) -> Option<(&str, &str)> {
    let mut parts = line.split(',');
    let a = parts.next()?;
    let b = parts.next()?;
    if parts.next().is_some() {
        return None;
    }
    Some((a.trim(), b.trim()))
}

/// Parse a timestamp cell: integer/decimal bar index, or an ISO-8601 /
/// RFC 3339 instant converted to epoch seconds.
fn parse_timestamp(cell: &str) -> Option<f64> {
    if let Ok(v) = cell.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(cell) {
        let nanos = dt.timestamp_subsec_nanos() as f64;
        return Some(dt.timestamp() as f64 + nanos * 1e-9);
    }
    None
}

/// Parse `timestamp,price` CSV content. `origin` names the source in errors.
pub fn parse_prices(content: &str, origin: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim().eq_ignore_ascii_case("timestamp,price") => {}
        _ => {
            return Err(CliError::Parse {
                path: origin.to_path_buf(),
                line: 1,
                message: "expected header `timestamp,price`".into(),
            })
        }
    }
    let mut timestamps = Vec::new();
    let mut prices = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (t_cell, p_cell) = split2(line).ok_or_else(|| CliError::Parse {
            path: origin.to_path_buf(),
            line: line_no,
            message: "expected two comma-separated columns".into(),
        })?;
        let t = parse_timestamp(t_cell).ok_or_else(|| CliError::Parse {
            path: origin.to_path_buf(),
            line: line_no,
            message: format!("bad timestamp `{t_cell}`"),
        })?;
        let p: f64 = p_cell.parse().map_err(|_| CliError::Parse {
            path: origin.to_path_buf(),
            line: line_no,
            message: format!("bad price `{p_cell}`"),
        })?;
        if !p.is_finite() || p <= 0.0 {
            return Err(CliError::NonPositivePrice {
                path: origin.to_path_buf(),
                line: line_no,
                value: p,
            });
        }
        timestamps.push(t);
        prices.push(p);
    }
    Ok((timestamps, prices))
}

/// Median spacing of a sorted timestamp sequence, the inferred `dt` when no
/// override is given.
pub fn median_spacing(timestamps: &[f64]) -> Option<f64> {
    if timestamps.len() < 2 {
        return None;
    }
    let mut gaps: Vec<f64> = timestamps.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some(gaps[gaps.len() / 2])
}

/// Read and validate a price series; `dt` falls back to the median spacing.
pub fn ingest_prices(path: &Path, dt_override: Option<f64>) -> Result<PriceSeries, CliError> {
    let content = read_to_string(path)?;
    let (timestamps, prices) = parse_prices(&content, path)?;
    let dt = match dt_override {
        Some(dt) => dt,
        None => median_spacing(&timestamps).unwrap_or(1.0),
    };
    Ok(PriceSeries::new(timestamps, prices, dt)?)
}

/// Parse `x,y` CSV content into sample pairs.
pub fn parse_pairs(content: &str, origin: &Path) -> Result<SamplePairs, CliError> {
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim().eq_ignore_ascii_case("x,y") => {}
        _ => {
            return Err(CliError::Parse {
                path: origin.to_path_buf(),
                line: 1,
                message: "expected header `x,y`".into(),
            })
        }
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (x_cell, y_cell) = split2(line).ok_or_else(|| CliError::Parse {
            path: origin.to_path_buf(),
            line: line_no,
            message: "expected two comma-separated columns".into(),
        })?;
        let parse = |cell: &str| -> Result<f64, CliError> {
            cell.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Parse {
                    path: origin.to_path_buf(),
                    line: line_no,
                    message: format!("bad number `{cell}`"),
                })
        };
        xs.push(parse(x_cell)?);
        ys.push(parse(y_cell)?);
    }
    Ok(SamplePairs::new(xs, ys)?)
}

pub fn ingest_pairs(path: &Path) -> Result<SamplePairs, CliError> {
    let content = read_to_string(path)?;
    parse_pairs(&content, path)
}

/// `timestamp,price` emission; bit-exact round trip with [`parse_prices`].
pub fn emit_prices(series: &PriceSeries) -> String {
    let mut out = String::from("timestamp,price\n");
    for (t, p) in series.timestamps().iter().zip(series.prices()) {
        out.push_str(&format!("{t},{p}\n"));
    }
    out
}

/// `x,y` emission; bit-exact round trip with [`parse_pairs`].
pub fn emit_pairs(pairs: &SamplePairs) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in pairs.xs().iter().zip(pairs.ys()) {
        out.push_str(&format!("{x},{y}\n"));
    }
    out
}

/// Pretty JSON plus trailing newline for any serializable payload.
pub fn to_json_pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Resolve the run seed: explicit flag, else config value, else the
/// ESTIMKIT_SEED environment variable, else 0.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(s) = config {
        return Ok(s);
    }
    match std::env::var("ESTIMKIT_SEED") {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| CliError::Config(format!("ESTIMKIT_SEED must be an integer, got `{v}`"))),
        Err(_) => Ok(0),
    }
}
