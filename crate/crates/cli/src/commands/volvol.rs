use std::path::Path;

use estimkit::volatility::{vol_series, volvol_series, VolSeries};

use crate::args::{OutputFormat, VolvolArgs};
use crate::error::CliError;
use crate::io::{fmt_sig, ingest_prices, read_to_string, to_json_pretty};

use super::sink;

pub fn run(args: &VolvolArgs) -> Result<(), CliError> {
    let vols = if args.from_vols {
        parse_vols(&args.input, args.dt)?
    } else {
        let prices = ingest_prices(&args.input, args.dt)?;
        if !prices.has_uniform_spacing() {
            eprintln!(
                "warning: timestamps in {} are not uniformly spaced; the estimator treats steps as equal",
                args.input.display()
            );
        }
        vol_series(&prices)
    };
    let mut gamma = volvol_series(&vols, args.mode)?;
    if let Some(window) = args.window {
        gamma = gamma.rolling_mean(window)?;
    }

    let content = match args.format {
        OutputFormat::Csv => {
            let mut out = String::from("t,gamma,mode\n");
            for (t, g) in gamma.steps.iter().zip(&gamma.values) {
                out.push_str(&format!("{t},{},{}\n", fmt_sig(*g), gamma.mode));
            }
            out
        }
        OutputFormat::Json => to_json_pretty(&gamma),
    };
    sink(args.output.as_deref(), &content)
}

/// Read a `t,v` file as produced by the `vol` subcommand.
fn parse_vols(path: &Path, dt: Option<f64>) -> Result<VolSeries, CliError> {
    let content = read_to_string(path)?;
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim().eq_ignore_ascii_case("t,v") => {}
        _ => {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line: 1,
                message: "expected header `t,v` (output of the vol subcommand)".into(),
            })
        }
    }
    let mut start_index = 0usize;
    let mut values = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let (t_cell, v_cell) = match (cells.next(), cells.next(), cells.next()) {
            (Some(t), Some(v), None) => (t.trim(), v.trim()),
            _ => {
                return Err(CliError::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: "expected two comma-separated columns".into(),
                })
            }
        };
        let t: usize = t_cell.parse().map_err(|_| CliError::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message: format!("bad step index `{t_cell}`"),
        })?;
        let v: f64 = v_cell
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| CliError::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("bad volatility `{v_cell}`"),
            })?;
        if values.is_empty() {
            start_index = t;
        }
        values.push(v);
    }
    Ok(VolSeries {
        values,
        start_index,
        dt: dt.unwrap_or(1.0),
    })
}
