use serde::Serialize;

use estimkit::volatility::{vol_series, VolSeries};

use crate::args::{OutputFormat, VolArgs};
use crate::error::CliError;
use crate::io::{fmt_sig, ingest_prices, to_json_pretty};

use super::sink;

#[derive(Serialize)]
struct VolPayload<'a> {
    values: &'a [f64],
    start_index: usize,
    dt: f64,
    annualized: bool,
}

pub fn run(args: &VolArgs) -> Result<(), CliError> {
    let prices = ingest_prices(&args.input, args.dt)?;
    if !prices.has_uniform_spacing() {
        eprintln!(
            "warning: timestamps in {} are not uniformly spaced; the estimator treats steps as equal",
            args.input.display()
        );
    }
    let series = vol_series(&prices);
    let (values, annualized) = displayed_values(&series, args.annualized);

    let content = match args.format {
        OutputFormat::Csv => {
            let column = if annualized { "v_annualized" } else { "v" };
            let mut out = format!("t,{column}\n");
            for (i, v) in values.iter().enumerate() {
                out.push_str(&format!("{},{}\n", series.start_index + i, fmt_sig(*v)));
            }
            out
        }
        OutputFormat::Json => to_json_pretty(&VolPayload {
            values: &values,
            start_index: series.start_index,
            dt: series.dt,
            annualized,
        }),
    };
    sink(args.output.as_deref(), &content)
}

fn displayed_values(series: &VolSeries, annualized: bool) -> (Vec<f64>, bool) {
    if annualized {
        let scale = (1.0 / series.dt).sqrt();
        (series.values.iter().map(|v| v * scale).collect(), true)
    } else {
        (series.values.clone(), false)
    }
}
