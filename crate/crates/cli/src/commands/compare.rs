use serde::Serialize;

use estimkit::npdensity::joint_density_np;
use estimkit::series::EmpiricalCdf;
use estimkit::synthlab::analytic::TruthDensity;
use estimkit::synthlab::{error_report_surface, kde_surface, ErrorReport};

use crate::args::CompareArgs;
use crate::error::CliError;
use crate::io::{ingest_pairs, to_json_pretty, write_atomic};

use super::resolve_grid2;

#[derive(Serialize)]
struct ComparePayload {
    truth: &'static str,
    np: ErrorReport,
    kde: ErrorReport,
    mise_ratio: f64,
}

pub fn run(args: &CompareArgs) -> Result<(), CliError> {
    let pairs = ingest_pairs(&args.input)?;
    let grid = resolve_grid2(pairs.xs(), pairs.ys(), &args.grid)?;
    let cdf = EmpiricalCdf::from_pairs(&pairs);

    // Both estimates are normalized before scoring: the comparison is
    // between usable densities, not raw estimator output.
    let np = joint_density_np(&cdf, &grid).normalize()?;
    let kde = kde_surface(&pairs, args.bandwidth, &grid)?.normalize()?;

    let truth = args.truth;
    let np_report = error_report_surface(&np, |x, y| truth.density(x, y), &grid)?;
    let kde_report = error_report_surface(&kde, |x, y| truth.density(x, y), &grid)?;
    let mise_ratio = np_report.mise / kde_report.mise;

    println!("truth: {}", truth_name(truth));
    println!(
        "{:<12} {:>12} {:>12} {:>12} {:>12}",
        "estimator", "mae", "rmse", "mise", "sup"
    );
    for report in [&np_report, &kde_report] {
        println!(
            "{:<12} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e}",
            report.estimator, report.mae, report.rmse, report.mise, report.sup_error
        );
    }
    println!("mise ratio (np/kde): {mise_ratio:.4}");

    if let Some(path) = &args.output {
        let payload = ComparePayload {
            truth: truth_name(truth),
            np: np_report,
            kde: kde_report,
            mise_ratio,
        };
        write_atomic(path, &to_json_pretty(&payload))?;
    }
    Ok(())
}

fn truth_name(truth: TruthDensity) -> &'static str {
    match truth {
        TruthDensity::StandardNormal => "standard-normal",
        TruthDensity::UniformSquare => "uniform",
    }
}
