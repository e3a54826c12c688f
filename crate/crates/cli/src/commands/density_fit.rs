use estimkit::npdensity::joint_density_np;
use estimkit::paramdensity::{fit_surface, Poly1d};
use estimkit::series::{Axis, EmpiricalCdf};

use crate::args::DensityFitArgs;
use crate::error::CliError;
use crate::io::{ingest_pairs, to_json_pretty, write_atomic};

use super::resolve_grid2;

pub fn run(args: &DensityFitArgs) -> Result<(), CliError> {
    let pairs = ingest_pairs(&args.input)?;
    let cdf = EmpiricalCdf::from_pairs(&pairs);
    let grid = resolve_grid2(pairs.xs(), pairs.ys(), &args.grid)?;
    let targets = joint_density_np(&cdf, &grid);
    let fit = fit_surface(&targets, args.order)?;

    println!("{}", fit.formula());
    println!(
        "order {} | {} targets | r^2 {:.6} | rmse {:.6e} | condition {:.3e}",
        fit.order,
        fit.fit_report.n_points,
        fit.fit_report.r_squared,
        fit.fit_report.rmse,
        fit.fit_report.condition_estimate
    );

    if let Some(axis_arg) = args.marginal {
        let axis: Axis = axis_arg.into();
        // Marginal of this axis: integrate the other one out.
        let poly = fit.marginal_by_integration(match axis {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        });
        println!("{}", format_poly1(&poly));
    }

    if let Some(spec) = &args.conditional {
        let (given, value) = parse_conditional(spec)?;
        let poly = fit.conditional_density(given, value)?;
        println!(
            "{} | given {}={}",
            format_poly1(&poly),
            axis_name(given),
            value
        );
    }

    if let Some(spec) = &args.cdf {
        let (x, y) = parse_point(spec)?;
        if !fit.domain.contains(x, y) {
            eprintln!(
                "warning: ({x}, {y}) lies outside the fitted domain; the polynomial still evaluates"
            );
        }
        println!("F({x},{y}) = {:.12}", fit.cumulative(x, y));
    }

    if let Some(path) = &args.output {
        write_atomic(path, &to_json_pretty(&fit))?;
    }
    Ok(())
}

fn axis_name(axis: Axis) -> &'static str {
    match axis {
        Axis::X => "x",
        Axis::Y => "y",
    }
}

fn parse_conditional(spec: &str) -> Result<(Axis, f64), CliError> {
    let bad = || {
        CliError::Config(format!(
            "conditional must look like `y=0.25` or `x=-1`, got `{spec}`"
        ))
    };
    let (axis, value) = spec.split_once('=').ok_or_else(bad)?;
    let axis = match axis.trim() {
        "x" | "X" => Axis::X,
        "y" | "Y" => Axis::Y,
        _ => return Err(bad()),
    };
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    Ok((axis, value))
}

fn parse_point(spec: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Config(format!("cdf point must look like `0.5,0.5`, got `{spec}`"));
    let (x, y) = spec.split_once(',').ok_or_else(bad)?;
    Ok((
        x.trim().parse().map_err(|_| bad())?,
        y.trim().parse().map_err(|_| bad())?,
    ))
}

fn format_poly1(poly: &Poly1d) -> String {
    let var = axis_name(poly.variable);
    let mut parts: Vec<String> = Vec::new();
    for (d, &c) in poly.coefficients.iter().enumerate() {
        if parts.is_empty() && d == 0 {
            parts.push(format!("{c:.3}"));
            continue;
        }
        if c.abs() < 5e-4 {
            continue;
        }
        let term = match d {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{d}"),
        };
        let sign = if c < 0.0 { " - " } else { " + " };
        parts.push(format!("{sign}{:.3}{term}", c.abs()));
    }
    format!("f_{}({var}) = {}", var.to_uppercase(), parts.concat())
}
