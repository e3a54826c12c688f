use estimkit::npdensity::{joint_density_np, marginal_density_np, DensityCurve, DensitySurface};
use estimkit::series::{Axis, EmpiricalCdf};

use crate::args::{AxisArg, DensityNpArgs, OutputFormat};
use crate::error::CliError;
use crate::io::{fmt_sig, ingest_pairs, to_json_pretty};

use super::{resolve_axis, resolve_grid2, sink};

pub fn run(args: &DensityNpArgs) -> Result<(), CliError> {
    let pairs = ingest_pairs(&args.input)?;
    let cdf = EmpiricalCdf::from_pairs(&pairs);

    let content = match args.marginal {
        Some(axis_arg) => {
            let axis: Axis = axis_arg.into();
            let grid = match axis {
                Axis::X => {
                    resolve_axis(pairs.xs(), args.grid.x_min, args.grid.x_max, args.grid.dx)?
                }
                Axis::Y => {
                    resolve_axis(pairs.ys(), args.grid.y_min, args.grid.y_max, args.grid.dy)?
                }
            };
            let mut curve = marginal_density_np(&cdf, axis, &grid);
            if args.normalize {
                curve = curve.normalize()?;
            }
            render_curve(&curve, axis_arg, args.format)
        }
        None => {
            let grid = resolve_grid2(pairs.xs(), pairs.ys(), &args.grid)?;
            let mut surface = joint_density_np(&cdf, &grid);
            if args.normalize {
                surface = surface.normalize()?;
            }
            render_surface(&surface, args.format)
        }
    };
    sink(args.output.as_deref(), &content)
}

pub(super) fn render_curve(curve: &DensityCurve, axis: AxisArg, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let var = match axis {
                AxisArg::X => "x",
                AxisArg::Y => "y",
            };
            let mut out = format!("{var},density\n");
            for (i, v) in curve.values.iter().enumerate() {
                out.push_str(&format!(
                    "{},{}\n",
                    fmt_sig(curve.grid.knot(i)),
                    fmt_sig(*v)
                ));
            }
            out
        }
        OutputFormat::Json => to_json_pretty(curve),
    }
}

pub(super) fn render_surface(surface: &DensitySurface, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let ny = surface.grid.y.len();
            let mut out = String::from("x,y,density\n");
            for (idx, v) in surface.values.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    fmt_sig(surface.grid.x.knot(idx / ny)),
                    fmt_sig(surface.grid.y.knot(idx % ny)),
                    fmt_sig(*v)
                ));
            }
            out
        }
        OutputFormat::Json => to_json_pretty(surface),
    }
}
