//! Subcommand implementations.

use std::path::Path;

use estimkit::grid::{Grid1d, Grid2d};

use crate::args::{Cli, Command, GridArgs};
use crate::error::CliError;
use crate::io::write_atomic;

mod compare;
mod density_fit;
mod density_np;
mod simulate;
mod vol;
mod volvol;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Vol(args) => vol::run(&args),
        Command::Volvol(args) => volvol::run(&args),
        Command::DensityNp(args) => density_np::run(&args),
        Command::DensityFit(args) => density_fit::run(&args),
        Command::Simulate(args) => simulate::run(&args),
        Command::Compare(args) => compare::run(&args),
    }
}

/// Write to the file when given, stdout otherwise.
fn sink(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn data_range(values: &[f64]) -> (f64, f64) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

/// Resolve one axis of the evaluation lattice: explicit flags win, the
/// sample range fills the rest, and the default step is range/50.
fn resolve_axis(
    samples: &[f64],
    min_flag: Option<f64>,
    max_flag: Option<f64>,
    step_flag: Option<f64>,
) -> Result<Grid1d, CliError> {
    let (lo, hi) = data_range(samples);
    let min = min_flag.unwrap_or(lo);
    let max = max_flag.unwrap_or(hi);
    let step = step_flag.unwrap_or((max - min) / 50.0);
    Ok(Grid1d::new(min, max, step)?)
}

fn resolve_grid2(xs: &[f64], ys: &[f64], grid: &GridArgs) -> Result<Grid2d, CliError> {
    Ok(Grid2d {
        x: resolve_axis(xs, grid.x_min, grid.x_max, grid.dx)?,
        y: resolve_axis(ys, grid.y_min, grid.y_max, grid.dy)?,
    })
}
