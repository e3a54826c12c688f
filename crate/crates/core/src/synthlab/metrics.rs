//! Error metrics between a gridded estimate and an analytic truth.

use serde::Serialize;

use crate::grid::{Grid1d, Grid2d};
use crate::npdensity::{DensityCurve, DensitySurface};
use crate::numerics::{trapezoid_1d, trapezoid_2d};

use super::SynthError;

/// Accuracy summary of one estimator against a known density on a grid.
/// `mise` is the trapezoid integral of the squared error; the pointwise
/// metrics are plain averages over knots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub estimator: String,
    pub grid: GridSpec,
    pub mae: f64,
    pub rmse: f64,
    pub mise: f64,
    pub sup_error: f64,
}

/// The grid a report was computed on.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum GridSpec {
    Curve(Grid1d),
    Surface(Grid2d),
}

fn summarize(errors: &[f64]) -> (f64, f64, f64) {
    let n = errors.len() as f64;
    let mae = errors.iter().map(|e| e.abs()).sum::<f64>() / n;
    let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
    let sup = errors.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    (mae, rmse, sup)
}

/// Score a surface estimate against `truth` on `grid`.
pub fn error_report_surface(
    estimate: &DensitySurface,
    truth: impl Fn(f64, f64) -> f64,
    grid: &Grid2d,
) -> Result<ErrorReport, SynthError> {
    if estimate.grid != *grid {
        return Err(SynthError::GridMismatch);
    }
    let ny = grid.y.len();
    let errors: Vec<f64> = estimate
        .values
        .iter()
        .enumerate()
        .map(|(idx, &v)| v - truth(grid.x.knot(idx / ny), grid.y.knot(idx % ny)))
        .collect();
    let squared: Vec<f64> = errors.iter().map(|e| e * e).collect();
    let mise = trapezoid_2d(&squared, grid.x.len(), ny, grid.x.step(), grid.y.step());
    let (mae, rmse, sup_error) = summarize(&errors);
    Ok(ErrorReport {
        estimator: method_name(estimate.method),
        grid: GridSpec::Surface(grid.clone()),
        mae,
        rmse,
        mise,
        sup_error,
    })
}

/// Score a curve estimate against `truth` on `grid`.
pub fn error_report_curve(
    estimate: &DensityCurve,
    truth: impl Fn(f64) -> f64,
    grid: &Grid1d,
) -> Result<ErrorReport, SynthError> {
    if estimate.grid != *grid {
        return Err(SynthError::GridMismatch);
    }
    let errors: Vec<f64> = estimate
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| v - truth(grid.knot(i)))
        .collect();
    let squared: Vec<f64> = errors.iter().map(|e| e * e).collect();
    let mise = trapezoid_1d(&squared, grid.step());
    let (mae, rmse, sup_error) = summarize(&errors);
    Ok(ErrorReport {
        estimator: method_name(estimate.method),
        grid: GridSpec::Curve(grid.clone()),
        mae,
        rmse,
        mise,
        sup_error,
    })
}

fn method_name(method: crate::npdensity::Method) -> String {
    use crate::npdensity::Method;
    match method {
        Method::NpMarginal => "np-marginal",
        Method::NpJoint => "np-joint",
        Method::JointIntegrated => "joint-integrated",
        Method::Kde => "kde",
        Method::External => "external",
    }
    .to_string()
}
