//! Gaussian-kernel density estimation, the smoothing baseline the
//! CDF-difference estimators are compared against.

use crate::exec::map_indices;
use crate::grid::{Grid1d, Grid2d};
use crate::npdensity::{DensityCurve, DensitySurface, Method};
use crate::series::SamplePairs;

use super::SynthError;

const INV_SQRT_2PI: f64 = 0.3989422804014327;

/// Bandwidth selection for the Gaussian product kernel. `Explicit` applies
/// the same bandwidth to every axis; `Silverman` picks
/// `h = 1.06 s n^(-1/5)` per axis from that axis's sample standard
/// deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Silverman,
    Explicit(f64),
}

/// Silverman's rule of thumb for one axis.
pub fn silverman_bandwidth(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    1.06 * var.sqrt() * n.powf(-0.2)
}

fn resolve(bandwidth: Bandwidth, values: &[f64]) -> Result<f64, SynthError> {
    let h = match bandwidth {
        Bandwidth::Explicit(h) => h,
        Bandwidth::Silverman => silverman_bandwidth(values),
    };
    if h <= 0.0 || !h.is_finite() {
        return Err(SynthError::BadBandwidth(h));
    }
    Ok(h)
}

/// 1-D Gaussian KDE evaluated on a grid.
pub fn kde_curve(
    samples: &[f64],
    bandwidth: Bandwidth,
    grid: &Grid1d,
) -> Result<DensityCurve, SynthError> {
    if samples.len() < 2 {
        return Err(SynthError::BadParams(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    let h = resolve(bandwidth, samples)?;
    let n = samples.len() as f64;
    let norm = INV_SQRT_2PI / (n * h);
    let values = map_indices(grid.len(), |i| {
        let x = grid.knot(i);
        let s: f64 = samples
            .iter()
            .map(|&xi| {
                let u = (x - xi) / h;
                (-0.5 * u * u).exp()
            })
            .sum();
        norm * s
    });
    DensityCurve::from_values(grid.clone(), values, Method::Kde)
        .map_err(|e| SynthError::BadParams(e.to_string()))
}

/// 2-D Gaussian product-kernel KDE evaluated on a grid.
pub fn kde_surface(
    samples: &SamplePairs,
    bandwidth: Bandwidth,
    grid: &Grid2d,
) -> Result<DensitySurface, SynthError> {
    let hx = resolve(bandwidth, samples.xs())?;
    let hy = resolve(bandwidth, samples.ys())?;
    let xs = samples.xs();
    let ys = samples.ys();
    let n = samples.len() as f64;
    let norm = INV_SQRT_2PI * INV_SQRT_2PI / (n * hx * hy);
    let ny = grid.y.len();
    let values = map_indices(grid.len(), |idx| {
        let x = grid.x.knot(idx / ny);
        let y = grid.y.knot(idx % ny);
        let s: f64 = xs
            .iter()
            .zip(ys)
            .map(|(&xi, &yi)| {
                let u = (x - xi) / hx;
                let w = (y - yi) / hy;
                (-0.5 * (u * u + w * w)).exp()
            })
            .sum();
        norm * s
    });
    DensitySurface::from_values(grid.clone(), values, Method::Kde)
        .map_err(|e| SynthError::BadParams(e.to_string()))
}
