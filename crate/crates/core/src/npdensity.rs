//! Non-parametric density estimation from finite differences of a CDF.
//!
//! The joint estimator combines a second difference of the CDF along the
//! grid diagonal with the two axis-aligned second differences:
//!
//! ```text
//! f(x,y) ~ [ D2F - D2xF - D2yF ] / (2 dx dy)
//!
//! D2F  = F(x+dx, y+dy) - 2 F(x,y) + F(x-dx, y-dy)
//! D2xF = F(x+dx, y)    - 2 F(x,y) + F(x-dx, y)
//! D2yF = F(x,    y+dy) - 2 F(x,y) + F(x,    y-dy)
//! ```
//!
//! Expanding F to second order, the diagonal difference is
//! `F_xx dx^2 + 2 F_xy dx dy + F_yy dy^2` and the axis-aligned differences
//! remove the pure second derivatives, leaving the mixed partial
//! `F_xy = f`. For an empirical CDF the whole expression collapses to the
//! average occupancy of the two diagonal grid cells touching `(x, y)`, so
//! the estimate needs no bandwidth or kernel choice and is exact counting
//! all the way down.
//!
//! The marginal estimator is the central CDF difference over `2 dx`,
//! accurate to O(dx^2).
//!
//! Boundary knots where `x +- dx` leaves the grid still evaluate: the CDF is
//! defined on all of R^2 and saturates at 0 and 1 naturally.

use serde::Serialize;
use thiserror::Error;

use crate::exec::map_indices;
use crate::grid::{Grid1d, Grid2d};
use crate::numerics::{trapezoid_1d, trapezoid_2d, trapezoid_weight};
use crate::series::{Axis, BivariateCdf};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("density is degenerate: no positive mass to normalize")]
    DegenerateDensity,
    #[error("value count {got} does not match grid knot count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite density value at index {index}")]
    NonFinite { index: usize },
}

/// Provenance tag carried by density curves and surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    NpMarginal,
    NpJoint,
    JointIntegrated,
    Kde,
    External,
}

/// Estimation and normalization bookkeeping attached to every density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Fraction of raw values below zero at estimation time.
    pub negative_fraction: f64,
    /// Number of values clipped to zero by [`DensityCurve::normalize`] /
    /// [`DensitySurface::normalize`].
    pub clip_count: usize,
    /// Multiplicative factor applied by normalization (1.0 = untouched).
    pub normalization: f64,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Diagnostics {
            negative_fraction: 0.0,
            clip_count: 0,
            normalization: 1.0,
        }
    }
}

/// A gridded estimate of a 1-D density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCurve {
    pub grid: Grid1d,
    pub values: Vec<f64>,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

/// A gridded estimate of a 2-D density, stored x-major
/// (`values[ix * ny + iy]`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySurface {
    pub grid: Grid2d,
    pub values: Vec<f64>,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

fn validate_values(values: &[f64], expected: usize) -> Result<(), DensityError> {
    if values.len() != expected {
        return Err(DensityError::LengthMismatch {
            expected,
            got: values.len(),
        });
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(DensityError::NonFinite { index });
    }
    Ok(())
}

fn negative_fraction(values: &[f64]) -> f64 {
    values.iter().filter(|&&v| v < 0.0).count() as f64 / values.len() as f64
}

impl DensityCurve {
    /// Wrap explicit values over a grid (used for externally supplied or
    /// synthetic densities).
    pub fn from_values(
        grid: Grid1d,
        values: Vec<f64>,
        method: Method,
    ) -> Result<Self, DensityError> {
        validate_values(&values, grid.len())?;
        let diagnostics = Diagnostics {
            negative_fraction: negative_fraction(&values),
            ..Diagnostics::default()
        };
        Ok(DensityCurve {
            grid,
            values,
            method,
            diagnostics,
        })
    }

    /// Trapezoid-rule integral over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid_1d(&self.values, self.grid.step())
    }

    /// Clip negatives to zero, then rescale to unit trapezoid integral.
    /// Applying it twice returns a bit-identical copy.
    pub fn normalize(&self) -> Result<Self, DensityError> {
        let (values, clip_count, factor) =
            normalize_values(&self.values, |v| trapezoid_1d(v, self.grid.step()))?;
        match values {
            None => Ok(self.clone()),
            Some(values) => Ok(DensityCurve {
                grid: self.grid.clone(),
                values,
                method: self.method,
                diagnostics: Diagnostics {
                    negative_fraction: self.diagnostics.negative_fraction,
                    clip_count,
                    normalization: factor,
                },
            }),
        }
    }
}

impl DensitySurface {
    pub fn from_values(
        grid: Grid2d,
        values: Vec<f64>,
        method: Method,
    ) -> Result<Self, DensityError> {
        validate_values(&values, grid.len())?;
        let diagnostics = Diagnostics {
            negative_fraction: negative_fraction(&values),
            ..Diagnostics::default()
        };
        Ok(DensitySurface {
            grid,
            values,
            method,
            diagnostics,
        })
    }

    /// 2-D trapezoid-rule integral over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid_2d(
            &self.values,
            self.grid.x.len(),
            self.grid.y.len(),
            self.grid.x.step(),
            self.grid.y.step(),
        )
    }

    /// Clip negatives to zero, then rescale to unit trapezoid integral.
    /// Applying it twice returns a bit-identical copy.
    pub fn normalize(&self) -> Result<Self, DensityError> {
        let nx = self.grid.x.len();
        let ny = self.grid.y.len();
        let (dx, dy) = (self.grid.x.step(), self.grid.y.step());
        let (values, clip_count, factor) =
            normalize_values(&self.values, |v| trapezoid_2d(v, nx, ny, dx, dy))?;
        match values {
            None => Ok(self.clone()),
            Some(values) => Ok(DensitySurface {
                grid: self.grid.clone(),
                values,
                method: self.method,
                diagnostics: Diagnostics {
                    negative_fraction: self.diagnostics.negative_fraction,
                    clip_count,
                    normalization: factor,
                },
            }),
        }
    }
}

/// Shared normalization core. Returns `None` for the values when the input
/// is already normalized (no clipping needed and unit integral to 1e-12), so
/// the caller can hand back an unchanged copy and keep normalization
/// idempotent bit for bit.
fn normalize_values(
    values: &[f64],
    integral: impl Fn(&[f64]) -> f64,
) -> Result<(Option<Vec<f64>>, usize, f64), DensityError> {
    let clip_count = values.iter().filter(|&&v| v < 0.0).count();
    if clip_count == 0 {
        let total = integral(values);
        if total <= 0.0 || !total.is_finite() {
            return Err(DensityError::DegenerateDensity);
        }
        if (total - 1.0).abs() <= 1e-12 {
            return Ok((None, 0, 1.0));
        }
    }
    let clipped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
    let total = integral(&clipped);
    if total <= 0.0 || !total.is_finite() {
        return Err(DensityError::DegenerateDensity);
    }
    let scaled = clipped.iter().map(|&v| v / total).collect();
    Ok((Some(scaled), clip_count, 1.0 / total))
}

/// Marginal density by central difference of the marginal CDF:
/// `[F(v + dx) - F(v - dx)] / (2 dx)` at every knot.
pub fn marginal_density_np(
    cdf: &(impl BivariateCdf + Sync),
    axis: Axis,
    grid: &Grid1d,
) -> DensityCurve {
    let dx = grid.step();
    let values = map_indices(grid.len(), |i| {
        let v = grid.knot(i);
        (cdf.marginal(axis, v + dx) - cdf.marginal(axis, v - dx)) / (2.0 * dx)
    });
    let diagnostics = Diagnostics {
        negative_fraction: negative_fraction(&values),
        ..Diagnostics::default()
    };
    DensityCurve {
        grid: grid.clone(),
        values,
        method: Method::NpMarginal,
        diagnostics,
    }
}

/// Joint density from CDF second differences (see module docs). Raw values
/// are returned unclipped; clipping happens only in `normalize()`.
pub fn joint_density_np(cdf: &(impl BivariateCdf + Sync), grid: &Grid2d) -> DensitySurface {
    let nx = grid.x.len();
    let ny = grid.y.len();
    let dx = grid.x.step();
    let dy = grid.y.step();
    let values = map_indices(nx * ny, |idx| {
        let x = grid.x.knot(idx / ny);
        let y = grid.y.knot(idx % ny);
        let diag = cdf.joint(x + dx, y + dy) - 2.0 * cdf.joint(x, y) + cdf.joint(x - dx, y - dy);
        let along_x = cdf.joint(x + dx, y) - 2.0 * cdf.joint(x, y) + cdf.joint(x - dx, y);
        let along_y = cdf.joint(x, y + dy) - 2.0 * cdf.joint(x, y) + cdf.joint(x, y - dy);
        (diag - along_x - along_y) / (2.0 * dx * dy)
    });
    let diagnostics = Diagnostics {
        negative_fraction: negative_fraction(&values),
        ..Diagnostics::default()
    };
    DensitySurface {
        grid: grid.clone(),
        values,
        method: Method::NpJoint,
        diagnostics,
    }
}

/// Integrate a surface over the named axis (trapezoid rule), producing a
/// curve over the remaining axis. Expects a normalized surface; the result
/// then integrates to 1 within 1e-6.
pub fn integrate_out(surface: &DensitySurface, axis: Axis) -> DensityCurve {
    let nx = surface.grid.x.len();
    let ny = surface.grid.y.len();
    let (kept_grid, values): (Grid1d, Vec<f64>) = match axis {
        // Integrate out Y: one value per x-knot.
        Axis::Y => {
            let dy = surface.grid.y.step();
            let values = (0..nx)
                .map(|ix| trapezoid_1d(&surface.values[ix * ny..(ix + 1) * ny], dy))
                .collect();
            (surface.grid.x.clone(), values)
        }
        // Integrate out X: one value per y-knot.
        Axis::X => {
            let dx = surface.grid.x.step();
            let values = (0..ny)
                .map(|iy| {
                    let col = crate::numerics::kahan_sum(
                        (0..nx).map(|ix| trapezoid_weight(ix, nx) * surface.values[ix * ny + iy]),
                    );
                    dx * col
                })
                .collect();
            (surface.grid.y.clone(), values)
        }
    };
    let diagnostics = Diagnostics {
        negative_fraction: negative_fraction(&values),
        ..Diagnostics::default()
    };
    DensityCurve {
        grid: kept_grid,
        values,
        method: Method::JointIntegrated,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{EmpiricalCdf, SamplePairs};
    use crate::synthlab::analytic::{GaussianProductCdf, UniformSquareCdf};
    use proptest::prelude::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn phi(x: f64) -> f64 {
        Normal::standard().cdf(x)
    }

    #[test]
    fn marginal_matches_central_difference_of_gaussian_cdf() {
        let cdf = GaussianProductCdf::standard();
        let grid = Grid1d::new(0.0, 0.2, 0.1).unwrap();
        let curve = marginal_density_np(&cdf, Axis::X, &grid);
        let expected = (phi(0.1) - phi(-0.1)) / 0.2;
        assert!((curve.values[0] - expected).abs() < 1e-12);
        assert!((curve.values[0] - 0.39828).abs() < 1e-5);
    }

    #[test]
    fn marginal_of_uniform_cdf_is_exactly_one() {
        let cdf = UniformSquareCdf;
        let grid = Grid1d::new(0.5, 0.6, 0.1).unwrap();
        let curve = marginal_density_np(&cdf, Axis::X, &grid);
        assert!((curve.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn marginal_of_two_point_sample() {
        let pairs = SamplePairs::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let cdf = EmpiricalCdf::from_pairs(&pairs);
        let grid = Grid1d::new(0.5, 1.5, 1.0).unwrap();
        let curve = marginal_density_np(&cdf, Axis::X, &grid);
        assert_eq!(curve.values[0], 0.5);
    }

    #[test]
    fn joint_recovers_uniform_density_exactly() {
        let grid = Grid2d::new((0.5, 0.6), 0.1, (0.5, 0.6), 0.1).unwrap();
        let surface = joint_density_np(&UniformSquareCdf, &grid);
        assert!((surface.values[0] - 1.0).abs() < 1e-12);
        assert_eq!(surface.diagnostics.negative_fraction, 0.0);
    }

    #[test]
    fn joint_gaussian_oracle_at_origin() {
        let grid = Grid2d::new((0.0, 0.1), 0.1, (0.0, 0.1), 0.1).unwrap();
        let surface = joint_density_np(&GaussianProductCdf::standard(), &grid);
        let got = surface.values[0];
        // Independent route: the two diagonal cell masses of the product CDF.
        let e = phi(0.1) - 0.5;
        let expected = 2.0 * e * e / (2.0 * 0.1 * 0.1);
        assert!((got - expected).abs() < 1e-12);
        // Against the true density 1/(2*pi): discretization error only.
        let truth = 1.0 / (2.0 * std::f64::consts::PI);
        assert!((got - truth).abs() / truth < 0.005);
        assert!((got - 0.158626).abs() < 1e-5);
    }

    #[test]
    fn halving_the_step_cuts_gaussian_error_at_least_twofold() {
        let truth = 1.0 / (2.0 * std::f64::consts::PI);
        let cdf = GaussianProductCdf::standard();
        let err_at = |h: f64| {
            let grid = Grid2d::new((0.0, h), h, (0.0, h), h).unwrap();
            (joint_density_np(&cdf, &grid).values[0] - truth).abs()
        };
        let coarse = err_at(0.1);
        let fine = err_at(0.05);
        assert!(coarse / fine >= 2.0, "coarse {coarse} fine {fine}");
    }

    #[test]
    fn normalize_rescales_constant_curve() {
        let grid = Grid1d::new(0.0, 1.0, 0.1).unwrap();
        let curve = DensityCurve::from_values(grid, vec![2.0; 11], Method::External).unwrap();
        let normalized = curve.normalize().unwrap();
        assert!(normalized.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert_eq!(normalized.diagnostics.clip_count, 0);
        assert!((normalized.diagnostics.normalization - 0.5).abs() < 1e-12);
    }

    #[test]
    fn normalize_clips_then_rescales() {
        let grid = Grid1d::new(0.0, 1.0, 1.0).unwrap();
        let curve = DensityCurve::from_values(grid, vec![-1.0, 3.0], Method::External).unwrap();
        let normalized = curve.normalize().unwrap();
        assert_eq!(normalized.values, vec![0.0, 2.0]);
        assert_eq!(normalized.diagnostics.clip_count, 1);
    }

    #[test]
    fn normalize_rejects_nonpositive_density() {
        let grid = Grid1d::new(0.0, 1.0, 1.0).unwrap();
        let curve = DensityCurve::from_values(grid, vec![-1.0, -1.0], Method::External).unwrap();
        assert_eq!(
            curve.normalize().unwrap_err(),
            DensityError::DegenerateDensity
        );
    }

    #[test]
    fn integrate_out_uniform_surface() {
        let grid = Grid2d::new((0.0, 1.0), 0.1, (0.0, 1.0), 0.1).unwrap();
        let surface = DensitySurface::from_values(grid, vec![1.0; 121], Method::External).unwrap();
        let curve = integrate_out(&surface, Axis::Y);
        assert_eq!(curve.values.len(), 11);
        assert!(curve.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn integrate_out_linear_surface_matches_closed_form() {
        let grid = Grid2d::new((0.0, 1.0), 0.05, (0.0, 1.0), 0.05).unwrap();
        let ny = grid.y.len();
        let mut values = vec![0.0; grid.len()];
        for ix in 0..grid.x.len() {
            for iy in 0..ny {
                values[ix * ny + iy] = grid.x.knot(ix) + grid.y.knot(iy);
            }
        }
        let surface = DensitySurface::from_values(grid, values, Method::External).unwrap();
        // integral over y of (x + y) on [0,1] = x + 1/2
        let over_y = integrate_out(&surface, Axis::Y);
        for (i, &v) in over_y.values.iter().enumerate() {
            let x = over_y.grid.knot(i);
            assert!((v - (x + 0.5)).abs() <= 1e-3);
        }
        // symmetric case for the other axis
        let over_x = integrate_out(&surface, Axis::X);
        for (i, &v) in over_x.values.iter().enumerate() {
            let y = over_x.grid.knot(i);
            assert!((v - (y + 0.5)).abs() <= 1e-3);
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn results_do_not_depend_on_thread_count() {
        let pairs = crate::synthlab::gen_bivariate_gaussian(
            (0.0, 0.0),
            [[1.0, 0.2], [0.2, 1.0]],
            5_000,
            21,
        )
        .unwrap();
        let cdf = EmpiricalCdf::from_pairs(&pairs);
        let grid = Grid2d::new((-1.5, 1.5), 0.25, (-1.5, 1.5), 0.25).unwrap();
        let parallel = joint_density_np(&cdf, &grid);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| joint_density_np(&cdf, &grid));
        assert_eq!(parallel, single);
        let norm_par = parallel.normalize().unwrap();
        let norm_single = single.normalize().unwrap();
        assert_eq!(norm_par, norm_single);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent_bit_exact(
            raw in prop::collection::vec(-1.0f64..4.0, 5..40),
        ) {
            prop_assume!(raw.iter().any(|&v| v > 0.0));
            let grid = Grid1d::new(0.0, (raw.len() - 1) as f64, 1.0).unwrap();
            let curve = DensityCurve::from_values(grid, raw, Method::External).unwrap();
            let once = curve.normalize().unwrap();
            let twice = once.normalize().unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn normalized_surfaces_integrate_to_one(
            raw in prop::collection::vec(-0.5f64..3.0, 12..60),
        ) {
            prop_assume!(raw.iter().any(|&v| v > 0.0));
            let ny = 3;
            let nx = raw.len() / ny;
            let raw = raw[..nx * ny].to_vec();
            let grid = Grid2d::new(
                (0.0, (nx - 1) as f64), 1.0,
                (0.0, (ny - 1) as f64), 1.0,
            ).unwrap();
            let surface = DensitySurface::from_values(grid, raw, Method::External).unwrap();
            let normalized = surface.normalize().unwrap();
            prop_assert!((normalized.integral() - 1.0).abs() <= 1e-9);
            let marginal = integrate_out(&normalized, Axis::Y);
            prop_assert!((marginal.integral() - 1.0).abs() <= 1e-6);
        }
    }
}
