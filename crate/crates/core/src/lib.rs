//! Density and volatility estimation toolkit.
//!
//! The crate provides four estimator families plus the validation harness
//! used to exercise them:
//!
//! - [`npdensity`] — non-parametric joint and marginal densities built from
//!   finite differences of an empirical (or analytic) CDF. No bandwidth, no
//!   kernel choice.
//! - [`paramdensity`] — parametric densities as low-order bivariate
//!   polynomials fit by least squares, with closed-form marginal,
//!   conditional, and cumulative derivations.
//! - [`volatility`] — per-step relative volatility and
//!   volatility-of-volatility from price series, plus rolling means.
//! - [`synthlab`] — seeded GBM / Heston / bivariate-Gaussian generators with
//!   analytic ground truth, a Gaussian-kernel KDE baseline, and error
//!   metrics.
//!
//! Shared data types (price series, sample pairs, evaluation grids, the
//! empirical CDF) live in [`series`] and [`grid`].
//!
//! Grid evaluation of the estimators is data-parallel via rayon when the
//! default `parallel` feature is enabled; disabling it swaps in a sequential
//! fallback with identical results. All estimators are deterministic: values
//! are collected in knot order and reductions use a fixed summation order, so
//! outputs do not depend on thread count.

pub mod grid;
pub mod npdensity;
pub mod paramdensity;
pub mod series;
pub mod synthlab;
pub mod volatility;

mod exec;
mod numerics;

pub use grid::{Grid1d, Grid2d, GridError};
pub use series::{Axis, BivariateCdf, EmpiricalCdf, PriceSeries, SamplePairs, SeriesError};
