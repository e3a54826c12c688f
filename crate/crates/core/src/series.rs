//! Foundational data types shared by every estimator: price series, sample
//! pairs, and the empirical CDF.

use serde::Serialize;
use thiserror::Error;

mod ecdf;

pub use ecdf::EmpiricalCdf;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("sample too small: need at least {needed} points, got {got}")]
    EmptySample { needed: usize, got: usize },
    #[error("series too short: need at least {needed} points, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("coordinate arrays differ in length: {xs} vs {ys}")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("price must be strictly positive, got {value} at index {index}")]
    NonPositivePrice { index: usize, value: f64 },
    #[error("timestamps must be strictly increasing (violated at index {index})")]
    TimestampsNotIncreasing { index: usize },
    #[error("sampling interval must be positive and finite, got {0}")]
    BadInterval(f64),
}

/// Which variable of a bivariate object an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// A time-indexed series of strictly positive asset prices with a nominally
/// uniform sampling interval.
///
/// `dt` is the interval expressed in the caller's time unit (e.g. 1/252
/// years for daily bars). Spacing uniformity is checked against a relative
/// tolerance of 1e-6 but is advisory only: real tick data with jitter stays
/// usable and the flag is surfaced via [`PriceSeries::has_uniform_spacing`].
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    timestamps: Vec<f64>,
    prices: Vec<f64>,
    dt: f64,
    uniform_spacing: bool,
}

impl PriceSeries {
    pub fn new(timestamps: Vec<f64>, prices: Vec<f64>, dt: f64) -> Result<Self, SeriesError> {
        if prices.len() < 2 {
            return Err(SeriesError::TooShort {
                needed: 2,
                got: prices.len(),
            });
        }
        if timestamps.len() != prices.len() {
            return Err(SeriesError::LengthMismatch {
                xs: timestamps.len(),
                ys: prices.len(),
            });
        }
        for (i, &p) in prices.iter().enumerate() {
            if !p.is_finite() {
                return Err(SeriesError::NonFinite { index: i });
            }
            if p <= 0.0 {
                return Err(SeriesError::NonPositivePrice { index: i, value: p });
            }
        }
        if let Some(i) = timestamps.iter().position(|t| !t.is_finite()) {
            return Err(SeriesError::NonFinite { index: i });
        }
        for (i, w) in timestamps.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(SeriesError::TimestampsNotIncreasing { index: i + 1 });
            }
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(SeriesError::BadInterval(dt));
        }
        let uniform_spacing = spacing_is_uniform(&timestamps);
        Ok(PriceSeries {
            timestamps,
            prices,
            dt,
            uniform_spacing,
        })
    }

    /// Convenience constructor with bar-index timestamps 0, 1, 2, ...
    pub fn from_prices(prices: Vec<f64>, dt: f64) -> Result<Self, SeriesError> {
        let timestamps = (0..prices.len()).map(|i| i as f64).collect();
        Self::new(timestamps, prices, dt)
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires length >= 2
    }

    /// Whether consecutive timestamps are equally spaced within a relative
    /// tolerance of 1e-6.
    pub fn has_uniform_spacing(&self) -> bool {
        self.uniform_spacing
    }
}

fn spacing_is_uniform(timestamps: &[f64]) -> bool {
    let first = timestamps[1] - timestamps[0];
    timestamps
        .windows(2)
        .all(|w| ((w[1] - w[0]) - first).abs() <= 1e-6 * first.abs())
}

/// Paired i.i.d. observations of two random variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePairs {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SamplePairs {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, SeriesError> {
        if xs.len() != ys.len() {
            return Err(SeriesError::LengthMismatch {
                xs: xs.len(),
                ys: ys.len(),
            });
        }
        if xs.len() < 2 {
            return Err(SeriesError::EmptySample {
                needed: 2,
                got: xs.len(),
            });
        }
        for (i, v) in xs.iter().chain(ys.iter()).enumerate() {
            if !v.is_finite() {
                return Err(SeriesError::NonFinite {
                    index: i % xs.len(),
                });
            }
        }
        Ok(SamplePairs { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Joint and marginal CDF queries for a pair of random variables.
///
/// Implemented by [`EmpiricalCdf`] for sample data and by the analytic CDFs
/// in [`crate::synthlab`] for validation against known ground truth. All
/// implementations use weak inequalities (probability of `X <= x`), matching
/// the right-continuous empirical distribution function.
pub trait BivariateCdf {
    /// P(X <= x, Y <= y).
    fn joint(&self, x: f64, y: f64) -> f64;

    /// P(X <= v) for `Axis::X`, P(Y <= v) for `Axis::Y`.
    fn marginal(&self, axis: Axis, v: f64) -> f64;
}
