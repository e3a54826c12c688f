//! Analytic reference distributions: exact CDFs to feed the estimators and
//! exact densities to score them against.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::series::{Axis, BivariateCdf};

/// Product of two independent normal CDFs, `F(x, y) = Phi_x(x) Phi_y(y)`.
#[derive(Debug, Clone)]
pub struct GaussianProductCdf {
    x: Normal,
    y: Normal,
}

impl GaussianProductCdf {
    pub fn new(mean_x: f64, sd_x: f64, mean_y: f64, sd_y: f64) -> Self {
        GaussianProductCdf {
            x: Normal::new(mean_x, sd_x).expect("valid normal parameters"),
            y: Normal::new(mean_y, sd_y).expect("valid normal parameters"),
        }
    }

    /// Independent standard normals on both axes.
    pub fn standard() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }
}

impl BivariateCdf for GaussianProductCdf {
    fn joint(&self, x: f64, y: f64) -> f64 {
        self.x.cdf(x) * self.y.cdf(y)
    }

    fn marginal(&self, axis: Axis, v: f64) -> f64 {
        match axis {
            Axis::X => self.x.cdf(v),
            Axis::Y => self.y.cdf(v),
        }
    }
}

/// Uniform distribution on the unit square: `F(x, y) = clamp(x) clamp(y)`.
#[derive(Debug, Clone, Copy)]
pub struct UniformSquareCdf;

impl BivariateCdf for UniformSquareCdf {
    fn joint(&self, x: f64, y: f64) -> f64 {
        x.clamp(0.0, 1.0) * y.clamp(0.0, 1.0)
    }

    fn marginal(&self, axis: Axis, v: f64) -> f64 {
        let _ = axis;
        v.clamp(0.0, 1.0)
    }
}

/// Named analytic truth densities for estimator scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthDensity {
    /// Independent standard bivariate normal.
    StandardNormal,
    /// Uniform on the unit square.
    UniformSquare,
}

impl TruthDensity {
    pub fn density(&self, x: f64, y: f64) -> f64 {
        match self {
            TruthDensity::StandardNormal => {
                (-(x * x + y * y) / 2.0).exp() / (2.0 * std::f64::consts::PI)
            }
            TruthDensity::UniformSquare => {
                if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn marginal(&self, v: f64) -> f64 {
        match self {
            TruthDensity::StandardNormal => {
                (-v * v / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
            }
            TruthDensity::UniformSquare => {
                if (0.0..=1.0).contains(&v) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl std::str::FromStr for TruthDensity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard-normal" => Ok(TruthDensity::StandardNormal),
            "uniform" => Ok(TruthDensity::UniformSquare),
            other => Err(format!(
                "unknown truth density `{other}` (expected standard-normal or uniform)"
            )),
        }
    }
}
