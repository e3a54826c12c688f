//! Parametric density estimation: a bivariate polynomial of total degree k
//! fit to gridded density targets by least squares.
//!
//! The monomial basis is ordered degree by degree, with the two pure powers
//! first and mixed terms following by decreasing x power:
//!
//! ```text
//! k = 2:  1, x, y, x^2, y^2, xy
//! k = 3:  1, x, y, x^2, y^2, xy, x^3, y^3, x^2 y, x y^2
//! ```
//!
//! Fitting internally centers and scales inputs to [-1, 1] per axis (raw
//! monomials above degree ~4 are numerically hostile), solves by SVD, and
//! maps the coefficients back to original coordinates, which are what the
//! public type reports. Marginals, conditionals, and the CDF are exact
//! term-by-term monomial calculus, no quadrature anywhere.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::npdensity::DensitySurface;
use crate::series::Axis;

/// Conditioning limit beyond which a fit is refused.
const CONDITION_LIMIT: f64 = 1e12;

/// Marginal values this close to zero cannot be conditioned on.
const MARGINAL_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("polynomial order must be >= 1, got {0}")]
    BadOrder(usize),
    #[error("underdetermined fit: {points} targets for {needed} coefficients")]
    Underdetermined { points: usize, needed: usize },
    #[error("design matrix is ill-conditioned (estimate {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("target point and value counts differ: {points} vs {values}")]
    LengthMismatch { points: usize, values: usize },
    #[error("target points span a degenerate domain")]
    DegenerateDomain,
    #[error("marginal density at the conditioning value is {value:e}, too close to zero")]
    ZeroMarginal { value: f64 },
    #[error("polynomial has non-positive total mass, cannot normalize")]
    DegenerateDensity,
}

/// Bounding rectangle a polynomial fit is valid on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Domain {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }
}

/// Least-squares quality summary of a polynomial fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    pub r_squared: f64,
    pub rmse: f64,
    pub n_points: usize,
    /// Ratio of extreme singular values of the scaled design matrix.
    pub condition_estimate: f64,
    /// Integral of max(-f, 0) over the domain, recorded by normalization
    /// (the polynomial model is allowed to dip below zero; clipping would
    /// destroy its closed-form calculus, so the mass is reported instead).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negative_mass: Option<f64>,
}

/// A bivariate polynomial density of total degree `order` with coefficients
/// in original coordinates, in the basis order described in the module docs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialDensity {
    pub order: usize,
    pub coefficients: Vec<f64>,
    pub domain: Domain,
    pub fit_report: FitReport,
}

/// A univariate polynomial over one axis of a domain, coefficients in
/// ascending degree. Produced by marginalization and conditioning.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Poly1d {
    pub variable: Axis,
    pub coefficients: Vec<f64>,
    pub domain: (f64, f64),
}

impl Poly1d {
    pub fn eval(&self, v: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * v + c)
    }

    /// Exact integral over the domain interval.
    pub fn integral(&self) -> f64 {
        let (lo, hi) = self.domain;
        self.coefficients
            .iter()
            .enumerate()
            .map(|(d, &c)| c * (hi.powi(d as i32 + 1) - lo.powi(d as i32 + 1)) / (d as f64 + 1.0))
            .sum()
    }
}

/// Exponent pairs `(a, b)` for every monomial `x^a y^b` with `a + b <= order`,
/// in the basis order described in the module docs.
pub fn monomial_exponents(order: usize) -> Vec<(u32, u32)> {
    let mut exps = Vec::with_capacity((order + 1) * (order + 2) / 2);
    for d in 0..=order as u32 {
        if d == 0 {
            exps.push((0, 0));
            continue;
        }
        exps.push((d, 0));
        exps.push((0, d));
        for a in (1..d).rev() {
            exps.push((a, d - a));
        }
    }
    exps
}

/// Number of coefficients of a degree-`order` bivariate polynomial.
pub fn coefficient_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// One row per point, one column per monomial, in basis order.
pub fn design_matrix(points: &[(f64, f64)], order: usize) -> Result<DMatrix<f64>, FitError> {
    if order < 1 {
        return Err(FitError::BadOrder(order));
    }
    let exps = monomial_exponents(order);
    Ok(DMatrix::from_fn(points.len(), exps.len(), |i, j| {
        let (a, b) = exps[j];
        let (x, y) = points[i];
        x.powi(a as i32) * y.powi(b as i32)
    }))
}

/// Fit a polynomial density to explicit `(point, value)` targets.
pub fn fit_polynomial_density(
    points: &[(f64, f64)],
    values: &[f64],
    order: usize,
) -> Result<PolynomialDensity, FitError> {
    if order < 1 {
        return Err(FitError::BadOrder(order));
    }
    if points.len() != values.len() {
        return Err(FitError::LengthMismatch {
            points: points.len(),
            values: values.len(),
        });
    }
    let needed = coefficient_count(order);
    if points.len() < needed {
        return Err(FitError::Underdetermined {
            points: points.len(),
            needed,
        });
    }

    let domain = bounding_domain(points)?;
    let cx = 0.5 * (domain.x_min + domain.x_max);
    let cy = 0.5 * (domain.y_min + domain.y_max);
    let sx = 0.5 * (domain.x_max - domain.x_min);
    let sy = 0.5 * (domain.y_max - domain.y_min);

    let scaled: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| ((x - cx) / sx, (y - cy) / sy))
        .collect();
    let a = design_matrix(&scaled, order)?;
    let b = DVector::from_column_slice(values);

    // Column-pivoted Householder QR. (SVD was tried first and solved
    // inaccurately when the design matrix has clustered singular values,
    // which symmetric lattices produce structurally.)
    let qr = a.clone().col_piv_qr();
    let r = qr.r();
    let mut rmax = 0.0f64;
    let mut rmin = f64::INFINITY;
    for i in 0..r.nrows().min(r.ncols()) {
        let d = r[(i, i)].abs();
        rmax = rmax.max(d);
        rmin = rmin.min(d);
    }
    let condition_estimate = if rmin > 0.0 {
        rmax / rmin
    } else {
        f64::INFINITY
    };
    if condition_estimate > CONDITION_LIMIT {
        return Err(FitError::IllConditioned {
            condition: condition_estimate,
        });
    }
    let mut scaled_coeffs = qr.q().transpose() * &b;
    if !r.solve_upper_triangular_mut(&mut scaled_coeffs) {
        return Err(FitError::IllConditioned {
            condition: condition_estimate,
        });
    }
    qr.p().inv_permute_rows(&mut scaled_coeffs);

    let residuals = &a * &scaled_coeffs - &b;
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss_tot: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let rmse = (ss_res / n).sqrt();
    // For the legitimate uniform-density case ss_tot = 0 and ss_res = 0
    // (the model contains constants), so report a perfect fit.
    let r_squared = if ss_tot == 0.0 || ss_res <= 1e-24 * ss_tot.max(1.0) {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };

    let coefficients = unscale_coefficients(scaled_coeffs.as_slice(), order, (cx, sx), (cy, sy));

    Ok(PolynomialDensity {
        order,
        coefficients,
        domain,
        fit_report: FitReport {
            r_squared,
            rmse,
            n_points: values.len(),
            condition_estimate,
            negative_mass: None,
        },
    })
}

/// Fit against every knot of a density surface (the usual source of
/// targets: a non-parametric estimate of raw samples).
pub fn fit_surface(surface: &DensitySurface, order: usize) -> Result<PolynomialDensity, FitError> {
    let ny = surface.grid.y.len();
    let points: Vec<(f64, f64)> = (0..surface.values.len())
        .map(|idx| (surface.grid.x.knot(idx / ny), surface.grid.y.knot(idx % ny)))
        .collect();
    fit_polynomial_density(&points, &surface.values, order)
}

fn bounding_domain(points: &[(f64, f64)]) -> Result<Domain, FitError> {
    let mut d = Domain {
        x_min: f64::INFINITY,
        x_max: f64::NEG_INFINITY,
        y_min: f64::INFINITY,
        y_max: f64::NEG_INFINITY,
    };
    for &(x, y) in points {
        d.x_min = d.x_min.min(x);
        d.x_max = d.x_max.max(x);
        d.y_min = d.y_min.min(y);
        d.y_max = d.y_max.max(y);
    }
    let finite =
        d.x_min.is_finite() && d.x_max.is_finite() && d.y_min.is_finite() && d.y_max.is_finite();
    if !finite || d.x_max <= d.x_min || d.y_max <= d.y_min {
        return Err(FitError::DegenerateDomain);
    }
    Ok(d)
}

/// Expand coefficients over the scaled basis `u = (x-cx)/sx, v = (y-cy)/sy`
/// into plain `x^i y^j` coefficients via the binomial theorem.
fn unscale_coefficients(
    scaled: &[f64],
    order: usize,
    (cx, sx): (f64, f64),
    (cy, sy): (f64, f64),
) -> Vec<f64> {
    let exps = monomial_exponents(order);
    let index_of = |a: u32, b: u32| exps.iter().position(|&e| e == (a, b)).unwrap();
    let mut out = vec![0.0; exps.len()];
    for (k, &(a, b)) in exps.iter().enumerate() {
        let d = scaled[k] / (sx.powi(a as i32) * sy.powi(b as i32));
        for i in 0..=a {
            for j in 0..=b {
                let term = d
                    * binomial(a, i)
                    * binomial(b, j)
                    * (-cx).powi((a - i) as i32)
                    * (-cy).powi((b - j) as i32);
                out[index_of(i, j)] += term;
            }
        }
    }
    out
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k.min(n));
    let mut num = 1.0;
    let mut den = 1.0;
    for i in 0..k {
        num *= (n - i) as f64;
        den *= (i + 1) as f64;
    }
    num / den
}

impl PolynomialDensity {
    /// Direct monomial sum at `(x, y)`. Points outside the domain still
    /// evaluate (check [`Domain::contains`] to warn); negative outputs are
    /// allowed, this is the raw model.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        monomial_exponents(self.order)
            .iter()
            .zip(&self.coefficients)
            .map(|(&(a, b), &c)| c * x.powi(a as i32) * y.powi(b as i32))
            .sum()
    }

    /// Marginal density of the remaining variable after integrating out
    /// `axis` over its domain interval, in closed form.
    pub fn marginal_by_integration(&self, axis: Axis) -> Poly1d {
        let exps = monomial_exponents(self.order);
        let mut coeffs = vec![0.0; self.order + 1];
        match axis {
            // Integrate out Y: sum_b c_ab (y1^{b+1} - y0^{b+1})/(b+1) x^a
            Axis::Y => {
                for (&(a, b), &c) in exps.iter().zip(&self.coefficients) {
                    let p = b as i32 + 1;
                    let w = (self.domain.y_max.powi(p) - self.domain.y_min.powi(p)) / p as f64;
                    coeffs[a as usize] += c * w;
                }
                Poly1d {
                    variable: Axis::X,
                    coefficients: coeffs,
                    domain: (self.domain.x_min, self.domain.x_max),
                }
            }
            Axis::X => {
                for (&(a, b), &c) in exps.iter().zip(&self.coefficients) {
                    let p = a as i32 + 1;
                    let w = (self.domain.x_max.powi(p) - self.domain.x_min.powi(p)) / p as f64;
                    coeffs[b as usize] += c * w;
                }
                Poly1d {
                    variable: Axis::Y,
                    coefficients: coeffs,
                    domain: (self.domain.y_min, self.domain.y_max),
                }
            }
        }
    }

    /// Conditional density over the free variable given the other axis is
    /// pinned: `f(x | y0) = f(x, y0) / f_Y(y0)` (and symmetrically in x).
    pub fn conditional_density(&self, given: Axis, value: f64) -> Result<Poly1d, FitError> {
        let marginal = self.marginal_by_integration(match given {
            Axis::Y => Axis::X, // f_Y integrates out x
            Axis::X => Axis::Y,
        });
        let denom = marginal.eval(value);
        if denom.abs() <= MARGINAL_EPS {
            return Err(FitError::ZeroMarginal { value: denom });
        }
        let exps = monomial_exponents(self.order);
        let mut coeffs = vec![0.0; self.order + 1];
        for (&(a, b), &c) in exps.iter().zip(&self.coefficients) {
            match given {
                Axis::Y => coeffs[a as usize] += c * value.powi(b as i32),
                Axis::X => coeffs[b as usize] += c * value.powi(a as i32),
            }
        }
        for c in &mut coeffs {
            *c /= denom;
        }
        Ok(Poly1d {
            variable: match given {
                Axis::Y => Axis::X,
                Axis::X => Axis::Y,
            },
            coefficients: coeffs,
            domain: match given {
                Axis::Y => (self.domain.x_min, self.domain.x_max),
                Axis::X => (self.domain.y_min, self.domain.y_max),
            },
        })
    }

    /// Exact double integral over `[x_min, x] x [y_min, y]` via monomial
    /// antiderivatives.
    pub fn cumulative(&self, x: f64, y: f64) -> f64 {
        monomial_exponents(self.order)
            .iter()
            .zip(&self.coefficients)
            .map(|(&(a, b), &c)| {
                let pa = a as i32 + 1;
                let pb = b as i32 + 1;
                c * (x.powi(pa) - self.domain.x_min.powi(pa)) / pa as f64
                    * (y.powi(pb) - self.domain.y_min.powi(pb))
                    / pb as f64
            })
            .sum()
    }

    /// Rescale so the CDF reaches exactly 1 at the domain's upper corner.
    /// Also records the negative-mass diagnostic (see [`FitReport`]).
    pub fn normalize(&self) -> Result<PolynomialDensity, FitError> {
        let mass = self.cumulative(self.domain.x_max, self.domain.y_max);
        if mass <= 0.0 || !mass.is_finite() {
            return Err(FitError::DegenerateDensity);
        }
        let coefficients: Vec<f64> = self.coefficients.iter().map(|c| c / mass).collect();
        let scaled = PolynomialDensity {
            order: self.order,
            coefficients,
            domain: self.domain,
            fit_report: self.fit_report,
        };
        let negative_mass = scaled.negative_mass_estimate(101);
        Ok(PolynomialDensity {
            fit_report: FitReport {
                negative_mass: Some(negative_mass),
                ..self.fit_report
            },
            ..scaled
        })
    }

    /// Trapezoid estimate of `integral of max(-f, 0)` on an `n x n` lattice.
    fn negative_mass_estimate(&self, n: usize) -> f64 {
        let dx = (self.domain.x_max - self.domain.x_min) / (n - 1) as f64;
        let dy = (self.domain.y_max - self.domain.y_min) / (n - 1) as f64;
        let values: Vec<f64> = (0..n * n)
            .map(|idx| {
                let x = self.domain.x_min + (idx / n) as f64 * dx;
                let y = self.domain.y_min + (idx % n) as f64 * dy;
                (-self.eval(x, y)).max(0.0)
            })
            .collect();
        crate::numerics::trapezoid_2d(&values, n, n, dx, dy)
    }

    /// Human-readable polynomial, terms below `5e-4` in magnitude omitted.
    pub fn formula(&self) -> String {
        let exps = monomial_exponents(self.order);
        let mut parts: Vec<String> = Vec::new();
        for (&(a, b), &c) in exps.iter().zip(&self.coefficients) {
            if parts.is_empty() && (a, b) == (0, 0) {
                parts.push(format!("{c:.3}"));
                continue;
            }
            if c.abs() < 5e-4 {
                continue;
            }
            let var = match (a, b) {
                (0, 0) => String::new(),
                _ => {
                    let xp = match a {
                        0 => String::new(),
                        1 => "x".into(),
                        _ => format!("x^{a}"),
                    };
                    let yp = match b {
                        0 => String::new(),
                        1 => "y".into(),
                        _ => format!("y^{b}"),
                    };
                    format!("{xp}{yp}")
                }
            };
            let sign = if c < 0.0 { " - " } else { " + " };
            parts.push(format!("{sign}{:.3}{var}", c.abs()));
        }
        format!("f(x,y) = {}", parts.concat())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_grid_targets(n: usize, f: impl Fn(f64, f64) -> f64) -> (Vec<(f64, f64)>, Vec<f64>) {
        let mut points = Vec::new();
        let mut values = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let x = i as f64 / (n - 1) as f64;
                let y = j as f64 / (n - 1) as f64;
                points.push((x, y));
                values.push(f(x, y));
            }
        }
        (points, values)
    }

    #[test]
    fn basis_order_matches_quadratic_listing() {
        assert_eq!(
            monomial_exponents(2),
            vec![(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1)]
        );
    }

    #[test]
    fn design_matrix_rows() {
        let m = design_matrix(&[(0.0, 0.0)], 2).unwrap();
        assert_eq!(
            m.row(0).iter().copied().collect::<Vec<_>>(),
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
        let m = design_matrix(&[(1.0, 2.0)], 2).unwrap();
        assert_eq!(
            m.row(0).iter().copied().collect::<Vec<_>>(),
            vec![1.0, 1.0, 2.0, 1.0, 4.0, 2.0]
        );
        let m = design_matrix(&[(1.0, 1.0)], 3).unwrap();
        assert_eq!(m.ncols(), 10);
        assert!(m.row(0).iter().all(|&v| v == 1.0));
        assert!(matches!(
            design_matrix(&[(0.0, 0.0)], 0),
            Err(FitError::BadOrder(0))
        ));
    }

    #[test]
    fn constant_targets_fit_exactly() {
        let (points, values) = unit_grid_targets(5, |_, _| 1.0);
        let fit = fit_polynomial_density(&points, &values, 2).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        for &c in &fit.coefficients[1..] {
            assert!(c.abs() < 1e-12);
        }
        assert!(fit.fit_report.rmse < 1e-12);
        assert_eq!(fit.fit_report.r_squared, 1.0);
    }

    #[test]
    fn linear_targets_fit_exactly() {
        let (points, values) = unit_grid_targets(5, |x, y| x + y);
        let fit = fit_polynomial_density(&points, &values, 2).unwrap();
        assert!(fit.coefficients[0].abs() < 1e-12);
        assert!((fit.coefficients[1] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients[2] - 1.0).abs() < 1e-12);
        for &c in &fit.coefficients[3..] {
            assert!(c.abs() < 1e-12);
        }
        assert!(fit.fit_report.rmse <= 1e-12);
    }

    #[test]
    fn underdetermined_is_rejected() {
        let points = vec![(0.0, 0.0), (1.0, 1.0), (0.5, 0.3)];
        let values = vec![1.0, 1.0, 1.0];
        assert!(matches!(
            fit_polynomial_density(&points, &values, 2),
            Err(FitError::Underdetermined {
                points: 3,
                needed: 6
            })
        ));
    }

    #[test]
    fn collinear_points_are_ill_conditioned() {
        // All y equal: the bounding box collapses and the domain check fires.
        let points: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 1.0)).collect();
        let values = vec![1.0; 10];
        assert!(matches!(
            fit_polynomial_density(&points, &values, 2),
            Err(FitError::DegenerateDomain)
        ));

        // Points on the diagonal y = x: the box is fine but the x and y
        // columns coincide, so the basis is rank deficient.
        let points: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, i as f64)).collect();
        let values: Vec<f64> = (0..10).map(|i| 1.0 + i as f64).collect();
        assert!(matches!(
            fit_polynomial_density(&points, &values, 2),
            Err(FitError::IllConditioned { .. })
        ));
    }

    #[test]
    fn eval_examples() {
        let base = PolynomialDensity {
            order: 2,
            coefficients: vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            domain: Domain {
                x_min: 0.0,
                x_max: 1.0,
                y_min: 0.0,
                y_max: 1.0,
            },
            fit_report: FitReport {
                r_squared: 1.0,
                rmse: 0.0,
                n_points: 0,
                condition_estimate: 1.0,
                negative_mass: None,
            },
        };
        assert_eq!(base.eval(0.7, -0.3), 1.0);

        let linear = PolynomialDensity {
            coefficients: vec![0.0, 1.0, 1.0, 0.0, 0.0, 0.0],
            ..base.clone()
        };
        assert!((linear.eval(0.3, 0.4) - 0.7).abs() < 1e-15);

        let quad = PolynomialDensity {
            coefficients: vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
            ..base
        };
        assert!((quad.eval(1.0, 2.0) - 7.0).abs() < 1e-15);
    }

    fn poly_on_unit_square(coefficients: Vec<f64>, order: usize) -> PolynomialDensity {
        PolynomialDensity {
            order,
            coefficients,
            domain: Domain {
                x_min: 0.0,
                x_max: 1.0,
                y_min: 0.0,
                y_max: 1.0,
            },
            fit_report: FitReport {
                r_squared: 1.0,
                rmse: 0.0,
                n_points: 0,
                condition_estimate: 1.0,
                negative_mass: None,
            },
        }
    }

    #[test]
    fn marginal_by_integration_examples() {
        // f = x + y on [0,1]^2, integrate out y: f_X(x) = x + 1/2
        let p = poly_on_unit_square(vec![0.0, 1.0, 1.0, 0.0, 0.0, 0.0], 2);
        let fx = p.marginal_by_integration(Axis::Y);
        assert_eq!(fx.variable, Axis::X);
        assert!((fx.eval(0.0) - 0.5).abs() < 1e-15);
        assert!((fx.eval(1.0) - 1.5).abs() < 1e-15);

        // f = 1: marginal is 1
        let p = poly_on_unit_square(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 2);
        let fx = p.marginal_by_integration(Axis::Y);
        assert!((fx.eval(0.37) - 1.0).abs() < 1e-15);

        // f = xy on [0,2]^2: integrate out y gives 2x
        let mut p = poly_on_unit_square(vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0], 2);
        p.domain = Domain {
            x_min: 0.0,
            x_max: 2.0,
            y_min: 0.0,
            y_max: 2.0,
        };
        let fx = p.marginal_by_integration(Axis::Y);
        assert!((fx.eval(1.0) - 2.0).abs() < 1e-15);
        assert!((fx.eval(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conditional_density_examples() {
        // f = x + y on [0,1]^2 at y0 = 0: f_Y(0) = 1/2, f(x|0) = 2x
        let p = poly_on_unit_square(vec![0.0, 1.0, 1.0, 0.0, 0.0, 0.0], 2);
        let c = p.conditional_density(Axis::Y, 0.0).unwrap();
        assert!((c.eval(0.5) - 1.0).abs() < 1e-15);
        assert!((c.eval(1.0) - 2.0).abs() < 1e-15);

        // f = 1: conditional is 1 regardless of y0
        let p = poly_on_unit_square(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 2);
        let c = p.conditional_density(Axis::Y, 0.8).unwrap();
        assert!((c.eval(0.2) - 1.0).abs() < 1e-15);

        // A polynomial whose Y-marginal vanishes at y0 = 0: f = y - 1/2
        // integrates over x to f_Y(y) = y - 1/2, zero at y0 = 1/2.
        let p = poly_on_unit_square(vec![-0.5, 0.0, 1.0, 0.0, 0.0, 0.0], 2);
        assert!(matches!(
            p.conditional_density(Axis::Y, 0.5),
            Err(FitError::ZeroMarginal { .. })
        ));
    }

    #[test]
    fn cumulative_examples() {
        let p = poly_on_unit_square(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 2);
        assert!((p.cumulative(0.5, 0.5) - 0.25).abs() < 1e-15);
        assert!((p.cumulative(1.0, 1.0) - 1.0).abs() < 1e-15);

        // f = 4xy on [0,1]^2: F(x,y) = x^2 y^2, F(0.5, 1) = 0.25
        let p = poly_on_unit_square(vec![0.0, 0.0, 0.0, 0.0, 0.0, 4.0], 2);
        assert!((p.cumulative(0.5, 1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn normalize_poly_examples() {
        // f = 2 normalizes to f = 1
        let p = poly_on_unit_square(vec![2.0, 0.0, 0.0, 0.0, 0.0, 0.0], 2);
        let n = p.normalize().unwrap();
        assert!((n.coefficients[0] - 1.0).abs() < 1e-15);
        assert_eq!(n.fit_report.negative_mass, Some(0.0));

        // f = x + y already has unit mass
        let p = poly_on_unit_square(vec![0.0, 1.0, 1.0, 0.0, 0.0, 0.0], 2);
        let n = p.normalize().unwrap();
        for (a, b) in n.coefficients.iter().zip(&p.coefficients) {
            assert!((a - b).abs() < 1e-15);
        }

        // f = -1 has negative mass
        let p = poly_on_unit_square(vec![-1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 2);
        assert!(matches!(p.normalize(), Err(FitError::DegenerateDensity)));
    }

    #[test]
    fn formula_renders_dominant_terms() {
        let p = poly_on_unit_square(vec![1.0, 0.0, 1e-9, 0.0, 0.0, 0.0], 2);
        assert_eq!(p.formula(), "f(x,y) = 1.000");
        let p = poly_on_unit_square(vec![0.5, -1.0, 0.0, 0.0, 0.0, 0.25], 2);
        assert_eq!(p.formula(), "f(x,y) = 0.500 - 1.000x + 0.250xy");
    }

    #[test]
    fn order_monotonicity_on_gaussian_targets() {
        // Off-center Gaussian so every added order has signal to absorb.
        let f = |x: f64, y: f64| {
            let dx = x - 0.3;
            let dy = y + 0.2;
            (-(dx * dx + 0.8 * dy * dy) / 0.9).exp()
        };
        let mut points = Vec::new();
        let mut values = Vec::new();
        for i in 0..21 {
            for j in 0..21 {
                let x = -1.0 + i as f64 * 0.1;
                let y = -1.0 + j as f64 * 0.1;
                points.push((x, y));
                values.push(f(x, y));
            }
        }
        let rmse = |k: usize| {
            fit_polynomial_density(&points, &values, k)
                .unwrap()
                .fit_report
                .rmse
        };
        let (r1, r2, r3) = (rmse(1), rmse(2), rmse(3));
        assert!(r2 < r1, "rmse k=2 {r2} !< k=1 {r1}");
        assert!(r3 < r2, "rmse k=3 {r3} !< k=2 {r2}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exact_recovery_of_polynomial_targets(
            order in 1usize..=3,
            seed_coeffs in prop::collection::vec(-1.0f64..1.0, 10),
            x0 in -3.0f64..3.0,
            y0 in -3.0f64..3.0,
            width in 0.5f64..4.0,
        ) {
            let m = coefficient_count(order);
            let truth = &seed_coeffs[..m];
            let exps = monomial_exponents(order);
            let eval_truth = |x: f64, y: f64| -> f64 {
                exps.iter().zip(truth).map(|(&(a, b), &c)| {
                    c * x.powi(a as i32) * y.powi(b as i32)
                }).sum()
            };
            let n = 7;
            let mut points = Vec::new();
            let mut values = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let x = x0 + width * i as f64 / (n - 1) as f64;
                    let y = y0 + width * j as f64 / (n - 1) as f64;
                    points.push((x, y));
                    values.push(eval_truth(x, y));
                }
            }
            let fit = fit_polynomial_density(&points, &values, order).unwrap();
            let norm: f64 = truth.iter().map(|c| c * c).sum::<f64>().sqrt();
            let err: f64 = fit.coefficients.iter().zip(truth)
                .map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            prop_assert!(
                err <= 1e-10 * norm.max(1e-6),
                "coefficient error {} for norm {}", err, norm
            );
            prop_assert!(fit.fit_report.rmse <= 1e-10);
        }

        #[test]
        fn normalized_poly_has_unit_mass_and_unit_marginals(
            order in 1usize..=3,
            seed_coeffs in prop::collection::vec(0.05f64..1.0, 10),
        ) {
            // Positive coefficients guarantee positive mass on [0,1]^2.
            let m = coefficient_count(order);
            let p = PolynomialDensity {
                order,
                coefficients: seed_coeffs[..m].to_vec(),
                domain: Domain { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.0 },
                fit_report: FitReport {
                    r_squared: 1.0, rmse: 0.0, n_points: 0,
                    condition_estimate: 1.0, negative_mass: None,
                },
            };
            let n = p.normalize().unwrap();
            let mass = n.cumulative(1.0, 1.0);
            prop_assert!((mass - 1.0).abs() <= 1e-12, "mass {}", mass);
            let fx = n.marginal_by_integration(Axis::Y);
            prop_assert!((fx.integral() - 1.0).abs() <= 1e-12);
            let fy = n.marginal_by_integration(Axis::X);
            prop_assert!((fy.integral() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn conditional_integrates_to_one(
            order in 1usize..=3,
            seed_coeffs in prop::collection::vec(0.05f64..1.0, 10),
            y0 in 0.0f64..1.0,
        ) {
            let m = coefficient_count(order);
            let p = PolynomialDensity {
                order,
                coefficients: seed_coeffs[..m].to_vec(),
                domain: Domain { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.0 },
                fit_report: FitReport {
                    r_squared: 1.0, rmse: 0.0, n_points: 0,
                    condition_estimate: 1.0, negative_mass: None,
                },
            };
            let c = p.conditional_density(Axis::Y, y0).unwrap();
            prop_assert!((c.integral() - 1.0).abs() <= 1e-9);
        }

        #[test]
        fn fit_is_equivariant_under_input_shifts(
            shift_x in -5.0f64..5.0,
            shift_y in -5.0f64..5.0,
        ) {
            let f = |x: f64, y: f64| 0.4 + 0.3 * x - 0.2 * y + 0.1 * x * y;
            let mut points = Vec::new();
            let mut values = Vec::new();
            for i in 0..8 {
                for j in 0..8 {
                    let x = i as f64 / 7.0;
                    let y = j as f64 / 7.0;
                    points.push((x, y));
                    values.push(f(x, y));
                }
            }
            let base = fit_polynomial_density(&points, &values, 2).unwrap();
            let shifted: Vec<(f64, f64)> = points.iter()
                .map(|&(x, y)| (x + shift_x, y + shift_y)).collect();
            let refit = fit_polynomial_density(&shifted, &values, 2).unwrap();
            for &(x, y) in points.iter().take(20) {
                let a = base.eval(x, y);
                let b = refit.eval(x + shift_x, y + shift_y);
                prop_assert!((a - b).abs() <= 1e-9, "{} vs {}", a, b);
            }
        }
    }
}
