//! Uniform evaluation lattices for density estimation.
//!
//! Knot coordinates are always reproduced as `min + i * step` so that a grid
//! is fully described by its three scalars and every consumer sees bit-equal
//! knots.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("grid range is degenerate or inverted: [{0}, {1}]")]
    BadRange(f64, f64),
}

/// A 1-D uniform lattice `{min + i*step : 0 <= i < len}` with the last knot
/// not exceeding `max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid1d {
    min: f64,
    max: f64,
    step: f64,
    len: usize,
}

impl Grid1d {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self, GridError> {
        if !step.is_finite() || step <= 0.0 {
            return Err(GridError::BadStep(step));
        }
        if !min.is_finite() || !max.is_finite() || max <= min {
            return Err(GridError::BadRange(min, max));
        }
        let span = max - min;
        // floor((max-min)/step) knots past the first; the epsilon absorbs
        // division rounding when the span is an exact multiple of the step.
        let mut steps = (span / step + 1e-9).floor() as usize;
        while steps > 0 && min + steps as f64 * step > max + 1e-9 * span.max(step) {
            steps -= 1;
        }
        Ok(Grid1d {
            min,
            max,
            step,
            len: steps + 1,
        })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of knots.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false // a valid grid always has at least 2 knots (max > min)
    }

    /// Coordinate of knot `i`, bit-exactly `min + i*step`.
    pub fn knot(&self, i: usize) -> f64 {
        debug_assert!(i < self.len);
        self.min + i as f64 * self.step
    }

    pub fn knots(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.knot(i))
    }
}

/// A 2-D lattice as the product of two 1-D grids. Value arrays over the grid
/// are stored x-major: `values[ix * y.len() + iy]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid2d {
    pub x: Grid1d,
    pub y: Grid1d,
}

impl Grid2d {
    pub fn new(
        x_range: (f64, f64),
        dx: f64,
        y_range: (f64, f64),
        dy: f64,
    ) -> Result<Self, GridError> {
        Ok(Grid2d {
            x: Grid1d::new(x_range.0, x_range.1, dx)?,
            y: Grid1d::new(y_range.0, y_range.1, dy)?,
        })
    }

    /// Total knot count `nx * ny`.
    pub fn len(&self) -> usize {
        self.x.len() * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of knot `(ix, iy)` in x-major order.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.y.len() + iy
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knots_cover_range_inclusive() {
        let g = Grid1d::new(0.0, 1.0, 0.5).unwrap();
        let knots: Vec<f64> = g.knots().collect();
        assert_eq!(knots, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn last_knot_stays_inside_range() {
        let g = Grid1d::new(0.0, 1.0, 0.3).unwrap();
        let knots: Vec<f64> = g.knots().collect();
        assert_eq!(knots.len(), 4);
        assert_eq!(knots[0], 0.0);
        assert_eq!(knots[1], 0.3);
        assert!((knots[3] - 0.9).abs() < 1e-12);
        assert!(knots[3] <= 1.0);
    }

    #[test]
    fn negative_step_is_rejected() {
        assert!(matches!(
            Grid1d::new(0.0, 1.0, -0.1),
            Err(GridError::BadStep(_))
        ));
    }

    #[test]
    fn inverted_range_is_rejected() {
        assert!(matches!(
            Grid1d::new(1.0, 0.0, 0.1),
            Err(GridError::BadRange(..))
        ));
    }

    #[test]
    fn exact_multiple_span_includes_endpoint() {
        // 0.1 is not exactly representable; the count must still be 41.
        let g = Grid1d::new(-2.0, 2.0, 0.1).unwrap();
        assert_eq!(g.len(), 41);
        assert!((g.knot(40) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn knot_coordinates_are_reproducible() {
        let g = Grid1d::new(-1.5, 2.5, 0.25).unwrap();
        for (i, k) in g.knots().enumerate() {
            assert_eq!(k, -1.5 + i as f64 * 0.25);
        }
    }
}
