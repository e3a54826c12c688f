//! Per-step volatility and volatility-of-volatility estimation.
//!
//! The volatility proxy at step t is the relative price move
//! `v_t = |S_{t+1} - S_t| / S_t` (forward difference anchored at t). The
//! volatility-of-volatility applies the same idea to the volatility series
//! itself, in one of two readings selected by [`VolVolMode`]:
//!
//! - `Literal`: the difference operator acts on the squared volatility,
//!   `gamma_t = |v_{t+1}^2 - v_t^2| / v_t`;
//! - `Analogous`: the exact structural analogue of the volatility formula,
//!   `gamma_t = |v_{t+1} - v_t| / v_t`.
//!
//! Steps with `v_t = 0` cannot be normalized and are dropped with a count in
//! the result; constant-price stretches are common in real tick data.
//!
//! Both quantities are per-step and carry no annualization. Display scaling
//! by sqrt(1/dt) is a presentation concern left to callers.

use serde::Serialize;
use thiserror::Error;

use crate::numerics::kahan_sum;
use crate::series::PriceSeries;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VolError {
    #[error("volatility series too short: need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("rolling window {window} is outside 1..={len}")]
    BadWindow { window: usize, len: usize },
}

/// Which reading of the volatility-of-volatility formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VolVolMode {
    Literal,
    Analogous,
}

impl std::fmt::Display for VolVolMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VolVolMode::Literal => write!(f, "literal"),
            VolVolMode::Analogous => write!(f, "analogous"),
        }
    }
}

impl std::str::FromStr for VolVolMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(VolVolMode::Literal),
            "analogous" => Ok(VolVolMode::Analogous),
            other => Err(format!("unknown vol-of-vol mode `{other}`")),
        }
    }
}

/// Estimated per-step volatility, aligned to the source price series:
/// `values[i]` describes the step from `start_index + i` to
/// `start_index + i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolSeries {
    pub values: Vec<f64>,
    pub start_index: usize,
    pub dt: f64,
}

/// Estimated per-step volatility of volatility. `steps[i]` is the source
/// step index of `values[i]`; steps where the volatility was zero are
/// excluded and counted in `dropped_count`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolVolSeries {
    pub values: Vec<f64>,
    pub steps: Vec<usize>,
    pub mode: VolVolMode,
    pub dropped_count: usize,
    pub dt: f64,
}

/// `v_t = |S_{t+1} - S_t| / S_t` for every adjacent pair. Positivity of the
/// prices is guaranteed by [`PriceSeries`], so this cannot fail.
pub fn vol_series(prices: &PriceSeries) -> VolSeries {
    let p = prices.prices();
    let values = p.windows(2).map(|w| (w[1] - w[0]).abs() / w[0]).collect();
    VolSeries {
        values,
        start_index: 0,
        dt: prices.dt(),
    }
}

/// `gamma_t` per retained step, in the requested mode (see module docs).
pub fn volvol_series(vols: &VolSeries, mode: VolVolMode) -> Result<VolVolSeries, VolError> {
    if vols.values.len() < 2 {
        return Err(VolError::TooShort {
            needed: 2,
            got: vols.values.len(),
        });
    }
    let mut values = Vec::with_capacity(vols.values.len() - 1);
    let mut steps = Vec::with_capacity(vols.values.len() - 1);
    let mut dropped_count = 0usize;
    for (t, w) in vols.values.windows(2).enumerate() {
        let (v, v_next) = (w[0], w[1]);
        if v == 0.0 {
            dropped_count += 1;
            continue;
        }
        let gamma = match mode {
            VolVolMode::Literal => (v_next * v_next - v * v).abs() / v,
            VolVolMode::Analogous => (v_next - v).abs() / v,
        };
        values.push(gamma);
        steps.push(vols.start_index + t);
    }
    Ok(VolVolSeries {
        values,
        steps,
        mode,
        dropped_count,
        dt: vols.dt,
    })
}

/// Mean over each window of `window` consecutive values; output length is
/// `len - window + 1`. Each window is summed independently left to right, so
/// the result is deterministic.
pub fn rolling_mean(values: &[f64], window: usize) -> Result<Vec<f64>, VolError> {
    if window < 1 || window > values.len() {
        return Err(VolError::BadWindow {
            window,
            len: values.len(),
        });
    }
    Ok(values
        .windows(window)
        .map(|w| kahan_sum(w.iter().copied()) / window as f64)
        .collect())
}

impl VolSeries {
    /// Rolling mean aligned at each window's first step.
    pub fn rolling_mean(&self, window: usize) -> Result<VolSeries, VolError> {
        Ok(VolSeries {
            values: rolling_mean(&self.values, window)?,
            start_index: self.start_index,
            dt: self.dt,
        })
    }
}

impl VolVolSeries {
    /// Rolling mean over the retained values, aligned at each window's first
    /// retained step. `dropped_count` carries over from construction.
    pub fn rolling_mean(&self, window: usize) -> Result<VolVolSeries, VolError> {
        let values = rolling_mean(&self.values, window)?;
        let steps = self.steps[..values.len()].to_vec();
        Ok(VolVolSeries {
            values,
            steps,
            mode: self.mode,
            dropped_count: self.dropped_count,
            dt: self.dt,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn prices(p: Vec<f64>) -> PriceSeries {
        PriceSeries::from_prices(p, 1.0).unwrap()
    }

    #[test]
    fn vol_of_simple_path() {
        let v = vol_series(&prices(vec![100.0, 110.0, 99.0]));
        assert_eq!(v.values.len(), 2);
        assert!((v.values[0] - 0.10).abs() < 1e-15);
        assert!((v.values[1] - 0.10).abs() < 1e-15);
    }

    #[test]
    fn constant_prices_give_zero_vol() {
        let v = vol_series(&prices(vec![5.0, 5.0, 5.0, 5.0]));
        assert_eq!(v.values, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn matches_sqrt_of_squares_form() {
        let p = prices(vec![100.0, 103.7, 96.2, 101.9]);
        let v = vol_series(&p);
        for (w, &got) in p.prices().windows(2).zip(&v.values) {
            let d = w[1] - w[0];
            let printed_form = ((d * d) / (w[0] * w[0])).sqrt();
            assert!((got - printed_form).abs() <= 1e-15 * printed_form.abs());
        }
    }

    #[test]
    fn volvol_literal_example() {
        let vols = VolSeries {
            values: vec![0.1, 0.2],
            start_index: 0,
            dt: 1.0,
        };
        let g = volvol_series(&vols, VolVolMode::Literal).unwrap();
        assert_eq!(g.values.len(), 1);
        assert!((g.values[0] - 0.3).abs() < 1e-15);
        assert_eq!(g.dropped_count, 0);
    }

    #[test]
    fn volvol_analogous_example() {
        let vols = VolSeries {
            values: vec![0.1, 0.2],
            start_index: 0,
            dt: 1.0,
        };
        let g = volvol_series(&vols, VolVolMode::Analogous).unwrap();
        assert!((g.values[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn volvol_drops_zero_volatility_steps() {
        let vols = VolSeries {
            values: vec![0.0, 0.2, 0.2],
            start_index: 0,
            dt: 1.0,
        };
        let g = volvol_series(&vols, VolVolMode::Literal).unwrap();
        assert_eq!(g.values, vec![0.0]);
        assert_eq!(g.steps, vec![1]);
        assert_eq!(g.dropped_count, 1);
        assert_eq!(g.values.len() + g.dropped_count, vols.values.len() - 1);
    }

    #[test]
    fn volvol_too_short() {
        let vols = VolSeries {
            values: vec![0.1],
            start_index: 0,
            dt: 1.0,
        };
        assert!(matches!(
            volvol_series(&vols, VolVolMode::Literal),
            Err(VolError::TooShort { .. })
        ));
    }

    #[test]
    fn rolling_mean_examples() {
        assert_eq!(rolling_mean(&[0.1, 0.1, 0.4], 2).unwrap(), vec![0.1, 0.25]);
        let vals = [0.3, 0.7, 0.2];
        assert_eq!(rolling_mean(&vals, 1).unwrap(), vals.to_vec());
        assert!(matches!(
            rolling_mean(&[0.1, 0.2], 3),
            Err(VolError::BadWindow { .. })
        ));
    }

    proptest! {
        #[test]
        fn scaling_prices_by_a_power_of_two_is_bit_exact(
            p in prop::collection::vec(1e-3f64..1e3, 2..50),
            k in -8i32..8,
        ) {
            // Power-of-two scaling is exact in binary floating point, so the
            // ratio cancels bit for bit; arbitrary scales cancel only to
            // rounding.
            let c = (2.0f64).powi(k);
            let scaled: Vec<f64> = p.iter().map(|&v| c * v).collect();
            let v1 = vol_series(&prices(p));
            let v2 = vol_series(&prices(scaled));
            prop_assert_eq!(v1.values, v2.values);
        }

        #[test]
        fn scaling_prices_by_any_constant_cancels_to_rounding(
            p in prop::collection::vec(1e-2f64..1e2, 2..50),
            c in 0.1f64..10.0,
        ) {
            let scaled: Vec<f64> = p.iter().map(|&v| c * v).collect();
            let v1 = vol_series(&prices(p));
            let v2 = vol_series(&prices(scaled));
            for (a, b) in v1.values.iter().zip(&v2.values) {
                // Rounding of c*s perturbs the increment by ~eps*max(s0,s1),
                // i.e. ~eps*(1+v) after division by s0; near-equal prices
                // make a bound relative to v itself meaningless.
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }

        #[test]
        fn literal_is_analogous_times_pair_sum(
            vals in prop::collection::vec(1e-4f64..1.0, 2..60),
        ) {
            let vols = VolSeries { values: vals.clone(), start_index: 0, dt: 1.0 };
            let lit = volvol_series(&vols, VolVolMode::Literal).unwrap();
            let ana = volvol_series(&vols, VolVolMode::Analogous).unwrap();
            for (i, (&gl, &ga)) in lit.values.iter().zip(&ana.values).enumerate() {
                let expected = ga * (vals[i + 1] + vals[i]);
                // The squared difference cancels when v_{t+1} ~ v_t, so the
                // rounding floor scales with (v'^2 + v^2)/v, not with gamma.
                let floor = (vals[i + 1].powi(2) + vals[i].powi(2)) / vals[i];
                prop_assert!(
                    (gl - expected).abs() <= 8.0 * f64::EPSILON * floor.max(expected.abs()),
                    "step {}: literal {} vs analogous-derived {}", i, gl, expected
                );
            }
        }

        #[test]
        fn rolling_never_reads_outside_bounds(
            p in prop::collection::vec(1.0f64..10.0, 3..80),
            window in 1usize..20,
        ) {
            let v = vol_series(&prices(p));
            match v.rolling_mean(window) {
                Ok(r) => {
                    prop_assert_eq!(r.values.len(), v.values.len() - window + 1);
                    prop_assert!(r.values.iter().all(|x| x.is_finite()));
                }
                Err(VolError::BadWindow { .. }) => prop_assert!(window > v.values.len()),
                Err(e) => return Err(TestCaseError::fail(format!("unexpected {e:?}"))),
            }
        }
    }
}
