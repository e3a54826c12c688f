//! Synthetic data with known ground truth, a KDE baseline, and error
//! metrics: the validation harness for the estimators.
//!
//! Every generator is deterministic given its parameters and seed. The
//! random source is ChaCha12 seeded from a `u64`, with one sub-stream per
//! shock source: stream 0 carries the primary shocks (price innovations,
//! the first Gaussian coordinate), stream 1 the secondary ones (variance
//! innovations, the second coordinate). Keeping the streams separate makes
//! paths with shared primary shocks comparable across models.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{PriceSeries, SamplePairs};

pub mod analytic;
mod kde;
mod metrics;

pub use kde::{kde_curve, kde_surface, silverman_bandwidth, Bandwidth};
pub use metrics::{error_report_curve, error_report_surface, ErrorReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid generator parameters: {0}")]
    BadParams(String),
    #[error(
        "covariance is not symmetric positive definite (smallest eigenvalue {min_eigenvalue:e})"
    )]
    BadCovariance { min_eigenvalue: f64 },
    #[error("bandwidth must be positive and finite, got {0}")]
    BadBandwidth(f64),
    #[error("estimate grid does not match the requested evaluation grid")]
    GridMismatch,
}

/// Seeded shock stream `stream` for seed `seed` (see module docs).
fn shock_stream(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Geometric Brownian motion parameters. `mu` is the drift per unit time,
/// `sigma` the volatility per sqrt unit time, `dt` the step in the same
/// units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub s0: f64,
    pub mu: f64,
    pub sigma: f64,
    pub dt: f64,
    pub n_steps: usize,
    #[serde(default)]
    pub seed: u64,
}

impl GbmParams {
    fn validate(&self) -> Result<(), SynthError> {
        if self.s0 <= 0.0 || !self.s0.is_finite() {
            return Err(SynthError::BadParams(format!(
                "s0 must be positive, got {}",
                self.s0
            )));
        }
        if self.sigma < 0.0 || !self.sigma.is_finite() || !self.mu.is_finite() {
            return Err(SynthError::BadParams(
                "sigma must be >= 0 and mu finite".into(),
            ));
        }
        if self.dt <= 0.0 || !self.dt.is_finite() {
            return Err(SynthError::BadParams(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.n_steps < 1 {
            return Err(SynthError::BadParams("n_steps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Exact-in-distribution GBM path:
/// `S_{t+1} = S_t * exp((mu - sigma^2/2) dt + sigma sqrt(dt) Z_t)`.
/// Identical seed gives a bit-identical path.
pub fn gen_gbm(params: &GbmParams) -> Result<PriceSeries, SynthError> {
    params.validate()?;
    let mut rng = shock_stream(params.seed, 0);
    let drift = (params.mu - 0.5 * params.sigma * params.sigma) * params.dt;
    let diffusion = params.sigma * params.dt.sqrt();
    let mut prices = Vec::with_capacity(params.n_steps + 1);
    let mut s = params.s0;
    prices.push(s);
    for _ in 0..params.n_steps {
        let z: f64 = rng.sample(StandardNormal);
        s *= (drift + diffusion * z).exp();
        prices.push(s);
    }
    PriceSeries::from_prices(prices, params.dt)
        .map_err(|e| SynthError::BadParams(format!("path left the valid price range: {e}")))
}

/// Heston stochastic-variance parameters. `xi` is the volatility of
/// variance, `rho` the shock correlation in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HestonParams {
    pub s0: f64,
    pub v0: f64,
    pub kappa: f64,
    pub theta: f64,
    pub xi: f64,
    pub rho: f64,
    pub dt: f64,
    pub n_steps: usize,
    #[serde(default)]
    pub seed: u64,
}

impl HestonParams {
    fn validate(&self) -> Result<(), SynthError> {
        let positive = [
            ("s0", self.s0),
            ("v0", self.v0),
            ("kappa", self.kappa),
            ("theta", self.theta),
            ("dt", self.dt),
        ];
        for (name, v) in positive {
            if v <= 0.0 || !v.is_finite() {
                return Err(SynthError::BadParams(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.xi < 0.0 || !self.xi.is_finite() {
            return Err(SynthError::BadParams(format!(
                "xi must be >= 0, got {}",
                self.xi
            )));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(SynthError::BadParams(format!(
                "rho must lie in [-1, 1], got {}",
                self.rho
            )));
        }
        if self.n_steps < 1 {
            return Err(SynthError::BadParams("n_steps must be >= 1".into()));
        }
        Ok(())
    }

    /// Feller ratio `2 kappa theta / xi^2`; values below 1 mean the variance
    /// can reach zero. Reported as a diagnostic, never enforced.
    pub fn feller_ratio(&self) -> f64 {
        2.0 * self.kappa * self.theta / (self.xi * self.xi)
    }
}

/// Full-truncation Euler Heston path. Returns the price series and the
/// latent variance path (length `n_steps + 1`) for oracle use.
///
/// `V_{t+1} = V_t + kappa (theta - V_t^+) dt + xi sqrt(V_t^+ dt) W_t` with
/// `V^+ = max(V, 0)`; prices use `S_{t+1} = S_t exp(-V_t^+ dt / 2 +
/// sqrt(V_t^+ dt) Z_t)` with `corr(Z, W) = rho`. The square-root argument is
/// non-negative by construction.
pub fn gen_heston(params: &HestonParams) -> Result<(PriceSeries, Vec<f64>), SynthError> {
    params.validate()?;
    let mut price_shocks = shock_stream(params.seed, 0);
    let mut var_shocks = shock_stream(params.seed, 1);
    let cross = (1.0 - params.rho * params.rho).sqrt();

    let mut prices = Vec::with_capacity(params.n_steps + 1);
    let mut variances = Vec::with_capacity(params.n_steps + 1);
    let mut s = params.s0;
    let mut v = params.v0;
    prices.push(s);
    variances.push(v);
    for _ in 0..params.n_steps {
        let z: f64 = price_shocks.sample(StandardNormal);
        let w_perp: f64 = var_shocks.sample(StandardNormal);
        let w = params.rho * z + cross * w_perp;
        let v_plus = v.max(0.0);
        debug_assert!(v_plus >= 0.0);
        s *= (-0.5 * v_plus * params.dt + (v_plus * params.dt).sqrt() * z).exp();
        v += params.kappa * (params.theta - v_plus) * params.dt
            + params.xi * (v_plus * params.dt).sqrt() * w;
        prices.push(s);
        variances.push(v);
    }
    let series = PriceSeries::from_prices(prices, params.dt)
        .map_err(|e| SynthError::BadParams(format!("path left the valid price range: {e}")))?;
    Ok((series, variances))
}

/// Correlated Gaussian pairs via the Cholesky factor of `cov`, seeded and
/// deterministic. The first coordinate draws from stream 0, the second from
/// stream 1.
pub fn gen_bivariate_gaussian(
    mean: (f64, f64),
    cov: [[f64; 2]; 2],
    n: usize,
    seed: u64,
) -> Result<SamplePairs, SynthError> {
    let [[a, b], [b2, c]] = cov;
    let scale = a.abs().max(c.abs()).max(1e-300);
    if !a.is_finite() || !b.is_finite() || !b2.is_finite() || !c.is_finite() {
        return Err(SynthError::BadParams("covariance must be finite".into()));
    }
    if (b - b2).abs() > 1e-12 * scale {
        return Err(SynthError::BadParams("covariance must be symmetric".into()));
    }
    // Smallest eigenvalue of [[a, b], [b, c]] in closed form.
    let min_eigenvalue = 0.5 * ((a + c) - ((a - c).powi(2) + 4.0 * b * b).sqrt());
    if min_eigenvalue <= 1e-10 {
        return Err(SynthError::BadCovariance { min_eigenvalue });
    }
    if n < 2 {
        return Err(SynthError::BadParams(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    let l11 = a.sqrt();
    let l21 = b / l11;
    let l22 = (c - l21 * l21).sqrt();
    let mut first = shock_stream(seed, 0);
    let mut second = shock_stream(seed, 1);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let z1: f64 = first.sample(StandardNormal);
        let z2: f64 = second.sample(StandardNormal);
        xs.push(mean.0 + l11 * z1);
        ys.push(mean.1 + l21 * z1 + l22 * z2);
    }
    SamplePairs::new(xs, ys)
        .map_err(|e| SynthError::BadParams(format!("generated samples are not finite: {e}")))
}
