//! Ornstein-Uhlenbeck process: exact transition density, maximum-likelihood
//! estimation, and exact-step simulation.
//!
//! The process is dx = mu (theta - x) dt + sigma dB. Over a step of length
//! dt the transition is Gaussian with conditional mean
//! `theta + (x - theta) e^{-mu dt}` and conditional variance
//! `sigma^2 (1 - e^{-2 mu dt}) / (2 mu)`, so the likelihood is exact at any
//! step size and simulation incurs no discretization error.

use crate::error::{Error, Result};
use chrono::{Days, NaiveDate};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::TAU;

/// Year-fraction of one trading day; the engine annualizes with 252 throughout.
pub const TRADING_DT: f64 = 1.0 / 252.0;

/// Search range for the mean-reversion speed, per year.
const MU_LO: f64 = 1e-4;
const MU_HI: f64 = 1e4;
/// Points in the coarse bracketing scan over ln(mu).
const SCAN_POINTS: usize = 65;
/// Golden-section stops when the ln(mu) bracket is this narrow, i.e. at
/// relative tolerance 1e-10 on mu.
const LN_MU_TOL: f64 = 1e-10;

/// Relative sample-variance floor below which a series is considered
/// constant and the likelihood unbounded in the sigma -> 0 direction.
const DEGENERACY_REL_VAR: f64 = 1e-18;

/// A fitted (or specified) OU parameter triple plus the average
/// per-observation log-likelihood attained at it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuParams {
    /// Long-run mean, in portfolio-value units.
    pub theta: f64,
    /// Mean-reversion speed per year.
    pub mu: f64,
    /// Volatility in portfolio-value units per sqrt(year).
    pub sigma: f64,
    /// Average per-observation log-likelihood at these parameters.
    pub avg_loglik: f64,
}

impl OuParams {
    pub fn new(theta: f64, mu: f64, sigma: f64, avg_loglik: f64) -> Result<Self> {
        if !mu.is_finite() || mu <= 0.0 {
            return Err(Error::InvalidInput(format!("mu must be positive, got {mu}")));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if !theta.is_finite() || !avg_loglik.is_finite() {
            return Err(Error::InvalidInput(
                "theta and avg_loglik must be finite".into(),
            ));
        }
        Ok(Self {
            theta,
            mu,
            sigma,
            avg_loglik,
        })
    }

    /// One-step decay factor e^{-mu dt} and conditional variance.
    pub(crate) fn step_moments(&self, dt: f64) -> (f64, f64) {
        let b = (-self.mu * dt).exp();
        let var = self.sigma * self.sigma * (1.0 - b * b) / (2.0 * self.mu);
        (b, var)
    }
}

/// Dated portfolio values x_t.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSeries {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl ValueSeries {
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        if dates.len() < 2 {
            return Err(Error::InsufficientData(
                "a value series needs at least 2 observations".into(),
            ));
        }
        if !dates.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("dates must be strictly increasing".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value {v}")));
        }
        Ok(Self { dates, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn sample_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, ss / (n - 1.0))
}

fn is_degenerate(values: &[f64]) -> bool {
    let (mean, var) = sample_variance(values);
    var <= DEGENERACY_REL_VAR * mean * mean
}

/// Average per-observation log of the exact Gaussian transition density,
/// `(1/n) sum ln phi(x_i | x_{i-1})` over the n = len-1 steps.
pub fn avg_log_likelihood(series: &ValueSeries, params: &OuParams, dt: f64) -> Result<f64> {
    avg_log_likelihood_values(&series.values, params, dt)
}

/// Same as [`avg_log_likelihood`] on a bare value slice; the likelihood
/// depends only on consecutive value pairs and dt, never on dates.
pub fn avg_log_likelihood_values(values: &[f64], params: &OuParams, dt: f64) -> Result<f64> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    if values.len() < 2 {
        return Err(Error::InsufficientData(
            "likelihood needs at least 2 observations".into(),
        ));
    }
    if is_degenerate(values) {
        return Err(Error::DegenerateSeries);
    }
    let (b, var) = params.step_moments(dt);
    let norm = -0.5 * (TAU * var).ln();
    let mut total = 0.0;
    for w in values.windows(2) {
        let mean = params.theta + (w[0] - params.theta) * b;
        let resid = w[1] - mean;
        total += norm - resid * resid / (2.0 * var);
    }
    Ok(total / (values.len() - 1) as f64)
}

/// Sufficient statistics of the lag-1 regression underlying the profile
/// likelihood: centered second moments of (x_{i-1}, x_i) pairs.
struct LagStats {
    mean_prev: f64,
    mean_next: f64,
    cov_pp: f64,
    cov_pn: f64,
    cov_nn: f64,
}

impl LagStats {
    fn from_values(values: &[f64]) -> Self {
        let n = (values.len() - 1) as f64;
        let prev = &values[..values.len() - 1];
        let next = &values[1..];
        let mean_prev = prev.iter().sum::<f64>() / n;
        let mean_next = next.iter().sum::<f64>() / n;
        let (mut pp, mut pn, mut nn) = (0.0, 0.0, 0.0);
        for (u, y) in prev.iter().zip(next) {
            let du = u - mean_prev;
            let dy = y - mean_next;
            pp += du * du;
            pn += du * dy;
            nn += dy * dy;
        }
        Self {
            mean_prev,
            mean_next,
            cov_pp: pp / n,
            cov_pn: pn / n,
            cov_nn: nn / n,
        }
    }

    /// Mean squared residual of regressing x_i on x_{i-1} with slope b and
    /// the likelihood-optimal intercept; this is the profiled conditional
    /// variance, so the profiled average log-likelihood is
    /// -(ln(2 pi v) + 1) / 2.
    fn profiled_variance(&self, b: f64) -> f64 {
        (self.cov_nn - 2.0 * b * self.cov_pn + b * b * self.cov_pp).max(0.0)
    }

    fn profiled_loglik(&self, mu: f64, dt: f64) -> f64 {
        let v = self.profiled_variance((-mu * dt).exp());
        if v <= 0.0 {
            return f64::INFINITY;
        }
        -0.5 * ((TAU * v).ln() + 1.0)
    }

    fn theta_for(&self, b: f64) -> f64 {
        (self.mean_next - b * self.mean_prev) / (1.0 - b)
    }
}

/// Maximum-likelihood OU fit.
///
/// For each candidate mu the long-run mean and conditional variance have
/// closed-form optima, so the search is one-dimensional: a coarse bracketing
/// scan over ln(mu) in [1e-4, 1e4] followed by golden-section refinement to
/// relative tolerance 1e-10. A maximum pinned to either end of the range is
/// reported as `NoConvergence` rather than returned as a fake optimum.
pub fn fit_mle(series: &ValueSeries, dt: f64) -> Result<OuParams> {
    fit_mle_values(&series.values, dt)
}

/// Same as [`fit_mle`] on a bare value slice.
pub fn fit_mle_values(values: &[f64], dt: f64) -> Result<OuParams> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    if values.len() < 3 {
        return Err(Error::InsufficientData(
            "MLE needs at least 3 observations".into(),
        ));
    }
    if is_degenerate(values) {
        return Err(Error::DegenerateSeries);
    }

    let stats = LagStats::from_values(values);
    let (ln_lo, ln_hi) = (MU_LO.ln(), MU_HI.ln());

    // Coarse scan: the profile is unimodal in ln(mu) (the residual variance
    // is quadratic in b = e^{-mu dt}, and b is monotone in mu), so an
    // interior scan argmax brackets the maximum.
    let step = (ln_hi - ln_lo) / (SCAN_POINTS - 1) as f64;
    let mut best_i = 0;
    let mut best_ll = f64::NEG_INFINITY;
    for i in 0..SCAN_POINTS {
        let ll = stats.profiled_loglik((ln_lo + step * i as f64).exp(), dt);
        if ll > best_ll {
            best_ll = ll;
            best_i = i;
        }
    }
    if best_i == 0 || best_i == SCAN_POINTS - 1 {
        return Err(Error::NoConvergence { lo: MU_LO, hi: MU_HI });
    }

    // Golden-section on the bracketing interval.
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut lo = ln_lo + step * (best_i - 1) as f64;
    let mut hi = ln_lo + step * (best_i + 1) as f64;
    let mut m1 = hi - inv_phi * (hi - lo);
    let mut m2 = lo + inv_phi * (hi - lo);
    let mut f1 = stats.profiled_loglik(m1.exp(), dt);
    let mut f2 = stats.profiled_loglik(m2.exp(), dt);
    while hi - lo > LN_MU_TOL {
        if f1 < f2 {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + inv_phi * (hi - lo);
            f2 = stats.profiled_loglik(m2.exp(), dt);
        } else {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - inv_phi * (hi - lo);
            f1 = stats.profiled_loglik(m1.exp(), dt);
        }
    }

    let mu = (0.5 * (lo + hi)).exp();
    let b = (-mu * dt).exp();
    let v = stats.profiled_variance(b);
    if v <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let theta = stats.theta_for(b);
    let sigma = (v * 2.0 * mu / (1.0 - b * b)).sqrt();
    let avg_loglik = -0.5 * ((TAU * v).ln() + 1.0);
    OuParams::new(theta, mu, sigma, avg_loglik)
}

/// Standard deviation of the stationary distribution, sigma / sqrt(2 mu).
/// This is the denominator of the s-score.
pub fn equilibrium_sd(params: &OuParams) -> f64 {
    params.sigma / (2.0 * params.mu).sqrt()
}

/// Simulates the process by the exact one-step recursion
/// `x_{i+1} = theta + (x_i - theta) e^{-mu dt} + sd z_i` with seeded Gaussian
/// draws. The returned series holds `n_steps + 1` values including `x0` and
/// is deterministic for a fixed seed.
pub fn simulate(params: &OuParams, x0: f64, n_steps: usize, dt: f64, seed: u64) -> Result<ValueSeries> {
    if n_steps < 1 {
        return Err(Error::InvalidInput("n_steps must be at least 1".into()));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let (b, var) = params.step_moments(dt);
    let sd = var.sqrt();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let normal = StandardNormal;

    let mut values = Vec::with_capacity(n_steps + 1);
    values.push(x0);
    let mut x = x0;
    for _ in 0..n_steps {
        let z: f64 = normal.sample(&mut rng);
        x = params.theta + (x - params.theta) * b + sd * z;
        values.push(x);
    }
    let base = NaiveDate::from_ymd_opt(2000, 1, 3).unwrap();
    let dates = (0..=n_steps as u64).map(|i| base + Days::new(i)).collect();
    ValueSeries::new(dates, values)
}
