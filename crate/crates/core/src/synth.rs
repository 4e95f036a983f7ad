//! Synthetic two-asset worlds with a planted hedge ratio.
//!
//! Leg A follows a geometric Brownian motion. Leg B is priced so that at
//! the planted short-leg dollar amount `b_star` the dollar-normalized
//! portfolio is exactly a simulated OU path, while any other hedge mixes in
//! a share of the random-walk leg and fits worse. Used by the browser demo,
//! the sample-data generator, and the test suites.

use crate::data_ingest::{AlignedPair, PriceSeries};
use crate::error::{Error, Result};
use crate::ou_model::{simulate, OuParams, TRADING_DT};
use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

const GBM_SEED_SALT: u64 = 0xa076_1d64_78bd_642f;

#[derive(Debug, Clone)]
pub struct WorldConfig {
    pub n_days: usize,
    /// Planted short-leg dollar amount; the spread reverts around 1 - b_star.
    pub b_star: f64,
    /// Mean-reversion speed of the planted spread, per year.
    pub mu: f64,
    /// Volatility of the planted spread.
    pub sigma: f64,
    pub gbm_drift: f64,
    pub gbm_vol: f64,
    pub price_a0: f64,
    pub price_b0: f64,
    pub start: NaiveDate,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            n_days: 1400,
            b_star: 0.5,
            mu: 10.0,
            sigma: 0.10,
            gbm_drift: 0.03,
            gbm_vol: 0.12,
            price_a0: 100.0,
            price_b0: 50.0,
            start: NaiveDate::from_ymd_opt(2010, 1, 4).unwrap(),
        }
    }
}

/// Geometric Brownian motion path of `n` daily closes from a seeded generator.
pub fn gbm_path(n: usize, s0: f64, drift: f64, vol: f64, dt: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let step_drift = (drift - 0.5 * vol * vol) * dt;
    let step_vol = vol * dt.sqrt();
    let mut out = Vec::with_capacity(n);
    let mut s = s0;
    out.push(s);
    for _ in 1..n {
        let z: f64 = normal.sample(&mut rng);
        s *= (step_drift + step_vol * z).exp();
        out.push(s);
    }
    out
}

/// `n` consecutive weekdays starting at `start` (rolled forward off a weekend).
pub fn weekday_calendar(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut dates = Vec::with_capacity(n);
    let mut d = start;
    while dates.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            dates.push(d);
        }
        d = d + Days::new(1);
    }
    dates
}

/// Builds the aligned pair for one seeded world.
pub fn ou_pair_world(cfg: &WorldConfig, seed: u64) -> Result<AlignedPair> {
    if cfg.n_days < 3 {
        return Err(Error::InvalidInput("world needs at least 3 days".into()));
    }
    let b_star_ok = cfg.b_star > 0.0 && cfg.b_star <= 1.0;
    if !b_star_ok {
        return Err(Error::InvalidInput(format!(
            "b_star must lie in (0, 1], got {}",
            cfg.b_star
        )));
    }
    let theta = 1.0 - cfg.b_star;
    let spread_params = OuParams::new(theta, cfg.mu, cfg.sigma, 0.0)?;
    let spread = simulate(&spread_params, theta, cfg.n_days - 1, TRADING_DT, seed)?;
    let leg_a = gbm_path(
        cfg.n_days,
        cfg.price_a0,
        cfg.gbm_drift,
        cfg.gbm_vol,
        TRADING_DT,
        seed ^ GBM_SEED_SALT,
    );

    // Invert x = alpha a - beta b at the planted hedge to price leg B.
    let alpha = 1.0 / cfg.price_a0;
    let beta = cfg.b_star / cfg.price_b0;
    let leg_b: Vec<f64> = leg_a
        .iter()
        .zip(&spread.values)
        .map(|(a, x)| (alpha * a - x) / beta)
        .collect();
    if leg_b.iter().any(|p| !p.is_finite() || *p <= 0.0) {
        return Err(Error::InvalidInput(
            "world parameters produced a non-positive price; lower gbm_vol or sigma".into(),
        ));
    }

    let dates = weekday_calendar(cfg.start, cfg.n_days);
    Ok(AlignedPair {
        series_a: PriceSeries::new("AAA", dates.clone(), leg_a)?,
        series_b: PriceSeries::new("BBB", dates, leg_b)?,
    })
}
