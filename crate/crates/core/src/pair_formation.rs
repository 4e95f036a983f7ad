//! Static pair construction: sweep the short-leg dollar amount B and keep
//! the hedge whose portfolio values fit an OU process with the highest
//! average log-likelihood.

use crate::data_ingest::AlignedPair;
use crate::error::{Error, Result};
use crate::ou_model::{fit_mle_values, OuParams, ValueSeries};

/// A formed two-leg portfolio: long `alpha` shares of `asset_a`, short
/// `beta` shares of `asset_b`, with share counts fixed by the dollar
/// amounts at the first formation date and never re-hedged.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSpec {
    pub asset_a: String,
    pub asset_b: String,
    /// Dollars invested long; fixed at 1.
    pub invest_a: f64,
    /// Dollars shorted, in (0, 1].
    pub invest_b: f64,
    /// Shares of the long leg, invest_a / first price of asset_a.
    pub alpha: f64,
    /// Shares of the short leg, invest_b / first price of asset_b.
    pub beta: f64,
    /// The OU fit over the formation window at the selected B.
    pub fitted: OuParams,
}

/// Portfolio value series x_t = alpha a_t - beta b_t over the aligned dates.
pub fn portfolio_values(pair: &PairSpec, data: &AlignedPair) -> Result<ValueSeries> {
    if pair.asset_a != data.series_a.asset_id || pair.asset_b != data.series_b.asset_id {
        return Err(Error::TickerMismatch {
            pair_a: pair.asset_a.clone(),
            pair_b: pair.asset_b.clone(),
            data_a: data.series_a.asset_id.clone(),
            data_b: data.series_b.asset_id.clone(),
        });
    }
    ValueSeries::new(
        data.dates().to_vec(),
        spread_values(pair.alpha, pair.beta, data),
    )
}

/// The raw spread formula alpha a_t - beta b_t, usable with any weights.
pub fn spread_values(alpha: f64, beta: f64, data: &AlignedPair) -> Vec<f64> {
    data.series_a
        .prices
        .iter()
        .zip(&data.series_b.prices)
        .map(|(a, b)| alpha * a - beta * b)
        .collect()
}

/// Dollar cost of carrying the pair each day, alpha a_t + beta b_t.
pub fn cost_values(pair: &PairSpec, data: &AlignedPair) -> Vec<f64> {
    data.series_a
        .prices
        .iter()
        .zip(&data.series_b.prices)
        .map(|(a, b)| pair.alpha * a + pair.beta * b)
        .collect()
}

/// Forms the pair on `data` (the formation window) by fitting every B in
/// `b_grid` and keeping the one with the highest average log-likelihood,
/// ties broken by the smaller B. Candidates whose spread is degenerate or
/// whose likelihood has no interior maximum are skipped; if every candidate
/// fails the sweep reports `AllFitsFailed`.
pub fn form_pair(data: &AlignedPair, b_grid: &[f64], dt: f64) -> Result<PairSpec> {
    if b_grid.is_empty() {
        return Err(Error::InvalidInput("empty B grid".into()));
    }
    if let Some(&b) = b_grid.iter().find(|b| !(**b > 0.0 && **b <= 1.0)) {
        return Err(Error::InvalidInput(format!(
            "B grid entries must lie in (0, 1], got {b}"
        )));
    }
    if data.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "formation window has {} dates, need at least 3",
            data.len()
        )));
    }

    let first_a = data.series_a.prices[0];
    let first_b = data.series_b.prices[0];
    let alpha = 1.0 / first_a;

    let mut best: Option<(f64, f64, OuParams)> = None; // (B, beta, fit)
    for &b_dollars in b_grid {
        let beta = b_dollars / first_b;
        let values = spread_values(alpha, beta, data);
        let fit = match fit_mle_values(&values, dt) {
            Ok(fit) => fit,
            Err(Error::DegenerateSeries) | Err(Error::NoConvergence { .. }) => continue,
            Err(e) => return Err(e),
        };
        let better = match &best {
            None => true,
            Some((best_b, _, best_fit)) => {
                fit.avg_loglik > best_fit.avg_loglik
                    || (fit.avg_loglik == best_fit.avg_loglik && b_dollars < *best_b)
            }
        };
        if better {
            best = Some((b_dollars, beta, fit));
        }
    }

    let (invest_b, beta, fitted) = best.ok_or(Error::AllFitsFailed(b_grid.len()))?;
    Ok(PairSpec {
        asset_a: data.series_a.asset_id.clone(),
        asset_b: data.series_b.asset_id.clone(),
        invest_a: 1.0,
        invest_b,
        alpha,
        beta,
        fitted,
    })
}
