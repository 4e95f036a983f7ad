//! Wasm bindings for the browser demo. Three operations, all pure compute:
//! simulate an OU path, fit parameters to a shown path, and run a threshold
//! sweep on a seeded synthetic pair. Rendering stays on the JavaScript side,
//! so this crate also compiles and tests on native targets.

use oupairs_core::sweep::{
    evaluate_thresholds, run_sweep, select_best, signals_for_period, Period, StudyConfig,
};
use oupairs_core::synth::{ou_pair_world, WorldConfig};
use oupairs_core::{
    equilibrium_sd, fit_mle_values, form_pair, portfolio_values, run_backtest, OuParams,
    TRADING_DT,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct FitJson {
    theta: f64,
    mu: f64,
    sigma: f64,
    avg_loglik: f64,
    equilibrium_sd: f64,
}

impl From<&OuParams> for FitJson {
    fn from(p: &OuParams) -> Self {
        Self {
            theta: p.theta,
            mu: p.mu,
            sigma: p.sigma,
            avg_loglik: p.avg_loglik,
            equilibrium_sd: equilibrium_sd(p),
        }
    }
}

#[derive(Serialize)]
struct StudyJson {
    pair: FitJson,
    b_star: f64,
    s_open: Vec<f64>,
    s_close: Vec<f64>,
    /// Row-major Sharpe grid, `sharpe[i][j]` for `(s_open[i], s_close[j])`;
    /// null where the cell never trades.
    sharpe: Vec<Vec<Option<f64>>>,
    best_s_open: f64,
    best_s_close: f64,
    best_in_sharpe: f64,
    out_sharpe: Option<f64>,
    out_ann_return: f64,
    out_max_drawdown: f64,
    out_trades: usize,
    days: Vec<String>,
    x: Vec<f64>,
    s: Vec<f64>,
    position: Vec<i32>,
    equity: Vec<f64>,
}

fn simulate_path_inner(
    theta: f64,
    mu: f64,
    sigma: f64,
    x0: f64,
    n_days: u32,
    seed: u32,
) -> Result<Vec<f64>, String> {
    let params = OuParams::new(theta, mu, sigma, 0.0).map_err(|e| e.to_string())?;
    let path = oupairs_core::simulate(&params, x0, n_days.max(2) as usize - 1, TRADING_DT, seed as u64)
        .map_err(|e| e.to_string())?;
    Ok(path.values)
}

fn fit_values_inner(values: &[f64]) -> Result<String, String> {
    let fit = fit_mle_values(values, TRADING_DT).map_err(|e| e.to_string())?;
    serde_json::to_string(&FitJson::from(&fit)).map_err(|e| e.to_string())
}

fn demo_study_inner(seed: u32, n_days: u32, window: u32) -> Result<String, String> {
    let n_days = (n_days as usize).clamp(400, 4000);
    let world_cfg = WorldConfig {
        n_days,
        sigma: 0.008,
        gbm_vol: 0.08,
        gbm_drift: 0.02,
        ..WorldConfig::default()
    };
    let data = ou_pair_world(&world_cfg, seed as u64).map_err(|e| e.to_string())?;
    let dates = data.dates();
    let out_days = 200.min(n_days / 4);

    let mut cfg = StudyConfig::new(
        vec![n_days - out_days],
        dates[dates.len() - out_days],
        *dates.last().unwrap(),
    );
    cfg.window = (window as usize).clamp(10, 250);
    cfg.b_grid = (1..=20).map(|i| i as f64 / 20.0).collect();

    let run = || -> oupairs_core::Result<String> {
        let formation = data.slice(0, dates.len() - out_days)?;
        let pair = form_pair(&formation, &cfg.b_grid, TRADING_DT)?;
        let outcome = run_sweep(&pair, &data, &cfg, Period::InSample)?;
        let best = select_best(&outcome.cells)?;

        let mut sharpe = vec![vec![None; cfg.s_close_grid.len()]; cfg.s_open_grid.len()];
        let mut cell_iter = outcome.cells.iter();
        for (i, so) in cfg.s_open_grid.iter().enumerate() {
            for (j, sc) in cfg.s_close_grid.iter().enumerate() {
                if sc >= so {
                    continue; // skipped cell
                }
                let cell = cell_iter.next().expect("cell order matches grid order");
                debug_assert_eq!(cell.thresholds.s_open(), *so);
                sharpe[i][j] = cell.metrics.sharpe;
            }
        }

        let signals = signals_for_period(&pair, &data, &cfg, Period::OutOfSample)?;
        let ledger = run_backtest(&pair, &data, &signals, &best.thresholds)?;
        let (_, out_metrics) =
            evaluate_thresholds(&pair, &data, &cfg, Period::OutOfSample, &best.thresholds)?;
        let values = portfolio_values(&pair, &data)?;
        let offset = values.dates.partition_point(|d| *d < ledger.dates[0]);

        let json = StudyJson {
            pair: FitJson::from(&pair.fitted),
            b_star: pair.invest_b,
            s_open: cfg.s_open_grid.clone(),
            s_close: cfg.s_close_grid.clone(),
            sharpe,
            best_s_open: best.thresholds.s_open(),
            best_s_close: best.thresholds.s_close(),
            best_in_sharpe: best.metrics.sharpe.unwrap_or(f64::NAN),
            out_sharpe: out_metrics.sharpe,
            out_ann_return: out_metrics.ann_return,
            out_max_drawdown: out_metrics.max_drawdown,
            out_trades: out_metrics.n_trades,
            days: ledger.dates.iter().map(|d| d.to_string()).collect(),
            x: (0..ledger.len()).map(|i| values.values[offset + i]).collect(),
            s: signals.iter().map(|s| s.s_score).collect(),
            position: ledger.positions.clone(),
            equity: ledger.equity_curve(),
        };
        Ok(serde_json::to_string(&json).expect("study serializes"))
    };
    run().map_err(|e| e.to_string())
}

/// Exact-discretization OU path for the path-explorer panel.
#[wasm_bindgen]
pub fn simulate_path(
    theta: f64,
    mu: f64,
    sigma: f64,
    x0: f64,
    n_days: u32,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    simulate_path_inner(theta, mu, sigma, x0, n_days, seed).map_err(|e| JsError::new(&e))
}

/// Maximum-likelihood fit of the currently displayed values; returns JSON
/// with theta, mu, sigma, avg_loglik, and the equilibrium SD.
#[wasm_bindgen]
pub fn fit_values(values: &[f64]) -> Result<String, JsError> {
    fit_values_inner(values).map_err(|e| JsError::new(&e))
}

/// Full demo study on a seeded synthetic pair: hedge-ratio formation, the
/// in-sample threshold sweep (Sharpe heatmap), and the best cell's
/// out-of-sample backtest panels. Returns one JSON document.
#[wasm_bindgen]
pub fn demo_study(seed: u32, n_days: u32, window: u32) -> Result<String, JsError> {
    demo_study_inner(seed, n_days, window).map_err(|e| JsError::new(&e))
}
