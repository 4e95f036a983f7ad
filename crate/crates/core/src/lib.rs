//! Mean-reversion pair trading research engine.
//!
//! The pipeline: load and align daily price series, form a static two-leg
//! portfolio by sweeping the short-leg dollar amount and keeping the hedge
//! with the best Ornstein-Uhlenbeck fit, generate contrarian s-score signals
//! from rolling refits, backtest them over a 2-D entry/exit threshold grid,
//! and report Sharpe, annualized return, drawdown, and per-trade statistics.

pub mod backtester;
pub mod data_ingest;
pub mod error;
pub mod ou_model;
pub mod pair_formation;
pub mod signal_engine;
pub mod sweep;
pub mod synth;

pub use backtester::{compute_metrics, daily_return, run_backtest, Metrics, Trade, TradeLedger};
pub use data_ingest::{align, load_csv, AlignedPair, PriceSeries};
pub use error::{Error, Result};
pub use ou_model::{
    avg_log_likelihood, avg_log_likelihood_values, equilibrium_sd, fit_mle, fit_mle_values,
    simulate, OuParams, ValueSeries, TRADING_DT,
};
pub use pair_formation::{form_pair, portfolio_values, PairSpec};
pub use signal_engine::{rolling_signals, s_score, step_position, PositionState, SignalDay, Thresholds};
pub use sweep::{run_study, run_sweep, select_best, Period, StudyConfig, StudyReport, SweepCell};
