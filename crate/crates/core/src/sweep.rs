//! Threshold-grid sweeps, best-cell selection, and the in-sample-length
//! study that pits each formation window against the common out-of-sample
//! period.

use crate::backtester::{compute_metrics, run_backtest, Metrics, TradeLedger};
use crate::data_ingest::AlignedPair;
use crate::error::{Error, Result};
use crate::ou_model::TRADING_DT;
use crate::pair_formation::{form_pair, portfolio_values, PairSpec};
use crate::signal_engine::{rolling_signals_slice, SignalDay, Thresholds};
use chrono::NaiveDate;
use rayon::prelude::*;

/// Which side of the out-of-sample boundary a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Period {
    InSample,
    OutOfSample,
}

/// One grid point and its metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub thresholds: Thresholds,
    pub metrics: Metrics,
}

/// All evaluated cells in deterministic (s_open-major) order, plus the grid
/// pairs that were skipped because their holding band would be empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub cells: Vec<SweepCell>,
    pub skipped: Vec<(f64, f64)>,
}

/// Sweep and study configuration.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    /// Formation-window lengths in trading days; sweeps outside of
    /// [`run_study`] use the first entry.
    pub in_sample_lengths: Vec<usize>,
    pub out_sample_start: NaiveDate,
    pub out_sample_end: NaiveDate,
    pub s_open_grid: Vec<f64>,
    pub s_close_grid: Vec<f64>,
    /// Rolling estimation window in trading days.
    pub window: usize,
    pub b_grid: Vec<f64>,
    /// Parallelism cap for grid evaluation; results are bitwise identical
    /// for any worker count.
    pub workers: usize,
}

impl StudyConfig {
    pub fn new(
        in_sample_lengths: Vec<usize>,
        out_sample_start: NaiveDate,
        out_sample_end: NaiveDate,
    ) -> Self {
        Self {
            in_sample_lengths,
            out_sample_start,
            out_sample_end,
            s_open_grid: Self::default_s_open_grid(),
            s_close_grid: Self::default_s_close_grid(),
            window: 60,
            b_grid: Self::default_b_grid(),
            workers: 1,
        }
    }

    /// Entry grid 1.00, 1.05, ..., 2.00, built from integer hundredths so
    /// the values are exact decimals with no accumulated float error.
    pub fn default_s_open_grid() -> Vec<f64> {
        decimal_grid(100, 200, 5)
    }

    /// Exit grid 0.00, 0.05, ..., 1.00.
    pub fn default_s_close_grid() -> Vec<f64> {
        decimal_grid(0, 100, 5)
    }

    /// Hedge-dollar grid 0.001, 0.002, ..., 1.000.
    pub fn default_b_grid() -> Vec<f64> {
        (1..=1000).map(|i| i as f64 / 1000.0).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.in_sample_lengths.is_empty() {
            return Err(Error::InvalidInput("no in-sample lengths configured".into()));
        }
        if self.s_open_grid.is_empty() || self.s_close_grid.is_empty() {
            return Err(Error::InvalidInput("threshold grids must be non-empty".into()));
        }
        for grid in [&self.s_open_grid, &self.s_close_grid] {
            for (i, a) in grid.iter().enumerate() {
                if grid[..i].contains(a) {
                    return Err(Error::InvalidInput(format!(
                        "duplicate threshold grid entry {a}"
                    )));
                }
            }
        }
        if self.window < 3 {
            return Err(Error::InvalidInput(format!(
                "window must be at least 3 days, got {}",
                self.window
            )));
        }
        if self.workers < 1 {
            return Err(Error::InvalidInput("workers must be at least 1".into()));
        }
        if self.out_sample_end < self.out_sample_start {
            return Err(Error::InvalidInput(format!(
                "out-of-sample end {} precedes start {}",
                self.out_sample_end, self.out_sample_start
            )));
        }
        Ok(())
    }

    fn with_length(&self, length: usize) -> StudyConfig {
        let mut cfg = self.clone();
        cfg.in_sample_lengths = vec![length];
        cfg
    }
}

/// Decimal grid from `start` to `end` hundredths inclusive: each value is a
/// single integer division i/100, never a running sum.
pub fn decimal_grid(start_hundredths: u32, end_hundredths: u32, step_hundredths: u32) -> Vec<f64> {
    assert!(step_hundredths > 0);
    (start_hundredths..=end_hundredths)
        .step_by(step_hundredths as usize)
        .map(|i| i as f64 / 100.0)
        .collect()
}

/// Date-index bounds (start inclusive, end exclusive) of the evaluated period.
fn resolve_period(dates: &[NaiveDate], cfg: &StudyConfig, period: Period) -> Result<(usize, usize)> {
    let out_start = dates.partition_point(|d| *d < cfg.out_sample_start);
    let out_end = dates.partition_point(|d| *d <= cfg.out_sample_end);
    match period {
        Period::OutOfSample => {
            if out_start >= out_end {
                return Err(Error::InsufficientData(format!(
                    "no trading dates in the out-of-sample period {}..={}",
                    cfg.out_sample_start, cfg.out_sample_end
                )));
            }
            Ok((out_start, out_end))
        }
        Period::InSample => {
            let length = cfg.in_sample_lengths[0];
            if length == 0 {
                return Err(Error::InvalidInput("in-sample length must be positive".into()));
            }
            let start = out_start.checked_sub(length).ok_or_else(|| {
                Error::InsufficientData(format!(
                    "in-sample length {length} exceeds the {out_start} days before {}",
                    cfg.out_sample_start
                ))
            })?;
            Ok((start, out_start))
        }
    }
}

/// Rolling signals covering the period, with the estimation warm-up drawn
/// from the data immediately preceding it. When the period starts too close
/// to the head of the data the first `window - start` days have no signal.
fn period_signals(
    pair: &PairSpec,
    data: &AlignedPair,
    cfg: &StudyConfig,
    period: Period,
) -> Result<Vec<SignalDay>> {
    let (start, end) = resolve_period(data.dates(), cfg, period)?;
    let values = portfolio_values(pair, data)?;
    let sig_start = start.max(cfg.window);
    if end <= sig_start + 1 {
        return Err(Error::InsufficientData(format!(
            "period has {} signal day(s) after warm-up; need at least 2",
            end.saturating_sub(sig_start)
        )));
    }
    rolling_signals_slice(
        &values.values[sig_start - cfg.window..end],
        &values.dates[sig_start - cfg.window..end],
        cfg.window,
        TRADING_DT,
    )
}

/// Evaluates one threshold pair over a period: ledger plus metrics.
pub fn evaluate_thresholds(
    pair: &PairSpec,
    data: &AlignedPair,
    cfg: &StudyConfig,
    period: Period,
    th: &Thresholds,
) -> Result<(TradeLedger, Metrics)> {
    cfg.validate()?;
    let signals = period_signals(pair, data, cfg, period)?;
    let ledger = run_backtest(pair, data, &signals, th)?;
    let metrics = compute_metrics(&ledger)?;
    Ok((ledger, metrics))
}

/// Signals for a period, exposed for ledger exports that pair each day's
/// s-score with its backtest row.
pub fn signals_for_period(
    pair: &PairSpec,
    data: &AlignedPair,
    cfg: &StudyConfig,
    period: Period,
) -> Result<Vec<SignalDay>> {
    cfg.validate()?;
    period_signals(pair, data, cfg, period)
}

/// Runs the full threshold grid over one period.
///
/// Signals are generated once (they do not depend on thresholds); each valid
/// grid pair is then backtested independently, in parallel up to
/// `cfg.workers`, and reduced in s_open-major order so the outcome is
/// independent of scheduling. Pairs with `s_close >= s_open` are skipped and
/// reported.
pub fn run_sweep(
    pair: &PairSpec,
    data: &AlignedPair,
    cfg: &StudyConfig,
    period: Period,
) -> Result<SweepOutcome> {
    cfg.validate()?;
    let signals = period_signals(pair, data, cfg, period)?;

    let mut jobs = Vec::new();
    let mut skipped = Vec::new();
    for &so in &cfg.s_open_grid {
        for &sc in &cfg.s_close_grid {
            match Thresholds::new(so, sc) {
                Ok(th) => jobs.push(th),
                Err(_) => skipped.push((so, sc)),
            }
        }
    }
    if jobs.is_empty() {
        return Err(Error::InvalidInput(
            "every grid pair has an empty holding band".into(),
        ));
    }

    let run_cell = |th: &Thresholds| -> Result<SweepCell> {
        let ledger = run_backtest(pair, data, &signals, th)?;
        let metrics = compute_metrics(&ledger)?;
        Ok(SweepCell {
            thresholds: *th,
            metrics,
        })
    };

    let cells: Result<Vec<SweepCell>> = if cfg.workers == 1 {
        jobs.iter().map(run_cell).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(run_cell).collect())
    };

    Ok(SweepOutcome {
        cells: cells?,
        skipped,
    })
}

/// The cell with the highest defined Sharpe ratio; ties break toward the
/// lower s_open, then the lower s_close.
pub fn select_best(cells: &[SweepCell]) -> Result<&SweepCell> {
    let mut best: Option<(&SweepCell, f64)> = None;
    for cell in cells {
        let Some(sharpe) = cell.metrics.sharpe else {
            continue;
        };
        let better = match best {
            None => true,
            Some((b, bs)) => {
                sharpe > bs
                    || (sharpe == bs
                        && (cell.thresholds.s_open() < b.thresholds.s_open()
                            || (cell.thresholds.s_open() == b.thresholds.s_open()
                                && cell.thresholds.s_close() < b.thresholds.s_close())))
            }
        };
        if better {
            best = Some((cell, sharpe));
        }
    }
    best.map(|(c, _)| c).ok_or(Error::NoDefinedSharpe)
}

/// One formation length's results within a study.
#[derive(Debug, Clone)]
pub struct StudySection {
    pub in_sample_length: usize,
    pub pair: PairSpec,
    pub thresholds: Thresholds,
    pub in_metrics: Metrics,
    pub out_metrics: Metrics,
    pub skipped_cells: usize,
}

/// Study over all configured formation lengths against the fixed
/// out-of-sample period.
#[derive(Debug, Clone)]
pub struct StudyReport {
    pub sections: Vec<StudySection>,
    /// Index of the section with the highest defined out-of-sample Sharpe.
    pub best_index: Option<usize>,
}

/// For each in-sample length: form the pair on that window, sweep the grid
/// in sample, select the best thresholds by in-sample Sharpe, and evaluate
/// them out of sample. The section whose selected thresholds score the
/// highest out-of-sample Sharpe is flagged as the most predictive length.
pub fn run_study(data: &AlignedPair, cfg: &StudyConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let mut sections = Vec::with_capacity(cfg.in_sample_lengths.len());
    for &length in &cfg.in_sample_lengths {
        let sub = cfg.with_length(length);
        let (start, end) = resolve_period(data.dates(), &sub, Period::InSample)?;
        let formation = data.slice(start, end)?;
        let pair = form_pair(&formation, &sub.b_grid, TRADING_DT)?;

        let in_outcome = run_sweep(&pair, data, &sub, Period::InSample)?;
        let best = select_best(&in_outcome.cells)?;
        let thresholds = best.thresholds;
        let in_metrics = best.metrics;
        let (_, out_metrics) = evaluate_thresholds(&pair, data, &sub, Period::OutOfSample, &thresholds)?;

        sections.push(StudySection {
            in_sample_length: length,
            pair,
            thresholds,
            in_metrics,
            out_metrics,
            skipped_cells: in_outcome.skipped.len(),
        });
    }

    let mut best_index: Option<usize> = None;
    for (i, section) in sections.iter().enumerate() {
        let Some(sharpe) = section.out_metrics.sharpe else {
            continue;
        };
        let better = match best_index {
            None => true,
            Some(j) => sharpe > sections[j].out_metrics.sharpe.unwrap(),
        };
        if better {
            best_index = Some(i);
        }
    }

    Ok(StudyReport {
        sections,
        best_index,
    })
}
