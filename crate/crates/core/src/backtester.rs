//! Turns a signal path into positions, daily returns, and the performance
//! indices: Sharpe ratio, annualized return, maximum drawdown, trade
//! frequency, trade range, and return per trade.

use crate::data_ingest::AlignedPair;
use crate::error::{Error, Result};
use crate::pair_formation::{cost_values, portfolio_values, PairSpec};
use crate::signal_engine::{step_position, PositionState, SignalDay, Thresholds};
use chrono::NaiveDate;

/// One completed round trip. `direction` is +1 for long, -1 for short.
/// Positions are nonzero exactly on days `[entry, exit)`, so the duration in
/// trading days is `exit - entry` and an open-and-close-next-day trade has
/// duration 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trade {
    pub entry: usize,
    pub exit: usize,
    pub direction: i32,
}

/// Day-by-day outcome of one backtest run.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeLedger {
    pub dates: Vec<NaiveDate>,
    /// Position held at the end of each day: -1, 0, or +1.
    pub positions: Vec<i32>,
    /// Return realized on each day from the previous day's position;
    /// day 0 is always 0.
    pub daily_returns: Vec<f64>,
    pub trades: Vec<Trade>,
}

impl TradeLedger {
    pub fn len(&self) -> usize {
        self.daily_returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.daily_returns.is_empty()
    }

    /// Compounded equity curve V_t = prod_{u<=t} (1 + ret_u), one value per day.
    pub fn equity_curve(&self) -> Vec<f64> {
        let mut v = 1.0;
        self.daily_returns
            .iter()
            .map(|r| {
                v *= 1.0 + r;
                v
            })
            .collect()
    }

    /// Rebuilds the position path implied by the trades list alone.
    pub fn positions_from_trades(n_days: usize, trades: &[Trade]) -> Vec<i32> {
        let mut positions = vec![0i32; n_days];
        for t in trades {
            for day in positions.iter_mut().take(t.exit.min(n_days)).skip(t.entry) {
                *day = t.direction;
            }
        }
        positions
    }

    /// Ledger export for figure reproduction: `date,position,daily_return,equity`.
    /// Floats use the shortest round-trip decimal form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,position,daily_return,equity\n");
        for ((date, (pos, ret)), equity) in self
            .dates
            .iter()
            .zip(self.positions.iter().zip(&self.daily_returns))
            .zip(self.equity_curve())
        {
            out.push_str(&format!("{date},{pos},{ret},{equity}\n"));
        }
        out
    }
}

/// Performance indices of one ledger.
///
/// `sharpe` is absent when every daily return is identical (zero variance),
/// and `trade_range` / `ret_per_trade` are absent when the run contains no
/// complete trade; these conditions are reported as missing values rather
/// than infinities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub sharpe: Option<f64>,
    /// Net annualized return, (prod(1+ret))^(252/k) - 1.
    pub ann_return: f64,
    /// Peak-to-trough minimum of V_t / max_{u<=t} V_u - 1; always <= 0.
    pub max_drawdown: f64,
    /// Completed trades per 252-day year, n * 252 / k.
    pub trade_freq: f64,
    /// Mean trade duration in trading days.
    pub trade_range: Option<f64>,
    /// ann_return / trade_freq.
    pub ret_per_trade: Option<f64>,
    pub n_trades: usize,
    pub k_days: usize,
}

/// The return realized over one day on the previous day's position:
/// `((x_next - x_prev) / cost_prev) * position_prev`.
pub fn daily_return(x_prev: f64, x_next: f64, cost_prev: f64, position_prev: i32) -> Result<f64> {
    if !cost_prev.is_finite() || cost_prev <= 0.0 {
        return Err(Error::NonPositiveCost(cost_prev));
    }
    if position_prev.abs() > 1 {
        return Err(Error::InvalidInput(format!(
            "position must be -1, 0, or +1, got {position_prev}"
        )));
    }
    Ok((x_next - x_prev) / cost_prev * position_prev as f64)
}

/// Folds the position state machine over the signal days and books daily
/// returns against daily recomputed carrying cost.
///
/// The signal dates must be a contiguous run of the pair's trading dates.
/// On the final day any open position is force-closed (counted as a trade
/// exit) and no new position opens, so every trade in the ledger completes.
pub fn run_backtest(
    pair: &PairSpec,
    data: &AlignedPair,
    signals: &[SignalDay],
    th: &Thresholds,
) -> Result<TradeLedger> {
    if signals.is_empty() {
        return Err(Error::InsufficientData("no signal days to backtest".into()));
    }
    let values = portfolio_values(pair, data)?;
    let costs = cost_values(pair, data);
    let dates = data.dates();

    // locate the signal run inside the trading calendar
    let offset = dates.partition_point(|d| *d < signals[0].date);
    if offset + signals.len() > dates.len() {
        return Err(Error::DateMisalignment);
    }
    for (i, sig) in signals.iter().enumerate() {
        if dates[offset + i] != sig.date {
            return Err(Error::DateMisalignment);
        }
    }

    let n = signals.len();
    let mut positions = vec![0i32; n];
    let mut returns = vec![0.0f64; n];
    let mut trades = Vec::new();
    let mut state = PositionState::Flat;
    let mut open: Option<(usize, i32)> = None;

    for i in 0..n {
        if i > 0 {
            let d = offset + i;
            returns[i] = daily_return(values.values[d - 1], values.values[d], costs[d - 1], positions[i - 1])?;
        }
        let next = if i + 1 == n {
            // boundary day: force-close so every trade completes; entries
            // opened here could never earn a return anyway
            PositionState::Flat
        } else {
            step_position(state, signals[i].s_score, th)
        };
        match (state.sign(), next.sign()) {
            (0, d) if d != 0 => open = Some((i, d)),
            (d, 0) if d != 0 => {
                let (entry, direction) = open.take().expect("open trade must exist");
                trades.push(Trade {
                    entry,
                    exit: i,
                    direction,
                });
            }
            _ => {}
        }
        positions[i] = next.sign();
        state = next;
    }

    Ok(TradeLedger {
        dates: signals.iter().map(|s| s.date).collect(),
        positions,
        daily_returns: returns,
        trades,
    })
}

/// Computes the index suite over a ledger.
pub fn compute_metrics(ledger: &TradeLedger) -> Result<Metrics> {
    let k = ledger.daily_returns.len();
    if k == 0 {
        return Err(Error::EmptyLedger);
    }
    if ledger.positions.len() != k || ledger.dates.len() != k {
        return Err(Error::InvalidInput(
            "ledger dates, positions, and returns must have equal length".into(),
        ));
    }

    let growth: f64 = ledger.daily_returns.iter().map(|r| 1.0 + r).product();
    let ann_return = growth.powf(252.0 / k as f64) - 1.0;

    // sample standard deviation over all k daily returns, zeros included
    let mean = ledger.daily_returns.iter().sum::<f64>() / k as f64;
    let sharpe = if k >= 2 {
        let ss: f64 = ledger
            .daily_returns
            .iter()
            .map(|r| (r - mean) * (r - mean))
            .sum();
        let std = (ss / (k as f64 - 1.0)).sqrt();
        if std > 0.0 {
            Some(ann_return / (std * 252f64.sqrt()))
        } else {
            None
        }
    } else {
        None
    };

    // drawdown on the compounded curve, starting from equity 1
    let mut peak = 1.0f64;
    let mut v = 1.0f64;
    let mut max_drawdown = 0.0f64;
    for r in &ledger.daily_returns {
        v *= 1.0 + r;
        if v > peak {
            peak = v;
        }
        let dd = v / peak - 1.0;
        if dd < max_drawdown {
            max_drawdown = dd;
        }
    }

    let n = ledger.trades.len();
    let trade_freq = n as f64 * 252.0 / k as f64;
    let (trade_range, ret_per_trade) = if n > 0 {
        let total: usize = ledger.trades.iter().map(|t| t.exit - t.entry).sum();
        (
            Some(total as f64 / n as f64),
            Some(ann_return / trade_freq),
        )
    } else {
        (None, None)
    };

    Ok(Metrics {
        sharpe,
        ann_return,
        max_drawdown,
        trade_freq,
        trade_range,
        ret_per_trade,
        n_trades: n,
        k_days: k,
    })
}
