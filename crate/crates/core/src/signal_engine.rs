//! Daily s-scores from rolling OU refits and the four-rule contrarian
//! position state machine.

use crate::error::{Error, Result};
use crate::ou_model::{equilibrium_sd, fit_mle_values, OuParams};
use chrono::NaiveDate;

/// Entry/exit thresholds on the s-score. Opening requires |s| above
/// `s_open`; a position closes when s re-crosses the `s_close` band, so the
/// pair only defines a usable holding band when `s_open > s_close`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    s_open: f64,
    s_close: f64,
}

impl Thresholds {
    pub fn new(s_open: f64, s_close: f64) -> Result<Self> {
        let usable_band = s_open.is_finite() && s_open > s_close && s_close >= 0.0;
        if !usable_band {
            return Err(Error::InvalidThresholds { s_open, s_close });
        }
        Ok(Self { s_open, s_close })
    }

    pub fn s_open(&self) -> f64 {
        self.s_open
    }

    pub fn s_close(&self) -> f64 {
        self.s_close
    }
}

/// One trading day's signal: the s-score of that day's portfolio value
/// against the OU fit of the trailing estimation window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalDay {
    pub date: NaiveDate,
    pub s_score: f64,
    pub window_params: OuParams,
}

/// Position held at the end of a trading day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionState {
    Flat,
    Long,
    Short,
}

impl PositionState {
    /// The paper-style encoding: long +1, short -1, flat 0.
    pub fn sign(&self) -> i32 {
        match self {
            PositionState::Flat => 0,
            PositionState::Long => 1,
            PositionState::Short => -1,
        }
    }
}

/// Deviation of `x` from the fitted long-run mean in units of the
/// stationary standard deviation.
pub fn s_score(x: f64, params: &OuParams) -> f64 {
    (x - params.theta) / equilibrium_sd(params)
}

/// Rolling signal generation.
///
/// The fit for day t uses the `window` values ending at day t-1, and the
/// s-score compares day t's value against that fit, so a day never scores
/// against a window containing itself. Days whose window fails to fit carry
/// the last successful parameters forward; days before the first successful
/// fit emit no signal.
pub fn rolling_signals(values: &crate::ou_model::ValueSeries, window: usize, dt: f64) -> Result<Vec<SignalDay>> {
    rolling_signals_slice(&values.values, &values.dates, window, dt)
}

pub(crate) fn rolling_signals_slice(
    values: &[f64],
    dates: &[NaiveDate],
    window: usize,
    dt: f64,
) -> Result<Vec<SignalDay>> {
    if window < 3 {
        return Err(Error::InvalidInput(format!(
            "estimation window must be at least 3 days, got {window}"
        )));
    }
    if values.len() <= window {
        return Err(Error::WindowTooLong {
            window,
            len: values.len(),
        });
    }
    let mut signals = Vec::with_capacity(values.len() - window);
    let mut carried: Option<OuParams> = None;
    for t in window..values.len() {
        match fit_mle_values(&values[t - window..t], dt) {
            Ok(fit) => carried = Some(fit),
            Err(Error::DegenerateSeries) | Err(Error::NoConvergence { .. }) => {}
            Err(e) => return Err(e),
        }
        if let Some(params) = carried {
            signals.push(SignalDay {
                date: dates[t],
                s_score: s_score(values[t], &params),
                window_params: params,
            });
        }
    }
    Ok(signals)
}

/// One step of the contrarian rule table:
///
/// * flat and s < -s_open: buy to open
/// * flat and s > s_open: sell to open
/// * long and s > -s_close: close
/// * short and s < s_close: close
///
/// All inequalities are strict and at most one transition happens per day,
/// so a close never re-opens on the same bar.
pub fn step_position(state: PositionState, s: f64, th: &Thresholds) -> PositionState {
    match state {
        PositionState::Flat => {
            if s < -th.s_open {
                PositionState::Long
            } else if s > th.s_open {
                PositionState::Short
            } else {
                PositionState::Flat
            }
        }
        PositionState::Long => {
            if s > -th.s_close {
                PositionState::Flat
            } else {
                PositionState::Long
            }
        }
        PositionState::Short => {
            if s < th.s_close {
                PositionState::Flat
            } else {
                PositionState::Short
            }
        }
    }
}
