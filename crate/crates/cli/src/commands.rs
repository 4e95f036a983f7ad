//! The five subcommands: fit, sweep, simulate, backtest, study.
//!
//! Each command computes its whole output first (stdout text plus a list of
//! files) and only then touches the filesystem, so failures never leave
//! partial results behind.

use crate::config::RunConfig;
use crate::report::{fmt_opt, fmt_sig, metric_lines, OutFile};
use anyhow::{anyhow, Context, Result};
use oupairs_core::sweep::{
    evaluate_thresholds, run_study, run_sweep, select_best, signals_for_period, Period, SweepCell,
};
use oupairs_core::{
    align, compute_metrics, form_pair, load_csv, portfolio_values, run_backtest, AlignedPair,
    Metrics, PairSpec, SignalDay, Thresholds, TradeLedger, TRADING_DT,
};

pub struct CmdOutput {
    pub stdout: String,
    pub files: Vec<OutFile>,
}

fn load_pair_data(cfg: &RunConfig) -> Result<AlignedPair> {
    let path_a = cfg.data_dir.join(format!("{}.csv", cfg.asset_a));
    let path_b = cfg.data_dir.join(format!("{}.csv", cfg.asset_b));
    let a = load_csv(&path_a, &cfg.asset_a)?;
    let b = load_csv(&path_b, &cfg.asset_b)?;
    Ok(align(&a, &b)?)
}

/// The formation window: the first configured in-sample length of trading
/// days immediately before the out-of-sample start.
fn formation_window(cfg: &RunConfig, data: &AlignedPair) -> Result<AlignedPair> {
    let length = cfg.study.in_sample_lengths[0];
    let out_start = data
        .dates()
        .partition_point(|d| *d < cfg.study.out_sample_start);
    let start = out_start.checked_sub(length).ok_or_else(|| {
        anyhow!(
            "in-sample length {length} exceeds the {out_start} trading days before {}",
            cfg.study.out_sample_start
        )
    })?;
    Ok(data.slice(start, out_start)?)
}

fn form_on_window(cfg: &RunConfig, data: &AlignedPair) -> Result<PairSpec> {
    let formation = formation_window(cfg, data)?;
    Ok(form_pair(&formation, &cfg.study.b_grid, TRADING_DT)?)
}

fn pair_lines(pair: &PairSpec) -> Vec<String> {
    vec![
        format!("theta={}", fmt_sig(pair.fitted.theta)),
        format!("mu={}", fmt_sig(pair.fitted.mu)),
        format!("sigma={}", fmt_sig(pair.fitted.sigma)),
        format!("avg_loglik={}", fmt_sig(pair.fitted.avg_loglik)),
        format!("b_star={}", fmt_sig(pair.invest_b)),
    ]
}

pub fn cmd_fit(cfg: &RunConfig) -> Result<CmdOutput> {
    let data = load_pair_data(cfg)?;
    let pair = form_on_window(cfg, &data)?;
    let mut stdout = format!("pair={},{}\n", pair.asset_a, pair.asset_b);
    for line in pair_lines(&pair) {
        stdout.push_str(&line);
        stdout.push('\n');
    }
    Ok(CmdOutput {
        stdout,
        files: Vec::new(),
    })
}

fn heatmap_csv(cells: &[SweepCell], value: impl Fn(&Metrics) -> String) -> String {
    let mut out = String::from("s_open,s_close,value\n");
    for cell in cells {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_sig(cell.thresholds.s_open()),
            fmt_sig(cell.thresholds.s_close()),
            value(&cell.metrics)
        ));
    }
    out
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<CmdOutput> {
    let data = load_pair_data(cfg)?;
    let pair = form_on_window(cfg, &data)?;
    let outcome = run_sweep(&pair, &data, &cfg.study, Period::InSample)?;
    let best = select_best(&outcome.cells)?;
    let (_, out_metrics) =
        evaluate_thresholds(&pair, &data, &cfg.study, Period::OutOfSample, &best.thresholds)?;

    let files = vec![
        OutFile::new(
            "sharpe.csv",
            heatmap_csv(&outcome.cells, |m| fmt_opt(m.sharpe)),
        ),
        OutFile::new(
            "ann_return.csv",
            heatmap_csv(&outcome.cells, |m| fmt_sig(m.ann_return)),
        ),
        OutFile::new(
            "max_drawdown.csv",
            heatmap_csv(&outcome.cells, |m| fmt_sig(m.max_drawdown)),
        ),
        OutFile::new(
            "trade_freq.csv",
            heatmap_csv(&outcome.cells, |m| fmt_sig(m.trade_freq)),
        ),
        OutFile::new(
            "trade_range.csv",
            heatmap_csv(&outcome.cells, |m| fmt_opt(m.trade_range)),
        ),
        OutFile::new(
            "ret_per_trade.csv",
            heatmap_csv(&outcome.cells, |m| fmt_opt(m.ret_per_trade)),
        ),
        OutFile::new("best.txt", {
            let mut lines = vec![
                format!("pair={},{}", pair.asset_a, pair.asset_b),
                format!("b_star={}", fmt_sig(pair.invest_b)),
                format!("best_s_open={}", fmt_sig(best.thresholds.s_open())),
                format!("best_s_close={}", fmt_sig(best.thresholds.s_close())),
            ];
            lines.extend(metric_lines("in", "", &best.metrics));
            lines.extend(metric_lines("out", "", &out_metrics));
            lines.push(format!("cells={}", outcome.cells.len()));
            lines.push(format!("skipped_cells={}", outcome.skipped.len()));
            for (i, (so, sc)) in outcome.skipped.iter().enumerate() {
                lines.push(format!("skipped_{i}={},{}", fmt_sig(*so), fmt_sig(*sc)));
            }
            lines.join("\n") + "\n"
        }),
    ];

    Ok(CmdOutput {
        stdout: files.last().unwrap().contents.clone(),
        files,
    })
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<CmdOutput> {
    let data = load_pair_data(cfg)?;
    let formation = formation_window(cfg, &data)?;
    let pair = form_pair(&formation, &cfg.study.b_grid, TRADING_DT)?;
    let empirical = pair.fitted;

    let x0 = portfolio_values(&pair, &formation)?.values[0];
    let n_steps = cfg.sim_steps.unwrap_or(formation.len() - 1);
    let path = oupairs_core::simulate(&empirical, x0, n_steps, TRADING_DT, cfg.seed)?;
    let refit = oupairs_core::fit_mle(&path, TRADING_DT)?;

    let mut table = String::from("series theta mu sigma avg_loglik\n");
    for (label, p) in [("empirical", &empirical), ("simulated", &refit)] {
        table.push_str(&format!(
            "{label} {} {} {} {}\n",
            fmt_sig(p.theta),
            fmt_sig(p.mu),
            fmt_sig(p.sigma),
            fmt_sig(p.avg_loglik)
        ));
    }

    let mut csv = String::from("date,value\n");
    for (d, v) in path.dates.iter().zip(&path.values) {
        csv.push_str(&format!("{d},{}\n", fmt_sig(*v)));
    }

    Ok(CmdOutput {
        stdout: table,
        files: vec![OutFile::new("simulated.csv", csv)],
    })
}

fn ledger_csv(
    pair: &PairSpec,
    data: &AlignedPair,
    signals: &[SignalDay],
    ledger: &TradeLedger,
) -> Result<String> {
    let values = portfolio_values(pair, data)?;
    let offset = values.dates.partition_point(|d| *d < ledger.dates[0]);
    let equity = ledger.equity_curve();
    let mut out = String::from("date,x,s_score,position,daily_return,equity\n");
    for i in 0..ledger.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            ledger.dates[i],
            fmt_sig(values.values[offset + i]),
            fmt_sig(signals[i].s_score),
            ledger.positions[i],
            fmt_sig(ledger.daily_returns[i]),
            fmt_sig(equity[i])
        ));
    }
    Ok(out)
}

pub fn cmd_backtest(cfg: &RunConfig) -> Result<CmdOutput> {
    let data = load_pair_data(cfg)?;
    let pair = form_on_window(cfg, &data)?;

    // explicit so/sc pins the thresholds; otherwise take the in-sample best
    let thresholds: Thresholds = match cfg.fixed_thresholds {
        Some(th) => th,
        None => {
            let outcome = run_sweep(&pair, &data, &cfg.study, Period::InSample)?;
            select_best(&outcome.cells)?.thresholds
        }
    };

    let mut stdout = format!(
        "s_open={}\ns_close={}\n",
        fmt_sig(thresholds.s_open()),
        fmt_sig(thresholds.s_close())
    );
    let mut files = Vec::new();
    for (period, name, prefix) in [
        (Period::InSample, "backtest_in.csv", "in"),
        (Period::OutOfSample, "backtest_out.csv", "out"),
    ] {
        let signals = signals_for_period(&pair, &data, &cfg.study, period)?;
        let ledger = run_backtest(&pair, &data, &signals, &thresholds)?;
        let metrics = compute_metrics(&ledger)?;
        files.push(OutFile::new(name, ledger_csv(&pair, &data, &signals, &ledger)?));
        for line in metric_lines(prefix, "", &metrics) {
            stdout.push_str(&line);
            stdout.push('\n');
        }
    }

    Ok(CmdOutput { stdout, files })
}

pub fn cmd_study(cfg: &RunConfig) -> Result<CmdOutput> {
    let data = load_pair_data(cfg)?;
    let report = run_study(&data, &cfg.study)?;

    let mut lines = vec![format!("sections={}", report.sections.len())];
    for (i, s) in report.sections.iter().enumerate() {
        lines.push(format!("length_{i}={}", s.in_sample_length));
        lines.push(format!("b_star_{i}={}", fmt_sig(s.pair.invest_b)));
        lines.push(format!("theta_{i}={}", fmt_sig(s.pair.fitted.theta)));
        lines.push(format!("mu_{i}={}", fmt_sig(s.pair.fitted.mu)));
        lines.push(format!("sigma_{i}={}", fmt_sig(s.pair.fitted.sigma)));
        lines.push(format!(
            "avg_loglik_{i}={}",
            fmt_sig(s.pair.fitted.avg_loglik)
        ));
        lines.push(format!("best_s_open_{i}={}", fmt_sig(s.thresholds.s_open())));
        lines.push(format!(
            "best_s_close_{i}={}",
            fmt_sig(s.thresholds.s_close())
        ));
        lines.extend(metric_lines("in", &format!("_{i}"), &s.in_metrics));
        lines.extend(metric_lines("out", &format!("_{i}"), &s.out_metrics));
        lines.push(format!("skipped_cells_{i}={}", s.skipped_cells));
    }
    match report.best_index {
        Some(i) => lines.push(format!(
            "best_length={}",
            report.sections[i].in_sample_length
        )),
        None => lines.push("best_length=nan".into()),
    }
    let text = lines.join("\n") + "\n";

    Ok(CmdOutput {
        stdout: text.clone(),
        files: vec![OutFile::new("study.txt", text)],
    })
}

pub fn write_and_print(cfg: &RunConfig, output: CmdOutput) -> Result<()> {
    crate::report::write_outputs(&cfg.output_dir, &output.files)
        .context("failed to write outputs")?;
    print!("{}", output.stdout);
    Ok(())
}
