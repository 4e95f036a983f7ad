//! Acceptance suite: one test per criterion, each ending in a single
//! PASS/FAIL line (run with `-- --nocapture` to see them). Tolerances are
//! pinned in code; simulation-based checks use fixed seeds.

use oupairs_core::sweep::{run_sweep, select_best, Period, StudyConfig};
use oupairs_core::synth::{ou_pair_world, WorldConfig};
use oupairs_core::{
    avg_log_likelihood_values, compute_metrics, fit_mle, form_pair, simulate, step_position,
    OuParams, PositionState, Thresholds, Trade, TradeLedger, TRADING_DT,
};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

/// The nine fitted parameter columns reported for the paper's good pairs.
const TABLE1: [(&str, f64, f64, f64); 9] = [
    ("CCI-HCP", 0.9319, 9.9715, 0.1969),
    ("PCL-GGP", 0.5213, 2.3036, 0.1267),
    ("PNC-WFC", 0.2455, 15.7538, 0.1466),
    ("EQR-O", 1.2082, 0.3042, 0.1482),
    ("CCI-SPG", 0.6296, 14.5032, 0.1753),
    ("CCI-HCN", 0.8164, 11.0183, 0.2025),
    ("EBAY-INTU", 0.5780, 9.2776, 0.2093),
    ("CCI-O", 0.7204, 10.7316, 0.1960),
    ("GLD-GDX", 0.6211, 6.5194, 0.1278),
];

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn pass(n: u32, name: &str) {
    println!("acceptance {n} ({name}): PASS");
}

fn fail(n: u32, name: &str, detail: &str) -> ! {
    println!("acceptance {n} ({name}): FAIL — {detail}");
    panic!("acceptance {n} ({name}): {detail}");
}

#[test]
fn acceptance_01_mle_recovery() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (name, theta, mu, sigma) in TABLE1 {
        let truth = OuParams::new(theta, mu, sigma, 0.0).unwrap();
        let (mut thetas, mut mus, mut sigmas) = (Vec::new(), Vec::new(), Vec::new());
        for seed in 0..20u64 {
            let path = simulate(&truth, theta, 5_000, TRADING_DT, seed).unwrap();
            let fit = fit_mle(&path, TRADING_DT).unwrap();
            thetas.push(fit.theta);
            mus.push(fit.mu);
            sigmas.push(fit.sigma);
        }
        let (mt, mm, ms) = (median(&mut thetas), median(&mut mus), median(&mut sigmas));
        let (et, em, es) = (
            (mt / theta - 1.0).abs(),
            (mm / mu - 1.0).abs(),
            (ms / sigma - 1.0).abs(),
        );
        println!(
            "  {name:10} median errs: theta {:6.2}%  mu {:6.2}%  sigma {:6.2}%",
            et * 100.0,
            em * 100.0,
            es * 100.0
        );
        if et >= 0.05 {
            failures.push(format!("{name}: median theta err {:.2}% >= 5%", et * 100.0));
        }
        if es >= 0.05 {
            failures.push(format!("{name}: median sigma err {:.2}% >= 5%", es * 100.0));
        }
        if em >= 0.30 {
            failures.push(format!("{name}: median mu err {:.2}% >= 30%", em * 100.0));
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 60 {
        failures.push(format!("runtime {elapsed:?} >= 60 s"));
    }
    if failures.is_empty() {
        pass(1, "MLE recovery");
    } else {
        fail(1, "MLE recovery", &failures.join("; "));
    }
}

#[test]
fn acceptance_02_likelihood_argmax_dominates_grid() {
    // five series with distinct regimes; the 20-per-axis even grid spans
    // +/-10% around the fit and never lands exactly on it
    for (i, (_, theta, mu, sigma)) in TABLE1.iter().take(5).enumerate() {
        let truth = OuParams::new(*theta, *mu, *sigma, 0.0).unwrap();
        let path = simulate(&truth, *theta, 400, TRADING_DT, 1000 + i as u64).unwrap();
        let fit = fit_mle(&path, TRADING_DT).unwrap();
        let fit_ll = avg_log_likelihood_values(&path.values, &fit, TRADING_DT).unwrap();
        let axis = |center: f64, k: usize| center * (0.9 + 0.2 * k as f64 / 19.0);
        for a in 0..20 {
            for b in 0..20 {
                for c in 0..20 {
                    let p =
                        OuParams::new(axis(fit.theta, a), axis(fit.mu, b), axis(fit.sigma, c), 0.0)
                            .unwrap();
                    let ll = avg_log_likelihood_values(&path.values, &p, TRADING_DT).unwrap();
                    if ll > fit_ll {
                        fail(
                            2,
                            "likelihood argmax",
                            &format!(
                                "series {i}: grid point (theta {}, mu {}, sigma {}) \
                                 scored {ll} > fit {fit_ll}",
                                p.theta, p.mu, p.sigma
                            ),
                        );
                    }
                }
            }
        }
    }
    pass(2, "likelihood argmax");
}

struct CliWorld {
    _dir: tempfile::TempDir,
    root: PathBuf,
    config: PathBuf,
}

fn cli_world(seed: u64, extra_cfg: &str) -> CliWorld {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let data_dir = root.join("data");
    std::fs::create_dir(&data_dir).unwrap();
    let world = ou_pair_world(
        &WorldConfig {
            n_days: 1400,
            sigma: 0.008,
            gbm_vol: 0.08,
            gbm_drift: 0.02,
            ..WorldConfig::default()
        },
        seed,
    )
    .unwrap();
    world.series_a.write_csv(&data_dir.join("AAA.csv")).unwrap();
    world.series_b.write_csv(&data_dir.join("BBB.csv")).unwrap();
    let dates = world.dates();
    let out_start = dates[dates.len() - 200];
    let config = root.join("run.cfg");
    std::fs::write(
        &config,
        format!(
            "data_dir={}\npair=AAA,BBB\nin_sample_lengths=1200\nout_sample_start={out_start}\n\
             b_grid=0.3,0.4,0.5,0.6,0.7\nseed=42\nworkers=2\noutput_dir={}\n{extra_cfg}",
            data_dir.display(),
            root.join("out").display()
        ),
    )
    .unwrap();
    CliWorld {
        _dir: dir,
        root,
        config,
    }
}

fn run_cli(w: &CliWorld, args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_oupairs"))
        .args(args)
        .arg("--config")
        .arg(&w.config)
        .env_remove("OUPAIRS_SEED")
        .output()
        .unwrap();
    (
        String::from_utf8(out.stdout).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn acceptance_03_simulate_refit_matches_empirical() {
    let w = cli_world(77, "sim_steps=5000\n");
    let (stdout, code) = run_cli(&w, &["simulate"]);
    if code != 0 {
        fail(3, "simulated refit", &format!("exit code {code}"));
    }
    let row = |label: &str| -> Vec<f64> {
        stdout
            .lines()
            .find(|l| l.starts_with(label))
            .unwrap_or_else(|| panic!("no {label} row in: {stdout}"))
            .split_whitespace()
            .skip(1)
            .map(|v| v.parse().unwrap())
            .collect()
    };
    let emp = row("empirical");
    let sim = row("simulated");
    let rel = |a: f64, b: f64| (a / b - 1.0).abs();
    let checks = [
        ("theta", rel(sim[0], emp[0]), 0.05),
        ("mu", rel(sim[1], emp[1]), 0.30),
        ("sigma", rel(sim[2], emp[2]), 0.05),
    ];
    for (name, err, tol) in checks {
        if err >= tol {
            fail(
                3,
                "simulated refit",
                &format!("{name}: relative gap {:.2}% >= {:.0}%", err * 100.0, tol * 100.0),
            );
        }
    }
    pass(3, "simulated refit");
}

/// Small standalone generator so the oracle paths owe nothing to the engine.
struct XorShift(u64);

impl XorShift {
    fn next_u64(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Independent restatement of the four trading rules.
fn oracle_rule_table(position: i32, s: f64, s_open: f64, s_close: f64) -> i32 {
    if position == 0 {
        if s < -s_open {
            1
        } else if s > s_open {
            -1
        } else {
            0
        }
    } else if position == 1 {
        if s > -s_close {
            0
        } else {
            1
        }
    } else if s < s_close {
        0
    } else {
        -1
    }
}

#[test]
fn acceptance_04_state_machine_matches_oracle() {
    let mut rng = XorShift(0x1234_5678_9abc_def0);
    for path_idx in 0..1000 {
        let s_open = 1.0 + rng.unit();
        let s_close = rng.unit() * s_open * 0.9;
        let th = Thresholds::new(s_open, s_close).unwrap();
        let mut state = PositionState::Flat;
        let mut oracle = 0i32;
        for step in 0..500 {
            let s = (rng.unit() - 0.5) * 7.0;
            state = step_position(state, s, &th);
            oracle = oracle_rule_table(oracle, s, s_open, s_close);
            if state.sign() != oracle {
                fail(
                    4,
                    "state-machine oracle",
                    &format!(
                        "path {path_idx} step {step}: fold {} vs oracle {oracle} at s={s}",
                        state.sign()
                    ),
                );
            }
        }
    }
    pass(4, "state-machine oracle");
}

#[test]
fn acceptance_05_metric_identities() {
    let mut runs = 0;
    for seed in 200..205u64 {
        let data = ou_pair_world(
            &WorldConfig {
                n_days: 700,
                ..WorldConfig::default()
            },
            seed,
        )
        .unwrap();
        let dates = data.dates();
        let mut cfg = StudyConfig::new(vec![300], dates[dates.len() - 200], *dates.last().unwrap());
        cfg.b_grid = vec![0.4, 0.5, 0.6];
        let formation = {
            let out_start = dates.partition_point(|d| *d < cfg.out_sample_start);
            data.slice(out_start - 300, out_start).unwrap()
        };
        let pair = form_pair(&formation, &cfg.b_grid, TRADING_DT).unwrap();
        for (so, sc) in [(1.0, 0.0), (1.5, 0.0), (1.2, 0.3)] {
            let th = Thresholds::new(so, sc).unwrap();
            for period in [Period::InSample, Period::OutOfSample] {
                let (ledger, m) =
                    oupairs_core::sweep::evaluate_thresholds(&pair, &data, &cfg, period, &th)
                        .unwrap();
                runs += 1;

                // RetPerT * TFreq = Annualized_Return to 1e-12 relative
                if let Some(rpt) = m.ret_per_trade {
                    let lhs = rpt * m.trade_freq;
                    let rel = (lhs - m.ann_return).abs() / m.ann_return.abs().max(1e-300);
                    if rel >= 1e-12 {
                        fail(5, "metric identities", &format!("rpt*tf off by {rel:.3e}"));
                    }
                }

                // TFreq * k / 252 = n exactly: trade_freq is the correctly
                // rounded value of the exact rational n*252/k (bit-checked
                // here), so the identity holds in exact arithmetic. A float
                // round trip tf*k/252 is NOT exact for all k (e.g. n=3,
                // k=11), which is why the check pins the defining quotient.
                let defining = m.n_trades as f64 * 252.0 / m.k_days as f64;
                if m.trade_freq.to_bits() != defining.to_bits() {
                    fail(5, "metric identities", "trade_freq is not n*252/k");
                }
                let back = (m.trade_freq * m.k_days as f64 / 252.0).round() as usize;
                if back != m.n_trades {
                    fail(5, "metric identities", "tf*k/252 does not round back to n");
                }

                // max_drawdown = 0 iff the equity curve is non-decreasing
                let non_decreasing = ledger.daily_returns.iter().all(|r| *r >= 0.0);
                if (m.max_drawdown == 0.0) != non_decreasing {
                    fail(
                        5,
                        "metric identities",
                        &format!(
                            "dd {} vs non-decreasing {non_decreasing}",
                            m.max_drawdown
                        ),
                    );
                }
            }
        }
    }
    assert!(runs >= 30);
    pass(5, "metric identities");
}

/// Loads the checked-in fixture ledger (dates, positions, daily returns;
/// trades reconstructed from the position transitions).
fn load_fixture_ledger() -> TradeLedger {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/cci_hcp_like.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut dates = Vec::new();
    let mut positions: Vec<i32> = Vec::new();
    let mut returns = Vec::new();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        dates.push(cols[0].parse().unwrap());
        positions.push(cols[1].parse().unwrap());
        returns.push(cols[2].parse().unwrap());
    }
    let mut trades = Vec::new();
    let mut open: Option<(usize, i32)> = None;
    for i in 0..positions.len() {
        let prev = if i == 0 { 0 } else { positions[i - 1] };
        if prev == 0 && positions[i] != 0 {
            open = Some((i, positions[i]));
        }
        if prev != 0 && positions[i] == 0 {
            let (entry, direction) = open.take().unwrap();
            trades.push(Trade {
                entry,
                exit: i,
                direction,
            });
        }
    }
    assert!(open.is_none(), "fixture must close every trade");
    TradeLedger {
        dates,
        positions,
        daily_returns: returns,
        trades,
    }
}

#[test]
fn acceptance_06_table1_consistency_on_fixture() {
    let ledger = load_fixture_ledger();
    let m = compute_metrics(&ledger).unwrap();

    let within = |value: f64, target: f64, tol: f64| (value / target - 1.0).abs() < tol;
    let sr = m.sharpe.unwrap();
    let tr = m.trade_range.unwrap();
    let rpt = m.ret_per_trade.unwrap();
    println!(
        "  fixture: SR {sr:.4} AR {:.4} DD {:.4} TF {:.3} TR {tr} RPT {rpt:.5}",
        m.ann_return, m.max_drawdown, m.trade_freq
    );

    // the per-index targets at ±0.5%
    for (name, value, target) in [
        ("SR", sr, 2.326),
        ("AR", m.ann_return, 0.236),
        ("DD", m.max_drawdown, -0.06),
        ("TF", m.trade_freq, 7.20),
        ("TR", tr, 15.0),
    ] {
        if !within(value, target, 0.005) {
            fail(
                6,
                "fixture consistency",
                &format!("{name} {value} not within 0.5% of {target}"),
            );
        }
    }
    // the printed RPT is only self-consistent with the printed AR and TF to
    // a few percent (0.236/7.20 = 0.0328 vs 0.034), so the formula reading
    // is pinned at the 5% consistency level
    if !within(rpt, 0.034, 0.05) {
        fail(
            6,
            "fixture consistency",
            &format!("RPT {rpt} not within 5% of 0.034"),
        );
    }
    let identity = (m.ann_return / m.trade_freq - rpt).abs() / rpt;
    if identity >= 1e-12 {
        fail(6, "fixture consistency", "AR/TF != RPT");
    }
    pass(6, "fixture consistency");
}

#[test]
fn acceptance_07_hand_fixture_to_1e9() {
    let dates = (0..3)
        .map(|i| chrono::NaiveDate::from_ymd_opt(2014, 1, 1).unwrap() + chrono::Days::new(i))
        .collect();
    let ledger = TradeLedger {
        dates,
        positions: vec![1, 1, 1],
        daily_returns: vec![0.01, -0.005, 0.02],
        trades: vec![Trade {
            entry: 0,
            exit: 3,
            direction: 1,
        }],
    };
    let m = compute_metrics(&ledger).unwrap();

    // spreadsheet oracle: G = 1.01 * 0.995 * 1.02
    //   = 101 * 995 * 102 / 10^7 = 10250490 / 10^7 = 1.025049 exactly
    let g_oracle = 1.025049_f64;
    let growth: f64 = ledger.daily_returns.iter().map(|r| 1.0 + r).product();
    if (growth - g_oracle).abs() >= 1e-9 {
        fail(7, "hand fixture", &format!("G {growth} vs {g_oracle}"));
    }
    if (m.ann_return - (g_oracle.powf(84.0) - 1.0)).abs() >= 1e-9 {
        fail(7, "hand fixture", &format!("AR {}", m.ann_return));
    }
    if m.trade_freq != 84.0 {
        fail(7, "hand fixture", &format!("TF {}", m.trade_freq));
    }
    if m.trade_range != Some(3.0) {
        fail(7, "hand fixture", &format!("TR {:?}", m.trade_range));
    }
    let rpt = m.ret_per_trade.unwrap();
    if (rpt - m.ann_return / 84.0).abs() >= 1e-9 {
        fail(7, "hand fixture", &format!("RPT {rpt}"));
    }
    pass(7, "hand fixture");
}

fn metrics_bits(m: &oupairs_core::Metrics) -> Vec<u64> {
    let opt = |v: Option<f64>| v.map(f64::to_bits).unwrap_or(u64::MAX);
    vec![
        opt(m.sharpe),
        m.ann_return.to_bits(),
        m.max_drawdown.to_bits(),
        m.trade_freq.to_bits(),
        opt(m.trade_range),
        opt(m.ret_per_trade),
        m.n_trades as u64,
        m.k_days as u64,
    ]
}

#[test]
fn acceptance_08_sweep_determinism_and_grid() {
    let so = StudyConfig::default_s_open_grid();
    let sc = StudyConfig::default_s_close_grid();
    if so.len() != 21 || sc.len() != 21 {
        fail(8, "sweep determinism", "grids must enumerate 21 x 21 candidates");
    }
    for (i, v) in so.iter().enumerate() {
        if *v != (100 + 5 * i) as f64 / 100.0 {
            fail(8, "sweep determinism", &format!("s_open[{i}] = {v} inexact"));
        }
    }
    for (j, v) in sc.iter().enumerate() {
        if *v != (5 * j) as f64 / 100.0 {
            fail(8, "sweep determinism", &format!("s_close[{j}] = {v} inexact"));
        }
    }

    let data = ou_pair_world(
        &WorldConfig {
            n_days: 700,
            ..WorldConfig::default()
        },
        88,
    )
    .unwrap();
    let dates = data.dates();
    let mut cfg = StudyConfig::new(vec![300], dates[dates.len() - 200], *dates.last().unwrap());
    cfg.b_grid = vec![0.5];
    let formation = {
        let out_start = dates.partition_point(|d| *d < cfg.out_sample_start);
        data.slice(out_start - 300, out_start).unwrap()
    };
    let pair = form_pair(&formation, &cfg.b_grid, TRADING_DT).unwrap();

    cfg.workers = 1;
    let serial = run_sweep(&pair, &data, &cfg, Period::InSample).unwrap();
    cfg.workers = 8;
    let parallel = run_sweep(&pair, &data, &cfg, Period::InSample).unwrap();

    if serial.cells.len() != 440 || serial.skipped.len() != 1 {
        fail(
            8,
            "sweep determinism",
            &format!(
                "expected 440 cells + 1 skipped, got {} + {}",
                serial.cells.len(),
                serial.skipped.len()
            ),
        );
    }
    for (a, b) in serial.cells.iter().zip(&parallel.cells) {
        let same_th = a.thresholds == b.thresholds;
        if !same_th || metrics_bits(&a.metrics) != metrics_bits(&b.metrics) {
            fail(
                8,
                "sweep determinism",
                &format!(
                    "cell ({}, {}) differs between worker counts",
                    a.thresholds.s_open(),
                    a.thresholds.s_close()
                ),
            );
        }
    }
    pass(8, "sweep determinism");
}

#[test]
fn acceptance_09_selection_beats_median_out_of_sample() {
    let start = Instant::now();
    let mut wins = 0;
    for seed in 100..120u64 {
        // world design notes, earned the hard way:
        //  * the planted spread's noise must sit far below the walk leg's
        //    (100x in daily variance) or the likelihood prefers a diluted
        //    hedge and every cell trades a contaminated portfolio;
        //  * the hedge grid must be fine enough (0.005 steps) to land on
        //    the drifted effective ratio of a mid-history window;
        //  * brisk reversion plus a long out-of-sample stretch give each
        //    cell enough trades that true threshold differences outweigh
        //    the winner's-curse noise of picking the in-sample argmax.
        let data = ou_pair_world(
            &WorldConfig {
                n_days: 2200,
                mu: 25.0,
                sigma: 0.008,
                gbm_vol: 0.08,
                gbm_drift: 0.02,
                ..WorldConfig::default()
            },
            seed,
        )
        .unwrap();
        let dates = data.dates();
        let mut cfg = StudyConfig::new(vec![1200], dates[dates.len() - 800], *dates.last().unwrap());
        cfg.b_grid = (60..=160).map(|i| i as f64 / 200.0).collect();
        cfg.window = 120;
        cfg.workers = 4;
        let formation = {
            let out_start = dates.partition_point(|d| *d < cfg.out_sample_start);
            data.slice(out_start - 1200, out_start).unwrap()
        };
        let pair = form_pair(&formation, &cfg.b_grid, TRADING_DT).unwrap();

        let in_cells = run_sweep(&pair, &data, &cfg, Period::InSample).unwrap().cells;
        let best = select_best(&in_cells).unwrap();
        let out_cells = run_sweep(&pair, &data, &cfg, Period::OutOfSample).unwrap().cells;

        let best_out = out_cells
            .iter()
            .find(|c| c.thresholds == best.thresholds)
            .and_then(|c| c.metrics.sharpe);
        let mut defined: Vec<f64> = out_cells.iter().filter_map(|c| c.metrics.sharpe).collect();
        if defined.is_empty() {
            continue;
        }
        let med = median(&mut defined);
        if let Some(b) = best_out {
            if b > med {
                wins += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    println!("  selection beat the median out-of-sample Sharpe in {wins}/20 worlds ({elapsed:?})");
    if elapsed.as_secs() >= 300 {
        fail(9, "selection sanity", &format!("runtime {elapsed:?} >= 5 min"));
    }
    if wins < 14 {
        fail(9, "selection sanity", &format!("only {wins}/20 worlds, need >= 14"));
    }
    pass(9, "selection sanity");
}

#[test]
fn acceptance_10_cli_byte_determinism() {
    let w = cli_world(55, "sim_steps=2000\nso=1.5\nsc=0\n");
    let out_dir = w.root.join("out");
    for cmd in ["fit", "sweep", "simulate", "backtest", "study"] {
        let (stdout_a, code_a) = run_cli(&w, &[cmd]);
        if code_a != 0 {
            fail(10, "CLI determinism", &format!("{cmd}: exit {code_a}"));
        }
        let mut files_a = std::collections::BTreeMap::new();
        if out_dir.exists() {
            for entry in std::fs::read_dir(&out_dir).unwrap() {
                let p = entry.unwrap().path();
                files_a.insert(p.clone(), std::fs::read(&p).unwrap());
            }
            std::fs::remove_dir_all(&out_dir).unwrap();
        }

        let (stdout_b, code_b) = run_cli(&w, &[cmd]);
        assert_eq!(code_b, 0);
        if stdout_a != stdout_b {
            fail(10, "CLI determinism", &format!("{cmd}: stdout differs between runs"));
        }
        for (path, bytes_a) in &files_a {
            let bytes_b = std::fs::read(path).unwrap();
            if *bytes_a != bytes_b {
                fail(
                    10,
                    "CLI determinism",
                    &format!("{cmd}: {} differs between runs", path.display()),
                );
            }
        }
        if out_dir.exists() {
            std::fs::remove_dir_all(&out_dir).unwrap();
        }
    }
    pass(10, "CLI determinism");
}
