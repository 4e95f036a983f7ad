//! Configuration: a flat key=value file, every key overridable by a
//! same-named CLI flag, with `OUPAIRS_SEED` overriding the file's seed.
//! Precedence: defaults < file < OUPAIRS_SEED < flags.

use anyhow::{anyhow, bail, Context, Result};
use chrono::NaiveDate;
use oupairs_core::sweep::StudyConfig;
use oupairs_core::Thresholds;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Raw CLI flags shared by every subcommand. Values stay as strings here
/// and are merged with the config file before typed parsing.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// Path to a key=value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory holding one `<TICKER>.csv` per asset.
    #[arg(long = "data_dir")]
    pub data_dir: Option<String>,
    /// Pair as `LONG,SHORT` tickers.
    #[arg(long)]
    pub pair: Option<String>,
    /// Comma-separated in-sample lengths in trading days; studies use all,
    /// other commands use the first.
    #[arg(long = "in_sample_lengths")]
    pub in_sample_lengths: Option<String>,
    /// First out-of-sample date, ISO-8601.
    #[arg(long = "out_sample_start")]
    pub out_sample_start: Option<String>,
    /// Last out-of-sample date, ISO-8601 (default: last common date).
    #[arg(long = "out_sample_end")]
    pub out_sample_end: Option<String>,
    /// Comma-separated entry thresholds (default 1.00,1.05,...,2.00).
    #[arg(long = "s_open_grid")]
    pub s_open_grid: Option<String>,
    /// Comma-separated exit thresholds (default 0.00,0.05,...,1.00).
    #[arg(long = "s_close_grid")]
    pub s_close_grid: Option<String>,
    /// Single entry threshold; collapses the entry grid to one value.
    #[arg(long)]
    pub so: Option<String>,
    /// Single exit threshold; collapses the exit grid to one value.
    #[arg(long)]
    pub sc: Option<String>,
    /// Rolling estimation window in trading days.
    #[arg(long)]
    pub window: Option<String>,
    /// Comma-separated hedge-dollar grid (default 0.001..1.000 step 0.001).
    #[arg(long = "b_grid")]
    pub b_grid: Option<String>,
    /// Directory for emitted files.
    #[arg(long = "output_dir")]
    pub output_dir: Option<String>,
    /// Seed for simulation commands.
    #[arg(long)]
    pub seed: Option<String>,
    /// Parallel workers for grid sweeps.
    #[arg(long)]
    pub workers: Option<String>,
    /// Steps for the `simulate` command (default: formation length - 1).
    #[arg(long = "sim_steps")]
    pub sim_steps: Option<String>,
}

/// Fully resolved, typed run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data_dir: PathBuf,
    pub asset_a: String,
    pub asset_b: String,
    pub study: StudyConfig,
    /// Explicit single threshold pair, set when both `so` and `sc` appear.
    pub fixed_thresholds: Option<Thresholds>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub sim_steps: Option<usize>,
}

fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key=value, got '{line}'", path.display(), i + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| anyhow!("{key}: cannot parse '{s}': {e}"))
        })
        .collect()
}

fn parse_date(key: &str, value: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(value, "%Y-%m-%d")
        .map_err(|e| anyhow!("{key}: expected YYYY-MM-DD, got '{value}': {e}"))
}

impl RunConfig {
    /// Merges file, environment, and flags, then parses and validates.
    pub fn resolve(args: &CommonArgs) -> Result<RunConfig> {
        let mut map = match &args.config {
            Some(path) => parse_config_file(path)?,
            None => BTreeMap::new(),
        };
        if let Ok(seed) = std::env::var("OUPAIRS_SEED") {
            map.insert("seed".into(), seed);
        }

        let overrides: [(&str, &Option<String>); 14] = [
            ("data_dir", &args.data_dir),
            ("pair", &args.pair),
            ("in_sample_lengths", &args.in_sample_lengths),
            ("out_sample_start", &args.out_sample_start),
            ("out_sample_end", &args.out_sample_end),
            ("s_open_grid", &args.s_open_grid),
            ("s_close_grid", &args.s_close_grid),
            ("so", &args.so),
            ("sc", &args.sc),
            ("window", &args.window),
            ("b_grid", &args.b_grid),
            ("output_dir", &args.output_dir),
            ("seed", &args.seed),
            ("workers", &args.workers),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                map.insert(key.to_string(), v.clone());
            }
        }
        if let Some(v) = &args.sim_steps {
            map.insert("sim_steps".into(), v.clone());
        }

        let known = [
            "data_dir",
            "pair",
            "in_sample_lengths",
            "out_sample_start",
            "out_sample_end",
            "s_open_grid",
            "s_close_grid",
            "so",
            "sc",
            "window",
            "b_grid",
            "output_dir",
            "seed",
            "workers",
            "sim_steps",
        ];
        for key in map.keys() {
            if !known.contains(&key.as_str()) {
                bail!("unknown config key '{key}'");
            }
        }

        let get = |key: &str| -> Option<&String> { map.get(key) };
        let require = |key: &str| -> Result<&String> {
            get(key).ok_or_else(|| anyhow!("missing required config key '{key}'"))
        };

        let data_dir = PathBuf::from(require("data_dir")?);
        if !data_dir.is_dir() {
            bail!("data_dir {} does not exist", data_dir.display());
        }

        let pair_raw = require("pair")?;
        let (asset_a, asset_b) = pair_raw
            .split_once(',')
            .ok_or_else(|| anyhow!("pair: expected 'LONG,SHORT', got '{pair_raw}'"))?;
        let (asset_a, asset_b) = (asset_a.trim().to_string(), asset_b.trim().to_string());
        if asset_a.is_empty() || asset_b.is_empty() {
            bail!("pair: tickers must be non-empty");
        }

        let in_sample_lengths: Vec<usize> =
            parse_list("in_sample_lengths", require("in_sample_lengths")?)?;
        if in_sample_lengths.is_empty() || in_sample_lengths.contains(&0) {
            bail!("in_sample_lengths: need at least one positive length");
        }

        let out_sample_start = parse_date("out_sample_start", require("out_sample_start")?)?;
        let out_sample_end = match get("out_sample_end") {
            Some(v) => parse_date("out_sample_end", v)?,
            None => NaiveDate::MAX,
        };

        let mut study = StudyConfig::new(in_sample_lengths, out_sample_start, out_sample_end);

        if let Some(v) = get("s_open_grid") {
            study.s_open_grid = parse_list("s_open_grid", v)?;
        }
        if let Some(v) = get("s_close_grid") {
            study.s_close_grid = parse_list("s_close_grid", v)?;
        }
        let so = get("so")
            .map(|v| v.parse::<f64>().map_err(|e| anyhow!("so: {e}")))
            .transpose()?;
        let sc = get("sc")
            .map(|v| v.parse::<f64>().map_err(|e| anyhow!("sc: {e}")))
            .transpose()?;
        if let Some(so) = so {
            study.s_open_grid = vec![so];
        }
        if let Some(sc) = sc {
            study.s_close_grid = vec![sc];
        }
        let fixed_thresholds = match (so, sc) {
            (Some(so), Some(sc)) => Some(
                Thresholds::new(so, sc)
                    .map_err(|e| anyhow!("so/sc: {e}"))?,
            ),
            _ => None,
        };

        if let Some(v) = get("window") {
            study.window = v.parse().map_err(|e| anyhow!("window: {e}"))?;
        }
        if let Some(v) = get("b_grid") {
            study.b_grid = parse_list("b_grid", v)?;
        }
        if let Some(v) = get("workers") {
            study.workers = v.parse().map_err(|e| anyhow!("workers: {e}"))?;
            if study.workers < 1 {
                bail!("workers must be at least 1");
            }
        }

        let seed: u64 = match get("seed") {
            Some(v) => v.parse().map_err(|e| anyhow!("seed: {e}"))?,
            None => 0,
        };
        let sim_steps = get("sim_steps")
            .map(|v| v.parse::<usize>().map_err(|e| anyhow!("sim_steps: {e}")))
            .transpose()?;

        let output_dir = PathBuf::from(get("output_dir").map(String::as_str).unwrap_or("out"));

        Ok(RunConfig {
            data_dir,
            asset_a,
            asset_b,
            study,
            fixed_thresholds,
            output_dir,
            seed,
            sim_steps,
        })
    }
}
