//! Output formatting and atomic file emission.
//!
//! Every float is printed with 6 significant digits so fixtures and
//! rerun-diffs stay byte-stable; undefined metric values print as `nan`.

use anyhow::{Context, Result};
use oupairs_core::Metrics;
use std::fs;
use std::path::{Path, PathBuf};

/// 6-significant-digit fixed/scientific formatting.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.00000".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&exp) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => fmt_sig(v),
        None => "nan".into(),
    }
}

/// Key=value lines for one metrics block, in the report's canonical order:
/// length, SR, AR, DD, TF, TR, RPT, trade count.
pub fn metric_lines(prefix: &str, suffix: &str, m: &Metrics) -> Vec<String> {
    vec![
        format!("{prefix}_length{suffix}={}", m.k_days),
        format!("{prefix}_sr{suffix}={}", fmt_opt(m.sharpe)),
        format!("{prefix}_ar{suffix}={}", fmt_sig(m.ann_return)),
        format!("{prefix}_dd{suffix}={}", fmt_sig(m.max_drawdown)),
        format!("{prefix}_tf{suffix}={}", fmt_sig(m.trade_freq)),
        format!("{prefix}_tr{suffix}={}", fmt_opt(m.trade_range)),
        format!("{prefix}_rpt{suffix}={}", fmt_opt(m.ret_per_trade)),
        format!("{prefix}_trades{suffix}={}", m.n_trades),
    ]
}

/// One output file queued for atomic emission.
pub struct OutFile {
    pub name: String,
    pub contents: String,
}

impl OutFile {
    pub fn new(name: impl Into<String>, contents: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            contents: contents.into(),
        }
    }
}

/// Writes every file to a temporary sibling first and renames only after
/// all writes succeeded, so a failing command leaves no partial outputs.
pub fn write_outputs(dir: &Path, files: &[OutFile]) -> Result<Vec<PathBuf>> {
    if files.is_empty() {
        return Ok(Vec::new());
    }
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;

    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
    for f in files {
        let target = dir.join(&f.name);
        let tmp = dir.join(format!(".{}.tmp", f.name));
        if let Err(e) = fs::write(&tmp, &f.contents) {
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            let _ = fs::remove_file(&tmp);
            return Err(e).with_context(|| format!("cannot write {}", tmp.display()));
        }
        staged.push((tmp, target));
    }
    let mut written = Vec::new();
    for (tmp, target) in staged {
        fs::rename(&tmp, &target)
            .with_context(|| format!("cannot move {} into place", target.display()))?;
        written.push(target);
    }
    Ok(written)
}
