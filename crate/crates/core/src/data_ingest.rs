//! Loading, validation, and date alignment of daily price series.
//!
//! Input files are two-column CSVs with header `date,price`, ISO-8601 dates,
//! one file per asset. Prices are assumed split/dividend-adjusted upstream.

use crate::error::{Error, Result};
use chrono::NaiveDate;
use std::fs;
use std::path::Path;

/// Daily closing prices for one asset, sorted by date.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub asset_id: String,
    pub dates: Vec<NaiveDate>,
    pub prices: Vec<f64>,
}

impl PriceSeries {
    /// Builds a series, enforcing strictly increasing dates and positive prices.
    pub fn new(asset_id: impl Into<String>, dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        if dates.len() != prices.len() {
            return Err(Error::InvalidInput(format!(
                "{} dates but {} prices",
                dates.len(),
                prices.len()
            )));
        }
        if dates.is_empty() {
            return Err(Error::InvalidInput("empty price series".into()));
        }
        for w in dates.windows(2) {
            if w[1] == w[0] {
                return Err(Error::DuplicateDate(w[0]));
            }
            if w[1] < w[0] {
                return Err(Error::InvalidInput(format!(
                    "dates out of order: {} after {}",
                    w[1], w[0]
                )));
            }
        }
        if let Some(&p) = prices.iter().find(|p| !p.is_finite() || **p <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "price {p} is not positive and finite"
            )));
        }
        Ok(Self {
            asset_id: asset_id.into(),
            dates,
            prices,
        })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Serializes back to the on-disk CSV format. Prices use the shortest
    /// round-trip decimal form, so load(write(s)) == s bit for bit.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,price\n");
        for (d, p) in self.dates.iter().zip(&self.prices) {
            out.push_str(&format!("{d},{p}\n"));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Two price series restricted to their common trading dates.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    pub series_a: PriceSeries,
    pub series_b: PriceSeries,
}

impl AlignedPair {
    /// The common trading dates (identical for both legs).
    pub fn dates(&self) -> &[NaiveDate] {
        &self.series_a.dates
    }

    pub fn len(&self) -> usize {
        self.series_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series_a.is_empty()
    }

    /// Restricts the pair to date indices `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Result<AlignedPair> {
        if start >= end || end > self.len() {
            return Err(Error::InvalidInput(format!(
                "slice [{start}, {end}) out of range for {} dates",
                self.len()
            )));
        }
        let cut = |s: &PriceSeries| PriceSeries {
            asset_id: s.asset_id.clone(),
            dates: s.dates[start..end].to_vec(),
            prices: s.prices[start..end].to_vec(),
        };
        Ok(AlignedPair {
            series_a: cut(&self.series_a),
            series_b: cut(&self.series_b),
        })
    }
}

/// Parses a `date,price` CSV into a sorted series.
///
/// Rows may arrive out of order; they are sorted by date. Duplicate dates,
/// non-positive prices, and unparseable rows are rejected with the offending
/// line number.
pub fn load_csv(path: &Path, asset_id: &str) -> Result<PriceSeries> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(&text);

    let mut rows: Vec<(NaiveDate, f64, usize)> = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            if line != "date,price" {
                return Err(Error::MalformedRow {
                    path: path.to_path_buf(),
                    line: line_no,
                    reason: format!("expected header 'date,price', got '{line}'"),
                });
            }
            saw_header = true;
            continue;
        }
        let (date_str, price_str) = line.split_once(',').ok_or_else(|| Error::MalformedRow {
            path: path.to_path_buf(),
            line: line_no,
            reason: "missing ',' separator".into(),
        })?;
        let date = NaiveDate::parse_from_str(date_str.trim(), "%Y-%m-%d").map_err(|e| {
            Error::MalformedRow {
                path: path.to_path_buf(),
                line: line_no,
                reason: format!("bad date '{}': {e}", date_str.trim()),
            }
        })?;
        let price: f64 = price_str.trim().parse().map_err(|e| Error::MalformedRow {
            path: path.to_path_buf(),
            line: line_no,
            reason: format!("bad price '{}': {e}", price_str.trim()),
        })?;
        if !price.is_finite() || price <= 0.0 {
            return Err(Error::NonPositivePrice {
                path: path.to_path_buf(),
                line: line_no,
                value: price,
            });
        }
        rows.push((date, price, line_no));
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }

    rows.sort_by_key(|r| r.0);
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::DuplicateDate(w[0].0));
        }
    }
    PriceSeries::new(
        asset_id,
        rows.iter().map(|r| r.0).collect(),
        rows.iter().map(|r| r.1).collect(),
    )
}

/// Keeps only the dates present in both series, preserving order.
///
/// Missing dates are dropped, never interpolated: interpolation would
/// fabricate prices that then feed the likelihood fit.
pub fn align(a: &PriceSeries, b: &PriceSeries) -> Result<AlignedPair> {
    let mut dates = Vec::new();
    let mut prices_a = Vec::new();
    let mut prices_b = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a.dates[i].cmp(&b.dates[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dates.push(a.dates[i]);
                prices_a.push(a.prices[i]);
                prices_b.push(b.prices[j]);
                i += 1;
                j += 1;
            }
        }
    }
    if dates.is_empty() {
        return Err(Error::NoOverlap {
            a: a.asset_id.clone(),
            b: b.asset_id.clone(),
        });
    }
    if dates.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "only {} overlapping date(s) between {} and {}",
            dates.len(),
            a.asset_id,
            b.asset_id
        )));
    }
    Ok(AlignedPair {
        series_a: PriceSeries {
            asset_id: a.asset_id.clone(),
            dates: dates.clone(),
            prices: prices_a,
        },
        series_b: PriceSeries {
            asset_id: b.asset_id.clone(),
            dates,
            prices: prices_b,
        },
    })
}
