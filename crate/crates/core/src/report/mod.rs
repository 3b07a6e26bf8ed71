//! Report rows, table and figure reproduction, and the persistent count cache.

pub mod cache;
mod figure;
mod tables;

use num_bigint::BigUint;
use serde::Serialize;

use crate::asymptotics::{estimate_count, moments, validity_check};
use crate::enumeration::{count_matrices_with, CountOptions, MatrixCount, RowSums};
use crate::error::{Error, Result};
use crate::logreal::LogReal;

pub use cache::{CacheLock, CountCache, CountCacheEntry, ENGINE_VERSION};
pub use figure::{figure_rows, FigureKind, FigureOptions, FigureRow};
pub use tables::{table1_row_sums, table1_rows, table2_rows, TableReport, TABLE2_ROWS};

/// Rounds a non-negative integer to `digits` significant figures, ties to
/// even, formatted as `d.ddEk`. Works on the decimal expansion, so it is exact
/// for integers of any size.
pub fn sci_round_integer(value: &BigUint, digits: usize) -> String {
    assert!(digits >= 1);
    let s = value.to_str_radix(10);
    let bytes = s.as_bytes();
    if bytes == b"0" {
        return format!("{:.*}E0", digits - 1, 0.0);
    }
    let mut exponent = bytes.len() - 1;
    let mut kept: Vec<u8> = bytes.iter().take(digits).map(|b| b - b'0').collect();
    kept.resize(digits, 0);
    let rest = bytes.get(digits..).unwrap_or(&[]);
    let round_up = match rest.first() {
        Some(&d) if d > b'5' => true,
        Some(&b'5') => rest[1..].iter().any(|&d| d != b'0') || kept[digits - 1] % 2 == 1,
        _ => false,
    };
    if round_up {
        let mut i = digits;
        loop {
            if i == 0 {
                kept.insert(0, 1);
                kept.truncate(digits);
                exponent += 1;
                break;
            }
            i -= 1;
            if kept[i] == 9 {
                kept[i] = 0;
            } else {
                kept[i] += 1;
                break;
            }
        }
    }
    let mut out = String::new();
    out.push((b'0' + kept[0]) as char);
    if digits > 1 {
        out.push('.');
        out.extend(kept[1..].iter().map(|&d| (b'0' + d) as char));
    }
    format!("{out}E{exponent}")
}

/// One line of a count table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: usize,
    pub t_or_h: String,
    /// Exact count as a decimal string.
    pub exact: Option<String>,
    /// Asymptotic estimate, 3 significant figures; `n/a` for `N < 3`.
    pub estimate_sci: String,
    /// `estimate / exact`, present only when both exist and `exact > 0`.
    pub ratio: Option<f64>,
    pub y2: Option<f64>,
    pub y3: Option<f64>,
    pub y4: Option<f64>,
    pub max_validity_ratio: Option<f64>,
    pub in_window: Option<bool>,
    #[serde(skip)]
    pub estimate: Option<LogReal>,
}

/// Flat string view of a [`ReportRow`], used for CSV.
#[derive(Debug, Serialize)]
struct ReportRecord<'a> {
    n: usize,
    t_or_h: &'a str,
    exact: &'a str,
    estimate_sci: &'a str,
    ratio: String,
    y2: String,
    y3: String,
    y4: String,
    max_validity_ratio: String,
    in_window: String,
}

/// Prints integral values without a fractional part and others with at most
/// six decimals.
pub fn format_real(v: f64) -> String {
    if (v - v.round()).abs() <= 1e-9 * v.abs().max(1.0) {
        return format!("{}", v.round() as i64);
    }
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

impl ReportRow {
    /// Builds the row for `rs` from an optional exact count.
    pub fn for_counts(rs: &RowSums, exact: Option<&MatrixCount>, omega: f64) -> ReportRow {
        let t_or_h = join(rs.t());
        let mut row = ReportRow {
            n: rs.n(),
            t_or_h,
            exact: exact.map(MatrixCount::to_decimal),
            estimate_sci: "n/a".into(),
            ratio: None,
            y2: None,
            y3: None,
            y4: None,
            max_validity_ratio: None,
            in_window: None,
            estimate: None,
        };
        if rs.n() < 3 {
            return row;
        }
        if let Ok(m) = moments(rs) {
            row.y2 = Some(m.y2);
            row.y3 = Some(m.y3);
            row.y4 = Some(m.y4);
        }
        if rs.total() > 0 {
            let v = validity_check(rs, omega);
            row.max_validity_ratio = Some(v.max_ratio);
            row.in_window = Some(v.in_window);
        }
        if let Ok(est) = estimate_count(rs) {
            row.estimate_sci = est.to_sci(3);
            row.estimate = Some(est);
            row.ratio = exact
                .filter(|e| !e.is_zero())
                .map(|e| (est.ln_abs() - e.ln()).exp());
        }
        row
    }

    /// `exact` rounded like the estimate column.
    pub fn exact_sci(&self) -> Option<String> {
        let v = MatrixCount::parse_decimal(self.exact.as_deref()?)?;
        Some(sci_round_integer(v.value(), 3))
    }

    fn record(&self) -> ReportRecord<'_> {
        ReportRecord {
            n: self.n,
            t_or_h: &self.t_or_h,
            exact: self.exact.as_deref().unwrap_or(""),
            estimate_sci: &self.estimate_sci,
            ratio: opt(self.ratio, |r| format!("{r:.3}")),
            y2: opt(self.y2, format_real),
            y3: opt(self.y3, format_real),
            y4: opt(self.y4, format_real),
            max_validity_ratio: opt(self.max_validity_ratio, |r| format!("{r:.4}")),
            in_window: opt(self.in_window, |b| b.to_string()),
        }
    }
}

pub(crate) fn join<T: ToString>(values: &[T]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Output encoding for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Serializes any rows as CSV (header always written) or pretty JSON array.
pub fn write_records<W: std::io::Write, S: Serialize>(
    out: W,
    rows: &[S],
    header: &[&str],
    format: Format,
) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(header).map_err(csv_err)?;
            for r in rows {
                w.serialize(r).map_err(csv_err)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub const REPORT_COLUMNS: [&str; 10] = [
    "n",
    "t_or_h",
    "exact",
    "estimate_sci",
    "ratio",
    "y2",
    "y3",
    "y4",
    "max_validity_ratio",
    "in_window",
];

pub fn write_report<W: std::io::Write>(out: W, rows: &[ReportRow], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let records: Vec<_> = rows.iter().map(ReportRow::record).collect();
            write_records(out, &records, &REPORT_COLUMNS, format)
        }
        Format::Json => write_records(out, rows, &REPORT_COLUMNS, format),
    }
}

/// Computes exact counts through an optional cache.
pub struct Counter<'a> {
    pub options: CountOptions,
    pub cache: Option<&'a mut CountCache>,
}

impl<'a> Counter<'a> {
    pub fn new(options: CountOptions, cache: Option<&'a mut CountCache>) -> Self {
        Counter { options, cache }
    }

    pub fn count(&mut self, rs: &RowSums) -> Result<MatrixCount> {
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(rs)) {
            return Ok(hit);
        }
        let value = count_matrices_with(rs, &self.options)?;
        if let Some(cache) = self.cache.as_mut() {
            cache.insert(rs, &value);
        }
        Ok(value)
    }
}

/// Row for a single row-sum vector. A budget refusal leaves `exact` empty and
/// is returned alongside the row.
pub fn count_row(counter: &mut Counter<'_>, rs: &RowSums, omega: f64) -> (ReportRow, Option<Error>) {
    match counter.count(rs) {
        Ok(c) => (ReportRow::for_counts(rs, Some(&c), omega), None),
        Err(e) => (ReportRow::for_counts(rs, None, omega), Some(e)),
    }
}
