//! Row sets of the two reference tables.

use super::{count_row, Counter, ReportRow};
use crate::enumeration::RowSums;
use crate::error::{Error, Result};

/// Row sums of 7x7 matrices with total 56.
const TABLE1: [[u64; 7]; 15] = [
    [8, 8, 8, 8, 8, 8, 8],
    [7, 8, 8, 8, 8, 8, 9],
    [7, 7, 8, 8, 8, 9, 9],
    [7, 7, 7, 8, 9, 9, 9],
    [6, 8, 8, 8, 8, 8, 10],
    [6, 7, 8, 8, 9, 9, 9],
    [7, 7, 7, 8, 8, 9, 10],
    [5, 8, 8, 8, 9, 9, 9],
    [7, 7, 7, 8, 8, 8, 11],
    [5, 7, 8, 8, 9, 9, 10],
    [6, 7, 7, 7, 9, 10, 10],
    [7, 7, 7, 7, 8, 8, 12],
    [5, 5, 5, 9, 10, 11, 11],
    [5, 7, 7, 7, 7, 9, 14],
    [4, 6, 7, 7, 8, 10, 14],
];

/// `(N, t)` with every row summing to `t`.
pub const TABLE2_ROWS: [(usize, u64); 13] = [
    (6, 6),
    (7, 8),
    (8, 9),
    (9, 10),
    (10, 11),
    (11, 12),
    (12, 13),
    (13, 14),
    (14, 15),
    (15, 14),
    (16, 12),
    (17, 12),
    (18, 12),
];

pub fn table1_row_sums() -> Vec<RowSums> {
    TABLE1
        .iter()
        .map(|t| RowSums::new(t.to_vec()).expect("seven rows"))
        .collect()
}

/// Rows plus the warnings for counts that were refused.
#[derive(Debug, Clone, PartialEq)]
pub struct TableReport {
    pub rows: Vec<ReportRow>,
    pub warnings: Vec<String>,
}

fn collect(
    counter: &mut Counter<'_>,
    items: impl Iterator<Item = (RowSums, bool)>,
    omega: f64,
) -> Result<TableReport> {
    let mut report = TableReport {
        rows: Vec::new(),
        warnings: Vec::new(),
    };
    for (rs, exact) in items {
        if !exact {
            report.rows.push(ReportRow::for_counts(&rs, None, omega));
            continue;
        }
        let (row, err) = count_row(counter, &rs, omega);
        match err {
            None => {}
            Some(e @ Error::CapacityExceeded { .. }) => {
                report.warnings.push(format!("N = {}: {e}", rs.n()));
            }
            Some(e) => return Err(e),
        }
        report.rows.push(row);
    }
    Ok(report)
}

pub fn table1_rows(counter: &mut Counter<'_>, omega: f64) -> Result<TableReport> {
    collect(counter, table1_row_sums().into_iter().map(|rs| (rs, true)), omega)
}

/// Exact counts only for `N <= max_n`; estimates for every row.
pub fn table2_rows(counter: &mut Counter<'_>, max_n: usize, omega: f64) -> Result<TableReport> {
    let items = TABLE2_ROWS.iter().map(|&(n, t)| {
        let rs = RowSums::with_dimension(n, vec![t; n]).expect("N >= 6");
        (rs, n <= max_n)
    });
    collect(counter, items, omega)
}
