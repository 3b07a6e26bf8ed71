use num_bigint::BigUint;

use super::{MatrixCount, RowSums};
use crate::error::{Error, Result};

const MAX_ROWS: usize = 6;
const MAX_TOTAL: u64 = 40;

/// Enumerates upper-triangular entries directly. Independent of the series
/// machinery; limited to `N <= 6` and `sum t <= 40`.
pub fn count_matrices_bruteforce(rs: &RowSums) -> Result<MatrixCount> {
    if rs.n() > MAX_ROWS || rs.total() > MAX_TOTAL {
        return Err(Error::Guardrail(format!(
            "N = {}, sum t = {} (limits N <= {MAX_ROWS}, sum t <= {MAX_TOTAL})",
            rs.n(),
            rs.total()
        )));
    }
    let mut residual: Vec<u64> = rs.t().to_vec();
    let n = residual.len();
    let count = fill_row(0, 1, n, &mut residual);
    Ok(MatrixCount::new(BigUint::from(count)))
}

/// Chooses b[row][col], b[row][col+1], ... ; row `row` must be exhausted
/// before moving on.
fn fill_row(row: usize, col: usize, n: usize, residual: &mut [u64]) -> u64 {
    if row + 1 == n {
        return u64::from(residual[row] == 0);
    }
    if col == n {
        if residual[row] != 0 {
            return 0;
        }
        return fill_row(row + 1, row + 2, n, residual);
    }
    if col == n - 1 {
        // last entry of the row is forced
        let b = residual[row];
        if b > residual[col] {
            return 0;
        }
        residual[row] -= b;
        residual[col] -= b;
        let c = fill_row(row + 1, row + 2, n, residual);
        residual[row] += b;
        residual[col] += b;
        return c;
    }
    let mut total = 0;
    for b in 0..=residual[row].min(residual[col]) {
        residual[row] -= b;
        residual[col] -= b;
        total += fill_row(row, col + 1, n, residual);
        residual[row] += b;
        residual[col] += b;
    }
    total
}
