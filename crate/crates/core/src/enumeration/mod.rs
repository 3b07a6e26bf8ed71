//! Exact counting of symmetric zero-diagonal matrices over the naturals with
//! prescribed row sums.
//!
//! The count is the coefficient of `w^t` in `prod_{k<l} 1/(1 - w_k w_l)`,
//! extracted with a dense truncated-series table (see [`series`]).

mod brute;
pub mod series;

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
pub use brute::count_matrices_bruteforce;
use series::{cell_count, Coefficient, SeriesTable};

/// Default cap on the number of table cells allocated by the counter.
pub const DEFAULT_CELL_BUDGET: u64 = 200_000_000;

/// Row-sum vector of a symmetric N x N matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RowSums {
    t: Vec<u64>,
}

impl RowSums {
    pub fn new(t: Vec<u64>) -> Result<Self> {
        if t.len() < 2 {
            return Err(Error::InvalidRowSums(format!(
                "need at least 2 rows, got {}",
                t.len()
            )));
        }
        Ok(RowSums { t })
    }

    /// Like [`RowSums::new`] but also checks the declared dimension.
    pub fn with_dimension(n: usize, t: Vec<u64>) -> Result<Self> {
        if t.len() != n {
            return Err(Error::InvalidRowSums(format!(
                "dimension {n} but {} row sums",
                t.len()
            )));
        }
        Self::new(t)
    }

    pub fn n(&self) -> usize {
        self.t.len()
    }

    pub fn t(&self) -> &[u64] {
        &self.t
    }

    /// Total entry sum `x = sum_j t_j` (twice the upper-triangular sum).
    pub fn total(&self) -> u64 {
        self.t.iter().sum()
    }

    /// Row sums in ascending order; counts are invariant under permutation.
    pub fn sorted(&self) -> Vec<u64> {
        let mut t = self.t.clone();
        t.sort_unstable();
        t
    }
}

/// Exact matrix count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatrixCount(BigUint);

impl MatrixCount {
    pub fn new(value: BigUint) -> Self {
        MatrixCount(value)
    }

    pub fn zero() -> Self {
        MatrixCount(<BigUint as num_traits::Zero>::zero())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(&self.0)
    }

    /// Natural logarithm, `-inf` for zero. Accurate for values far beyond f64.
    pub fn ln(&self) -> f64 {
        if num_traits::Zero::is_zero(&self.0) {
            return f64::NEG_INFINITY;
        }
        let bits = self.0.bits();
        if bits <= 1000 {
            return self.0.to_f64().unwrap_or(f64::INFINITY).ln();
        }
        let shift = bits - 64;
        let top = (&self.0 >> shift).to_f64().unwrap_or(f64::INFINITY);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }

    /// Decimal representation of the exact value.
    pub fn to_decimal(&self) -> String {
        self.0.to_str_radix(10)
    }

    pub fn parse_decimal(s: &str) -> Option<Self> {
        BigUint::parse_bytes(s.trim().as_bytes(), 10).map(MatrixCount)
    }
}

impl fmt::Display for MatrixCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for MatrixCount {
    fn from(v: u64) -> Self {
        MatrixCount(BigUint::from(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    /// Maximum number of cells the working table may hold.
    pub cell_budget: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            cell_budget: DEFAULT_CELL_BUDGET,
        }
    }
}

/// Cells allocated by [`count_matrices`] for these row sums.
///
/// The largest row is eliminated in closed form, so the working table spans
/// the remaining `N - 1` rows.
pub fn working_cells(rs: &RowSums) -> u128 {
    let mut t = rs.sorted();
    t.pop();
    let bounds: Vec<usize> = t.iter().map(|&v| v as usize).collect();
    cell_count(&bounds).unwrap_or(u128::MAX)
}

/// Number of symmetric zero-diagonal natural matrices with row sums `rs`.
pub fn count_matrices(rs: &RowSums) -> Result<MatrixCount> {
    count_matrices_with(rs, &CountOptions::default())
}

pub fn count_matrices_with(rs: &RowSums, opts: &CountOptions) -> Result<MatrixCount> {
    let x = rs.total();
    if x % 2 == 1 {
        return Ok(MatrixCount::zero());
    }
    if rs.n() == 2 {
        return Ok(MatrixCount::from(u64::from(rs.t[0] == rs.t[1])));
    }
    let cells = working_cells(rs);
    if cells > opts.cell_budget as u128 {
        return Err(Error::CapacityExceeded {
            cells,
            budget: opts.cell_budget,
        });
    }

    // largest row first: it is eliminated without a table
    let mut t: Vec<usize> = rs.t.iter().map(|&v| v as usize).collect();
    t.sort_unstable_by(|a, b| b.cmp(a));
    if t[0] > t[1..].iter().sum::<usize>() {
        return Ok(MatrixCount::zero());
    }

    // Every partial coefficient counts matrices with entry sum at most x/2.
    let bound = total_matrices(rs.n(), x)?.into_inner();
    let value = if bound <= BigUint::from(u64::MAX) {
        eliminate::<u64>(&t)
    } else if bound <= BigUint::from(u128::MAX) {
        eliminate::<u128>(&t)
    } else {
        eliminate::<BigUint>(&t)
    };
    Ok(MatrixCount(value))
}

/// Row-by-row elimination: fix row 0 by its indicator, then for each next row
/// apply its remaining pair factors and slice at its row sum.
fn eliminate<C: Coefficient>(t: &[usize]) -> BigUint {
    let mut table = SeriesTable::<C>::degree_indicator(t[1..].to_vec(), t[0]);
    for &row_sum in &t[1..t.len() - 1] {
        for other in 1..table.dims() {
            table.apply_pair_factor(0, other);
        }
        table = table.fix_axis(0, row_sum);
    }
    let last = t[t.len() - 1];
    table
        .coefficient(&[last])
        .cloned()
        .map(Coefficient::into_biguint)
        .unwrap_or_default()
}

/// Counts through the full N-dimensional table, applying the pair factors in
/// the given order. Used to cross-check [`count_matrices`]; it allocates
/// `prod_j (t_j + 1)` big-integer cells.
pub fn count_matrices_full_table(
    rs: &RowSums,
    pairs: &[(usize, usize)],
    opts: &CountOptions,
) -> Result<MatrixCount> {
    let bounds: Vec<usize> = rs.t.iter().map(|&v| v as usize).collect();
    let cells = cell_count(&bounds).unwrap_or(u128::MAX);
    if cells > opts.cell_budget as u128 {
        return Err(Error::CapacityExceeded {
            cells,
            budget: opts.cell_budget,
        });
    }
    let mut table = SeriesTable::<BigUint>::new(bounds.clone());
    for &(k, l) in pairs {
        let (k, l) = if k < l { (k, l) } else { (l, k) };
        table.apply_pair_factor(k, l);
    }
    Ok(MatrixCount(
        table.coefficient(&bounds).cloned().unwrap_or_default(),
    ))
}

/// All pairs `(k, l)` with `k < l < n` in lexicographic order.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|k| (k + 1..n).map(move |l| (k, l)))
        .collect()
}

/// Number of symmetric zero-diagonal natural N x N matrices whose row sums
/// add up to `x` (stars and bars over the upper triangle).
pub fn total_matrices(n: usize, x: u64) -> Result<MatrixCount> {
    if n < 2 {
        return Err(Error::InvalidRowSums(format!("need n >= 2, got {n}")));
    }
    if x % 2 == 1 {
        return Err(Error::OddTotal(x));
    }
    let slots = BigUint::from(n * (n - 1) / 2 - 1);
    let top = &slots + BigUint::from(x / 2);
    Ok(MatrixCount(num_integer::binomial(top, slots)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(t: &[u64]) -> u64 {
        count_matrices(&RowSums::new(t.to_vec()).unwrap())
            .unwrap()
            .value()
            .to_u64()
            .unwrap()
    }

    #[test]
    fn small_forced_cases() {
        assert_eq!(count(&[2, 2, 2]), 1);
        assert_eq!(count(&[1, 1, 1]), 0);
        assert_eq!(count(&[1, 1, 0]), 1);
        assert_eq!(count(&[4, 3, 3]), 1);
        assert_eq!(count(&[0, 0, 0, 0]), 1);
    }

    #[test]
    fn two_by_two_needs_equal_rows() {
        assert_eq!(count(&[3, 3]), 1);
        assert_eq!(count(&[5, 4]), 0);
        assert_eq!(count(&[6, 4]), 0);
        assert_eq!(count(&[0, 0]), 1);
    }

    #[test]
    fn dominant_row_is_infeasible() {
        assert_eq!(count(&[10, 2, 2, 2]), 0);
    }

    #[test]
    fn too_few_rows_rejected() {
        assert!(RowSums::new(vec![3]).is_err());
        assert!(RowSums::with_dimension(3, vec![1, 1]).is_err());
    }

    #[test]
    fn budget_refusal() {
        let rs = RowSums::new(vec![10; 9]).unwrap();
        let err = count_matrices_with(&rs, &CountOptions { cell_budget: 1000 }).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { budget: 1000, .. }));
    }

    #[test]
    fn wide_coefficient_paths_agree() {
        let t = [3usize, 3, 2, 2, 2];
        let a = eliminate::<u64>(&t);
        let b = eliminate::<u128>(&t);
        let c = eliminate::<BigUint>(&t);
        assert_eq!(a, b);
        assert_eq!(b, c);
    }

    #[test]
    fn full_table_route_matches() {
        let rs = RowSums::new(vec![4, 3, 3, 2]).unwrap();
        let pairs = all_pairs(4);
        let full = count_matrices_full_table(&rs, &pairs, &CountOptions::default()).unwrap();
        assert_eq!(full, count_matrices(&rs).unwrap());
    }

    #[test]
    fn total_matrices_values() {
        assert_eq!(total_matrices(3, 4).unwrap(), MatrixCount::from(6));
        assert_eq!(total_matrices(2, 2).unwrap(), MatrixCount::from(1));
        assert_eq!(total_matrices(3, 0).unwrap(), MatrixCount::from(1));
        assert!(matches!(total_matrices(3, 5), Err(Error::OddTotal(5))));
    }

    #[test]
    fn ln_of_huge_count() {
        let big = MatrixCount::new(BigUint::from(10u32).pow(400));
        assert!((big.ln() - 400.0 * std::f64::consts::LN_10).abs() < 1e-9);
        assert_eq!(MatrixCount::zero().ln(), f64::NEG_INFINITY);
    }

    #[test]
    fn decimal_round_trip() {
        let c = MatrixCount::parse_decimal("54202359").unwrap();
        assert_eq!(c.to_decimal(), "54202359");
        assert!(MatrixCount::parse_decimal("12x").is_none());
    }
}
