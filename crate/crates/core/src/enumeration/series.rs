//! Dense truncated power series in N variables.
//!
//! A [`SeriesTable`] stores the coefficients of a power series in
//! `w_0, ..., w_{N-1}` truncated at `w_j^{bounds[j]}` as a row-major array.
//! Multiplying by the geometric series `1 / (1 - w_k w_l)` is a running sum
//! along the direction `e_k + e_l`, so each pair factor costs one pass over
//! the table.

use std::ops::AddAssign;

use num_bigint::BigUint;

/// Coefficient ring used by the series tables.
///
/// Only addition is needed. Fixed-width implementations are selected by the
/// caller from an a-priori bound on every coefficient, so they never overflow.
pub trait Coefficient: Clone + Send + Sync + for<'a> AddAssign<&'a Self> {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn into_biguint(self) -> BigUint;
}

macro_rules! fixed_width_coefficient {
    ($t:ty) => {
        impl Coefficient for $t {
            #[inline]
            fn zero() -> Self {
                0
            }
            #[inline]
            fn one() -> Self {
                1
            }
            #[inline]
            fn is_zero(&self) -> bool {
                *self == 0
            }
            fn into_biguint(self) -> BigUint {
                BigUint::from(self)
            }
        }
    };
}

fixed_width_coefficient!(u64);
fixed_width_coefficient!(u128);

impl Coefficient for BigUint {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn into_biguint(self) -> BigUint {
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTable<C = BigUint> {
    bounds: Vec<usize>,
    strides: Vec<usize>,
    coeffs: Vec<C>,
}

fn strides_for(bounds: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; bounds.len()];
    for axis in (0..bounds.len().saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * (bounds[axis + 1] + 1);
    }
    strides
}

/// Number of cells of a table with the given degree caps, or `None` if it
/// does not fit in `u128`.
pub fn cell_count(bounds: &[usize]) -> Option<u128> {
    bounds
        .iter()
        .try_fold(1u128, |acc, &b| acc.checked_mul(b as u128 + 1))
}

impl<C: Coefficient> SeriesTable<C> {
    /// The empty product: coefficient 1 at the origin, 0 elsewhere.
    pub fn new(bounds: Vec<usize>) -> Self {
        let cells = cell_count(&bounds).expect("table size overflows u128") as usize;
        let mut coeffs = vec![C::zero(); cells];
        coeffs[0] = C::one();
        SeriesTable {
            strides: strides_for(&bounds),
            bounds,
            coeffs,
        }
    }

    /// Table with coefficient 1 exactly at the multi-degrees whose entries sum
    /// to `total`.
    ///
    /// This is the coefficient of `w_0^total` in `prod_j 1/(1 - w_0 w_j)`, i.e.
    /// the state after all pair factors of one row have been applied and that
    /// row's degree has been fixed.
    pub fn degree_indicator(bounds: Vec<usize>, total: usize) -> Self {
        let cells = cell_count(&bounds).expect("table size overflows u128") as usize;
        let mut coeffs = vec![C::zero(); cells];
        let mut idx = vec![0usize; bounds.len()];
        let mut sum = 0usize;
        for cell in coeffs.iter_mut() {
            if sum == total {
                *cell = C::one();
            }
            // odometer increment, last axis fastest
            for axis in (0..bounds.len()).rev() {
                if idx[axis] < bounds[axis] {
                    idx[axis] += 1;
                    sum += 1;
                    break;
                }
                sum -= idx[axis];
                idx[axis] = 0;
            }
        }
        SeriesTable {
            strides: strides_for(&bounds),
            bounds,
            coeffs,
        }
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    pub fn dims(&self) -> usize {
        self.bounds.len()
    }

    pub fn cells(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[C] {
        &self.coeffs
    }

    fn offset(&self, degree: &[usize]) -> Option<usize> {
        if degree.len() != self.bounds.len() {
            return None;
        }
        let mut off = 0;
        for ((&d, &b), &s) in degree.iter().zip(&self.bounds).zip(&self.strides) {
            if d > b {
                return None;
            }
            off += d * s;
        }
        Some(off)
    }

    /// Coefficient at multi-degree `degree`, `None` when out of range.
    pub fn coefficient(&self, degree: &[usize]) -> Option<&C> {
        self.offset(degree).map(|off| &self.coeffs[off])
    }

    /// Multiplies the series by `1 / (1 - w_k w_l)` truncated to the bounds.
    ///
    /// Axes are zero-based and must satisfy `k < l < dims()`.
    pub fn apply_pair_factor(&mut self, k: usize, l: usize) {
        let dims = self.dims();
        assert!(k < l && l < dims, "pair ({k}, {l}) invalid for {dims} axes");
        if self.bounds[k] == 0 || self.bounds[l] == 0 {
            return;
        }
        let last = dims - 1;
        let line = self.bounds[last] + 1;
        let shift = self.strides[k] + self.strides[l];
        // l == last means the shift also moves one step inside the line.
        let start = if l == last { 1 } else { 0 };

        let mut prefix = vec![0usize; last];
        let mut base = 0usize;
        loop {
            let active = prefix[k] >= 1 && (l == last || prefix[l] >= 1);
            if active {
                // every source cell lies in an earlier line, already final
                let (done, current) = self.coeffs.split_at_mut(base);
                for j in start..line {
                    current[j] += &done[base + j - shift];
                }
            }
            // advance the prefix odometer
            let mut axis = last;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                if prefix[axis] < self.bounds[axis] {
                    prefix[axis] += 1;
                    base += self.strides[axis];
                    break;
                }
                base -= prefix[axis] * self.strides[axis];
                prefix[axis] = 0;
            }
        }
    }

    /// Restricts the table to `degree[axis] == value`, dropping that axis.
    pub fn fix_axis(&self, axis: usize, value: usize) -> Self {
        assert!(axis < self.dims() && value <= self.bounds[axis]);
        let mut bounds = self.bounds.clone();
        bounds.remove(axis);
        let outer = if axis == 0 {
            1
        } else {
            self.coeffs.len() / self.strides[axis - 1]
        };
        let outer_stride = if axis == 0 {
            self.coeffs.len()
        } else {
            self.strides[axis - 1]
        };
        let inner = self.strides[axis];
        let mut coeffs = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let start = o * outer_stride + value * inner;
            coeffs.extend_from_slice(&self.coeffs[start..start + inner]);
        }
        if bounds.is_empty() {
            debug_assert_eq!(coeffs.len(), 1);
        }
        SeriesTable {
            strides: strides_for(&bounds),
            bounds,
            coeffs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_product_has_unit_origin() {
        let table = SeriesTable::<u64>::new(vec![2, 3]);
        assert_eq!(table.cells(), 12);
        assert_eq!(table.coefficient(&[0, 0]), Some(&1));
        assert_eq!(table.coefficients().iter().sum::<u64>(), 1);
    }

    #[test]
    fn single_pair_is_geometric_series() {
        let mut table = SeriesTable::<u64>::new(vec![2, 2, 0]);
        table.apply_pair_factor(0, 1);
        for a in 0..=2 {
            for b in 0..=2 {
                let expected = u64::from(a == b);
                assert_eq!(table.coefficient(&[a, b, 0]), Some(&expected), "d=({a},{b},0)");
            }
        }
    }

    #[test]
    fn non_adjacent_pair_uses_both_strides() {
        let mut table = SeriesTable::<u64>::new(vec![3, 1, 2]);
        table.apply_pair_factor(0, 2);
        for a in 0..=3 {
            for b in 0..=1 {
                for c in 0..=2 {
                    let expected = u64::from(b == 0 && a == c);
                    assert_eq!(table.coefficient(&[a, b, c]), Some(&expected));
                }
            }
        }
    }

    #[test]
    fn degree_indicator_marks_the_right_simplex() {
        let table = SeriesTable::<u64>::degree_indicator(vec![2, 3, 1], 3);
        let mut ones = 0;
        for a in 0..=2 {
            for b in 0..=3 {
                for c in 0..=1 {
                    let v = *table.coefficient(&[a, b, c]).unwrap();
                    assert_eq!(v, u64::from(a + b + c == 3));
                    ones += v;
                }
            }
        }
        assert_eq!(ones, 6);
    }

    #[test]
    fn indicator_matches_explicit_row_elimination() {
        let bounds = vec![3usize, 2, 2, 4];
        let mut full = SeriesTable::<u64>::new(bounds.clone());
        for l in 1..bounds.len() {
            full.apply_pair_factor(0, l);
        }
        let sliced = full.fix_axis(0, 3);
        let direct = SeriesTable::<u64>::degree_indicator(bounds[1..].to_vec(), 3);
        assert_eq!(sliced, direct);
    }

    #[test]
    fn fix_axis_drops_a_middle_axis() {
        let mut table = SeriesTable::<u64>::new(vec![1, 2, 1]);
        table.apply_pair_factor(0, 1);
        table.apply_pair_factor(1, 2);
        let slice = table.fix_axis(1, 2);
        assert_eq!(slice.bounds(), &[1, 1]);
        // degree 2 in the middle axis needs one unit from each neighbour
        assert_eq!(slice.coefficient(&[1, 1]), Some(&1));
        assert_eq!(slice.coefficient(&[0, 0]), Some(&0));
    }

    #[test]
    fn out_of_range_lookup_is_none() {
        let table = SeriesTable::<u64>::new(vec![1, 1]);
        assert!(table.coefficient(&[2, 0]).is_none());
        assert!(table.coefficient(&[0]).is_none());
    }
}
