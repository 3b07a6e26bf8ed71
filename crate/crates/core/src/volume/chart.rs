//! Coordinates on the slice of symmetric stochastic matrices with fixed
//! diagonal.
//!
//! With zero-based rows, the entries `b_{0j}` and `b_{12}` are solved from
//! the N row-sum constraints; the remaining `N (N - 3) / 2` entries are free.

use crate::diagonal::DiagonalSpec;
use crate::error::{Error, Result};

const FEASIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeCoordinateChart {
    n: usize,
    free_pairs: Vec<(usize, usize)>,
    determined_pairs: Vec<(usize, usize)>,
}

impl FreeCoordinateChart {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("chart needs N >= 3, got {n}")));
        }
        let free_pairs = (1..n)
            .flat_map(|k| (k + 1..n).map(move |l| (k, l)))
            .filter(|&p| p != (1, 2))
            .collect();
        let mut determined_pairs: Vec<(usize, usize)> = (1..n).map(|j| (0, j)).collect();
        determined_pairs.push((1, 2));
        Ok(FreeCoordinateChart {
            n,
            free_pairs,
            determined_pairs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.free_pairs.len()
    }

    pub fn free_pairs(&self) -> &[(usize, usize)] {
        &self.free_pairs
    }

    pub fn determined_pairs(&self) -> &[(usize, usize)] {
        &self.determined_pairs
    }

    /// Completes free values to a full matrix with diagonal `ds`, or `None`
    /// when a determined entry would be negative.
    pub fn solve_determined(&self, free_values: &[f64], ds: &DiagonalSpec) -> Option<SymmetricMatrix> {
        assert_eq!(free_values.len(), self.dimension());
        assert_eq!(ds.n(), self.n);
        let n = self.n;
        let s = ds.slack();
        let mut m = SymmetricMatrix::zeros(n);
        for (j, &h) in ds.h().iter().enumerate() {
            m.set(j, j, h);
        }
        for (&(k, l), &v) in self.free_pairs.iter().zip(free_values) {
            if v < 0.0 {
                return None;
            }
            m.set(k, l, v);
        }
        let free_sum: f64 = free_values.iter().sum();
        let b12 = (s[1..].iter().sum::<f64>() - s[0]) / 2.0 - free_sum;
        if b12 < -FEASIBILITY_TOL {
            return None;
        }
        m.set(1, 2, b12.max(0.0));
        for j in 1..n {
            let others: f64 = (1..n).filter(|&l| l != j).map(|l| m.get(j, l)).sum();
            let b0j = s[j] - others;
            if b0j < -FEASIBILITY_TOL {
                return None;
            }
            m.set(0, j, b0j.max(0.0));
        }
        Some(m)
    }
}

/// Dense symmetric matrix; `set(i, j)` writes both triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.data[i * self.n..(i + 1) * self.n].iter().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn partition_of_pairs() {
        for n in 3..10 {
            let chart = FreeCoordinateChart::new(n).unwrap();
            assert_eq!(chart.dimension(), n * (n - 3) / 2);
            assert_eq!(chart.determined_pairs().len(), n);
            let mut all: Vec<_> = chart
                .free_pairs()
                .iter()
                .chain(chart.determined_pairs())
                .cloned()
                .collect();
            all.sort();
            all.dedup();
            assert_eq!(all.len(), n * (n - 1) / 2);
        }
        assert_eq!(FreeCoordinateChart::new(4).unwrap().free_pairs(), &[(1, 3), (2, 3)]);
    }

    #[test]
    fn center_point() {
        let chart = FreeCoordinateChart::new(4).unwrap();
        let ds = DiagonalSpec::uniform(4, 0.0).unwrap();
        let m = chart.solve_determined(&[1.0 / 3.0, 1.0 / 3.0], &ds).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 0.0 } else { 1.0 / 3.0 };
                assert!((m.get(i, j) - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_free_values() {
        let chart = FreeCoordinateChart::new(4).unwrap();
        let ds = DiagonalSpec::uniform(4, 0.0).unwrap();
        let m = chart.solve_determined(&[0.0, 0.0], &ds).unwrap();
        assert_eq!(m.get(1, 2), 1.0);
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(0, 2), 0.0);
        assert_eq!(m.get(0, 3), 1.0);
        for i in 0..4 {
            assert_eq!(m.row_sum(i), 1.0);
        }
    }

    #[test]
    fn infeasible_free_values() {
        let chart = FreeCoordinateChart::new(4).unwrap();
        let ds = DiagonalSpec::uniform(4, 0.0).unwrap();
        assert!(chart.solve_determined(&[0.9, 0.9], &ds).is_none());
        assert!(chart.solve_determined(&[-0.1, 0.0], &ds).is_none());
    }

    proptest! {
        #[test]
        fn feasible_solutions_conserve_row_sums(
            n in 4usize..8,
            h in proptest::collection::vec(0.0f64..0.6, 8),
            raw in proptest::collection::vec(0.0f64..0.2, 28),
        ) {
            let ds = DiagonalSpec::new(h[..n].to_vec()).unwrap();
            let chart = FreeCoordinateChart::new(n).unwrap();
            let free = &raw[..chart.dimension()];
            if let Some(m) = chart.solve_determined(free, &ds) {
                prop_assert!(m.is_symmetric());
                for i in 0..n {
                    prop_assert!((m.row_sum(i) - 1.0).abs() < 1e-12);
                    for j in 0..n {
                        prop_assert!(m.get(i, j) >= 0.0);
                    }
                }
            }
        }
    }
}
