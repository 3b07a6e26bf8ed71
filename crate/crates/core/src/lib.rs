//! Counting symmetric zero-diagonal matrices over the naturals with given row
//! sums, and the volumes of diagonal slices of the symmetric stochastic
//! polytope.
//!
//! - [`enumeration`]: exact counts by truncated power-series coefficient
//!   extraction, with a brute-force cross-check.
//! - [`asymptotics`]: log-space asymptotic count and volume formulas.
//! - [`volume`]: lattice-dilation and Monte Carlo volume estimates.
//! - [`report`]: table and figure reproduction, count cache, output formats.

pub mod asymptotics;
pub mod diagonal;
pub mod enumeration;
pub mod error;
pub mod logreal;
pub mod report;
pub mod volume;

pub use diagonal::{DiagonalSpec, RationalDiagonal};
pub use enumeration::{count_matrices, MatrixCount, RowSums};
pub use error::{Error, Result};
pub use logreal::LogReal;
