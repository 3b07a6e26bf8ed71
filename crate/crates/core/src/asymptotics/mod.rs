//! Log-space evaluation of the asymptotic counting and volume formulas.
//!
//! Everything is computed as a natural logarithm and returned as a
//! [`LogReal`]; `(1 + lambda)^{C(N,2)}` alone leaves the f64 range near
//! N = 40.

mod polylog;

use std::f64::consts::{LN_2, PI};

pub use polylog::{
    eulerian_row, helper_constants, polylog_coefficient, polylog_coefficient_closed,
    polylog_coefficient_eulerian, polylog_neg_order, CoefficientSet,
};

use crate::diagonal::DiagonalSpec;
use crate::enumeration::RowSums;
use crate::error::{Error, Result};
use crate::logreal::LogReal;

/// Default `omega` for the validity diagnostics.
pub const DEFAULT_OMEGA: f64 = 0.2;

/// Mean entry, centered deviations and their power sums for one row-sum
/// vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary {
    pub n: usize,
    pub x: u64,
    /// `x / (N (N - 1))`
    pub lambda: f64,
    /// `2 / (N - 2) * (t_j - lambda (N - 1))`
    pub eps: Vec<f64>,
    pub y2: f64,
    pub y3: f64,
    pub y4: f64,
}

/// `y_k = sum_j (t_j - lambda (N - 1))^k` from exact integer numerators:
/// `t_j - lambda (N - 1) = (N t_j - x) / N`.
fn power_sums(t: &[u64]) -> (Vec<i128>, [f64; 3]) {
    let n = t.len() as i128;
    let x: i128 = t.iter().map(|&v| v as i128).sum();
    let dev: Vec<i128> = t.iter().map(|&v| n * v as i128 - x).collect();
    let mut out = [0.0; 3];
    for (slot, k) in out.iter_mut().zip(2u32..=4) {
        let num: i128 = dev.iter().map(|d| d.pow(k)).sum();
        *slot = num as f64 / (n as f64).powi(k as i32);
    }
    (dev, out)
}

pub fn moments(rs: &RowSums) -> Result<MomentSummary> {
    let n = rs.n();
    if n < 3 {
        return Err(Error::Domain(format!("moments need N >= 3, got {n}")));
    }
    let x = rs.total();
    let nf = n as f64;
    let (dev, [y2, y3, y4]) = power_sums(rs.t());
    Ok(MomentSummary {
        n,
        x,
        lambda: x as f64 / (nf * (nf - 1.0)),
        eps: dev
            .iter()
            .map(|&d| 2.0 / (nf - 2.0) * (d as f64 / nf))
            .collect(),
        y2,
        y3,
        y4,
    })
}

/// The asymptotic count split into its prefactor and the five correction
/// exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct CountEstimate {
    pub ln_prefactor: f64,
    /// Exponents of the y2/N, y2/N^2, y3, y4 and y2^2 corrections.
    pub corrections: [f64; 5],
}

impl CountEstimate {
    pub fn value(&self) -> LogReal {
        LogReal::from_ln(self.ln_prefactor + self.corrections.iter().sum::<f64>())
    }
}

fn ln_binom2(n: usize) -> f64 {
    (n * (n - 1) / 2) as f64
}

/// Prefactor of the count estimate; depends only on N and x.
fn count_prefactor(n: usize, x: u64) -> f64 {
    let nf = n as f64;
    let l = x as f64 / (nf * (nf - 1.0));
    0.5 * LN_2 + ln_binom2(n) * l.ln_1p() - nf / 2.0 * (2.0 * PI * l * (l + 1.0) * nf).ln()
        + x as f64 / 2.0 * (1.0 / l).ln_1p()
        + (14.0 * l * l + 14.0 * l - 1.0) / (12.0 * l * (l + 1.0))
}

pub fn estimate_count_terms(rs: &RowSums) -> Result<CountEstimate> {
    let m = moments(rs)?;
    if m.x == 0 {
        return Err(Error::Domain("lambda = 0: all row sums vanish".into()));
    }
    let l = m.lambda;
    let nf = m.n as f64;
    let ll1 = l * (l + 1.0);
    Ok(CountEstimate {
        ln_prefactor: count_prefactor(m.n, m.x),
        corrections: [
            -m.y2 / (2.0 * ll1 * nf),
            -m.y2 / (ll1 * nf * nf),
            (2.0 * l + 1.0) * m.y3 / (6.0 * ll1 * ll1 * nf * nf),
            -(3.0 * l * l + 3.0 * l + 1.0) * m.y4 / (12.0 * ll1.powi(3) * nf.powi(3)),
            m.y2 * m.y2 / (4.0 * ll1 * ll1 * nf.powi(4)),
        ],
    })
}

/// Asymptotic number of matrices with row sums `rs`, without the error
/// factor.
pub fn estimate_count(rs: &RowSums) -> Result<LogReal> {
    Ok(estimate_count_terms(rs)?.value())
}

/// The asymptotic volume split into prefactor and five correction exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeEstimate {
    pub ln_prefactor: f64,
    pub corrections: [f64; 5],
}

impl VolumeEstimate {
    pub fn value(&self) -> LogReal {
        LogReal::from_ln(self.ln_prefactor + self.corrections.iter().sum::<f64>())
    }
}

pub fn estimate_volume_terms(ds: &DiagonalSpec) -> Result<VolumeEstimate> {
    let n = ds.n();
    if n < 4 {
        return Err(Error::Domain(format!("volume formula needs N >= 4, got {n}")));
    }
    let nf = n as f64;
    let chi = ds.chi();
    let free = nf - chi;
    if free <= 0.0 {
        return Err(Error::Domain(format!("chi = {chi} must be below N = {n}")));
    }
    let ln_prefactor = 0.5 * LN_2
        + 7.0 / 6.0
        + ln_binom2(n) * (1.0 + (free / (nf * (nf - 1.0))).ln())
        + nf / 2.0 * (nf * (nf - 1.0).powi(2) / (2.0 * PI * free * free)).ln();

    let mean = chi / nf;
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for &h in ds.h() {
        let d = h - mean;
        let d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    let r = (nf - 1.0) / free;
    Ok(VolumeEstimate {
        ln_prefactor,
        corrections: [
            -nf * r * r / 2.0 * s2,
            -r * r * s2,
            -nf * r.powi(3) / 3.0 * s3,
            -nf * r.powi(4) / 4.0 * s4,
            r.powi(4) / 4.0 * s2 * s2,
        ],
    })
}

/// Asymptotic volume of the symmetric stochastic matrices with diagonal `ds`.
pub fn estimate_volume(ds: &DiagonalSpec) -> Result<LogReal> {
    Ok(estimate_volume_terms(ds)?.value())
}

/// Threshold below which the asymptotic count is not claimed to be accurate.
///
/// `lambdas` are the per-row saddle-point parameters; their mean plays the
/// role of `lambda`.
pub fn lower_bound(rs: &RowSums, alpha: f64, lambdas: &[f64]) -> Result<LogReal> {
    let n = rs.n();
    if lambdas.len() != n {
        return Err(Error::DimensionMismatch(lambdas.len(), n));
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1/2), got {alpha}")));
    }
    if let Some(bad) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(Error::Domain(format!("lambda_j must be positive, got {bad}")));
    }
    let nf = n as f64;
    let l = lambdas.iter().sum::<f64>() / nf;
    let mut ln = -nf / 2.0 * (2.0 * PI * l * (l + 1.0) * nf).ln();
    ln += rs
        .t()
        .iter()
        .zip(lambdas)
        .map(|(&t, &lj)| t as f64 / 2.0 * (1.0 / lj).ln_1p())
        .sum::<f64>();
    for k in 0..n {
        for j in k + 1..n {
            let root = ((1.0 + lambdas[k]) * (1.0 + lambdas[j])).sqrt();
            let cross = (lambdas[k] * lambdas[j]).sqrt();
            ln += root.ln() - (root - cross).ln();
        }
    }
    ln += (14.0 * l * l + 14.0 * l - 1.0) / (12.0 * l * (l + 1.0));
    ln -= nf.powf(1.0 - 2.0 * alpha);
    Ok(LogReal::from_ln(ln))
}

/// Per-row check of the convergence hypothesis at a given `omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub omega: f64,
    /// `|t_j - lambda (N - 1)| / (lambda N^{1/2 + omega})`
    pub per_row_ratio: Vec<f64>,
    pub max_ratio: f64,
    /// Admissible `omega` range `(log log N / (2 log N), 1/4)`.
    pub omega_window: (f64, f64),
    /// `lambda * log N`, to compare against the unspecified constant in the
    /// `lambda > C / log N` hypothesis.
    pub lambda_log_n: f64,
    /// `omega` inside the window and every row ratio at most 1.
    pub in_window: bool,
}

impl ValidityReport {
    pub fn omega_in_window(&self) -> bool {
        self.omega > self.omega_window.0 && self.omega < self.omega_window.1
    }

    pub fn rows_within(&self) -> bool {
        self.max_ratio <= 1.0
    }
}

/// Diagnostic only; estimators never refuse on its account.
pub fn validity_check(rs: &RowSums, omega: f64) -> ValidityReport {
    let n = rs.n();
    let nf = n as f64;
    let x = rs.total() as f64;
    let lambda = x / (nf * (nf - 1.0));
    let scale = lambda * nf.powf(0.5 + omega);
    let per_row_ratio: Vec<f64> = rs
        .t()
        .iter()
        .map(|&t| {
            // exact numerator (N t - x) / N
            let dev = ((nf * t as f64) - x).abs() / nf;
            if dev == 0.0 {
                0.0
            } else {
                dev / scale
            }
        })
        .collect();
    let max_ratio = per_row_ratio.iter().cloned().fold(0.0, f64::max);
    let ln_n = nf.ln();
    let omega_window = (ln_n.ln() / (2.0 * ln_n), 0.25);
    let mut report = ValidityReport {
        omega,
        per_row_ratio,
        max_ratio,
        omega_window,
        lambda_log_n: lambda * ln_n,
        in_window: false,
    };
    report.in_window = report.omega_in_window() && report.rows_within();
    report
}

/// Fraction of all matrices with entry mean `lambda` that the asymptotic
/// count covers, `exp(-1 / (4 lambda (lambda + 1)))`.
pub fn coverage_fraction(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    Ok((-1.0 / (4.0 * lambda * (lambda + 1.0))).exp())
}

/// Scale `2^{-k} lambda^k N^{1 + k/2}` against which `y_k` is compared.
pub fn reference_values(n: usize, lambda: f64, k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("reference values need k >= 2, got {k}")));
    }
    let nf = n as f64;
    Ok((lambda / 2.0).powi(k as i32) * nf.powf(1.0 + k as f64 / 2.0))
}
