//! Expansion coefficients of `1 / (1 - mu (e^{iy} - 1))` and the helper
//! constants built from them.
//!
//! `-log(1 - mu (e^u - 1)) = -log(1 + mu) + Li_1(w e^u)` with
//! `w = mu / (1 + mu)`, so the n-th Taylor coefficient in `u` is
//! `A_n(mu) = Li_{1-n}(w) / n!`. For `n >= 2` the inversion formula turns this
//! into `(-1)^n / n! * Li_{1-n}(1 + 1/mu)`.

use crate::error::{Error, Result};

/// Eulerian numbers `A(n, k)` for `k = 0..n` (row `n`), as floats.
pub fn eulerian_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for m in 1..=n {
        let mut next = vec![0.0; m.max(1)];
        for (k, slot) in next.iter_mut().enumerate() {
            let stay = if k < row.len() { (k + 1) as f64 * row[k] } else { 0.0 };
            let step = if k >= 1 && k - 1 < row.len() {
                (m - k) as f64 * row[k - 1]
            } else {
                0.0
            };
            *slot = stay + step;
        }
        row = next;
    }
    row
}

/// Polylogarithm of nonpositive integer order, `Li_{-k}(z)` for `z != 1`.
///
/// Uses `Li_{-k}(z) = sum_{i<k} A(k, i) z^{i+1} / (1 - z)^{k+1}` (k >= 1) and
/// `Li_0(z) = z / (1 - z)`.
pub fn polylog_neg_order(k: usize, z: f64) -> f64 {
    if k == 0 {
        return z / (1.0 - z);
    }
    let row = eulerian_row(k);
    // Horner in z over the Eulerian row
    let poly = row.iter().rev().fold(0.0, |acc, &a| acc * z + a);
    z * poly / (1.0 - z).powi(k as i32 + 1)
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("mu must be positive, got {mu}")))
    }
}

/// Closed forms of `A_1 .. A_4`.
pub fn polylog_coefficient_closed(n: usize, mu: f64) -> Option<f64> {
    let m1 = mu + 1.0;
    match n {
        1 => Some(mu),
        2 => Some(mu / 2.0 * m1),
        3 => Some(mu / 6.0 * m1 * (2.0 * mu + 1.0)),
        4 => Some(mu / 24.0 * m1 * (6.0 * mu * mu + 6.0 * mu + 1.0)),
        _ => None,
    }
}

/// `A_n(mu)` through the Eulerian-number form of the polylogarithm.
///
/// Evaluated at `w = mu / (1 + mu)` where all terms are positive:
/// `A_n = (1 + mu)^n sum_i A(n-1, i) w^{i+1} / n!`.
pub fn polylog_coefficient_eulerian(n: usize, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    if n == 0 {
        return Err(Error::Domain("coefficient index starts at 1".into()));
    }
    let w = mu / (1.0 + mu);
    let value = if n == 1 {
        mu
    } else {
        let row = eulerian_row(n - 1);
        let poly = row.iter().rev().fold(0.0, |acc, &a| acc * w + a);
        (1.0 + mu).powi(n as i32) * w * poly
    };
    let factorial: f64 = (1..=n).map(|i| i as f64).product();
    Ok(value / factorial)
}

/// Expansion coefficient `A_n(mu)`.
pub fn polylog_coefficient(n: usize, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    if n == 0 {
        return Err(Error::Domain("coefficient index starts at 1".into()));
    }
    match polylog_coefficient_closed(n, mu) {
        Some(v) => Ok(v),
        None => polylog_coefficient_eulerian(n, mu),
    }
}

/// `A_1..A_4` at `mu = lambda` and the combinations `B_1, C_1, B_2, C_2, D_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub lambda: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub b1: f64,
    pub c1: f64,
    pub b2: f64,
    pub c2: f64,
    pub d2: f64,
}

pub fn helper_constants(lambda: f64) -> Result<CoefficientSet> {
    check_mu(lambda)?;
    let l = lambda;
    let ll1 = l * (l + 1.0);
    let a = |n| polylog_coefficient_closed(n, l).expect("n <= 4");
    Ok(CoefficientSet {
        lambda,
        a1: a(1),
        a2: a(2),
        a3: a(3),
        a4: a(4),
        b1: (2.0 * l + 1.0) / (8.0 * ll1),
        c1: (2.0 * l * l + 2.0 * l + 1.0) / (16.0 * ll1 * ll1),
        b2: (2.0 * l + 1.0) / 4.0,
        c2: (2.0 * l * l + 2.0 * l + 1.0) / (16.0 * ll1),
        d2: (6.0 * l * l + 6.0 * l + 1.0) / (8.0 * ll1),
    })
}
