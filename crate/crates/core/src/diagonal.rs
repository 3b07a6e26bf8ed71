//! Prescribed diagonals `h in [0,1]^N` of symmetric stochastic matrices.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Floating-point diagonal with `chi = sum h_j < N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSpec {
    h: Vec<f64>,
    chi: f64,
}

impl DiagonalSpec {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::InvalidDiagonal("empty diagonal".into()));
        }
        if let Some(bad) = h.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidDiagonal(format!("entry {bad} outside [0, 1]")));
        }
        let chi: f64 = h.iter().sum();
        if chi >= h.len() as f64 {
            return Err(Error::InvalidDiagonal(format!(
                "chi = {chi} must be below N = {}",
                h.len()
            )));
        }
        Ok(DiagonalSpec { h, chi })
    }

    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    /// Row sums `s_j = 1 - h_j` left for the off-diagonal entries.
    pub fn slack(&self) -> Vec<f64> {
        self.h.iter().map(|v| 1.0 - v).collect()
    }
}

pub type Rational = Ratio<i64>;

/// Diagonal with exact rational entries, needed for lattice dilation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalDiagonal {
    h: Vec<Rational>,
}

impl RationalDiagonal {
    pub fn new(h: Vec<Rational>) -> Result<Self> {
        let one = Rational::from_integer(1);
        if let Some(bad) = h.iter().find(|v| **v < Rational::zero() || **v > one) {
            return Err(Error::InvalidDiagonal(format!("entry {bad} outside [0, 1]")));
        }
        let out = RationalDiagonal { h };
        // same checks as the float view
        out.to_spec()?;
        Ok(out)
    }

    pub fn uniform(n: usize, value: Rational) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[Rational] {
        &self.h
    }

    pub fn to_spec(&self) -> Result<DiagonalSpec> {
        DiagonalSpec::new(
            self.h
                .iter()
                .map(|r| r.to_f64().unwrap_or(f64::NAN))
                .collect(),
        )
    }

    /// Smallest dilation `m > 0` with every `m (1 - h_j)` integral.
    pub fn base_dilation(&self) -> u64 {
        self.h.iter().fold(1i64, |acc, r| {
            let denom = *(Rational::from_integer(1) - r).denom();
            num_integer::lcm(acc, denom)
        }) as u64
    }

    /// Integer row sums `m (1 - h_j)`, or the first row that is not integral.
    pub fn row_sums_at(&self, m: u64) -> std::result::Result<Vec<u64>, usize> {
        let m = Rational::from_integer(m as i64);
        self.h
            .iter()
            .enumerate()
            .map(|(j, r)| {
                let t = m * (Rational::from_integer(1) - r);
                if t.is_integer() {
                    Ok(t.to_integer() as u64)
                } else {
                    Err(j)
                }
            })
            .collect()
    }
}

/// Parses `p/q`, an integer or a finite decimal such as `0.25` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidDiagonal(format!("cannot parse {s:?} as a rational"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse::<i64>().map_err(|_| bad())?.abs()
        };
        let scale = 10i64.pow(frac.len() as u32);
        let frac_part: i64 = frac.parse().map_err(|_| bad())?;
        let num = int_part
            .checked_mul(scale)
            .and_then(|v| v.checked_add(frac_part))
            .ok_or_else(bad)?;
        let r = Rational::new(num, scale);
        return Ok(if negative { -r } else { r });
    }
    s.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_diagonal_checks() {
        assert!(DiagonalSpec::new(vec![0.5, 1.2, 0.0]).is_err());
        assert!(DiagonalSpec::new(vec![1.0; 4]).is_err());
        let d = DiagonalSpec::new(vec![0.5, 0.25, 0.0, 1.0]).unwrap();
        assert_eq!(d.chi(), 1.75);
        assert_eq!(d.slack(), vec![0.5, 0.75, 1.0, 0.0]);
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("0.2").unwrap(), Rational::new(1, 5));
        assert_eq!(parse_rational(".75").unwrap(), Rational::new(3, 4));
        assert_eq!(parse_rational("1").unwrap(), Rational::from_integer(1));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::new(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("0.").is_err());
    }

    #[test]
    fn dilation_integrality() {
        let d = RationalDiagonal::new(vec![
            Rational::new(1, 2),
            Rational::new(1, 3),
            Rational::new(0, 1),
        ])
        .unwrap();
        assert_eq!(d.base_dilation(), 6);
        assert_eq!(d.row_sums_at(6), Ok(vec![3, 4, 6]));
        assert_eq!(d.row_sums_at(4), Err(1));
    }
}
