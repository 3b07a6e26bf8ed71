//! Reals carried as sign and natural log of magnitude.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// A real number `sign * exp(ln_abs)`.
///
/// Zero is `Sign::Zero` with `ln_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogReal {
    sign: Sign,
    ln_abs: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        sign: Sign::Zero,
        ln_abs: f64::NEG_INFINITY,
    };

    pub const ONE: LogReal = LogReal {
        sign: Sign::Positive,
        ln_abs: 0.0,
    };

    /// Positive value `exp(ln)`.
    pub fn from_ln(ln: f64) -> Self {
        if ln == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogReal {
            sign: Sign::Positive,
            ln_abs: ln,
        }
    }

    pub fn from_f64(v: f64) -> Self {
        match v.partial_cmp(&0.0) {
            Some(Ordering::Greater) => LogReal {
                sign: Sign::Positive,
                ln_abs: v.ln(),
            },
            Some(Ordering::Less) => LogReal {
                sign: Sign::Negative,
                ln_abs: (-v).ln(),
            },
            _ => Self::ZERO,
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn ln_abs(&self) -> f64 {
        self.ln_abs
    }

    pub fn log10_abs(&self) -> f64 {
        self.ln_abs / std::f64::consts::LN_10
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    /// Plain value; `None` when the magnitude over- or underflows `f64`.
    pub fn to_f64(&self) -> Option<f64> {
        let signum = match self.sign {
            Sign::Zero => return Some(0.0),
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        };
        let m = self.ln_abs.exp();
        if m.is_finite() && (m > 0.0) {
            Some(signum * m)
        } else {
            None
        }
    }

    /// Plain value, saturating to `+-inf` or `0`.
    pub fn to_f64_lossy(&self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            Sign::Positive => self.ln_abs.exp(),
            Sign::Negative => -self.ln_abs.exp(),
        }
    }

    /// `self^p` for a positive value.
    pub fn powf(self, p: f64) -> Self {
        match self.sign {
            Sign::Zero => Self::ZERO,
            _ => LogReal::from_ln(self.ln_abs * p),
        }
    }

    /// Scientific notation `d.ddEk` with `digits` significant figures.
    pub fn to_sci(&self, digits: usize) -> String {
        let prefix = match self.sign {
            Sign::Zero => return format!("{:.*}E0", digits.saturating_sub(1), 0.0),
            Sign::Negative => "-",
            Sign::Positive => "",
        };
        let l10 = self.log10_abs();
        let mut exponent = l10.floor();
        let mut mantissa = 10f64.powf(l10 - exponent);
        let scale = 10f64.powi(digits as i32 - 1);
        let mut rounded = round_half_even(mantissa * scale) / scale;
        if rounded >= 10.0 {
            exponent += 1.0;
            mantissa /= 10.0;
            rounded = round_half_even(mantissa * scale) / scale;
        }
        format!(
            "{prefix}{:.*}E{}",
            digits.saturating_sub(1),
            rounded,
            exponent as i64
        )
    }
}

fn round_half_even(v: f64) -> f64 {
    let r = v.round();
    if (v - v.trunc()).abs() == 0.5 && r % 2.0 != 0.0 {
        r - v.signum()
    } else {
        r
    }
}

fn product_sign(a: Sign, b: Sign) -> Sign {
    match (a, b) {
        (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
        (x, y) if x == y => Sign::Positive,
        _ => Sign::Negative,
    }
}

impl Mul for LogReal {
    type Output = LogReal;

    fn mul(self, rhs: LogReal) -> LogReal {
        match product_sign(self.sign, rhs.sign) {
            Sign::Zero => LogReal::ZERO,
            sign => LogReal {
                sign,
                ln_abs: self.ln_abs + rhs.ln_abs,
            },
        }
    }
}

impl Div for LogReal {
    type Output = LogReal;

    /// Division by zero yields a NaN magnitude.
    fn div(self, rhs: LogReal) -> LogReal {
        if rhs.is_zero() {
            return LogReal {
                sign: self.sign,
                ln_abs: f64::NAN,
            };
        }
        match product_sign(self.sign, rhs.sign) {
            Sign::Zero => LogReal::ZERO,
            sign => LogReal {
                sign,
                ln_abs: self.ln_abs - rhs.ln_abs,
            },
        }
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci(6))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_adds_logs() {
        let a = LogReal::from_f64(3.0);
        let b = LogReal::from_f64(-4.0);
        let p = a * b;
        assert_eq!(p.sign(), Sign::Negative);
        assert!((p.to_f64().unwrap() + 12.0).abs() < 1e-12);
        assert!(((a / b).to_f64().unwrap() + 0.75).abs() < 1e-12);
        assert!((LogReal::ZERO * a).is_zero());
    }

    #[test]
    fn overflow_is_flagged() {
        let huge = LogReal::from_ln(1000.0);
        assert_eq!(huge.to_f64(), None);
        assert_eq!(huge.to_f64_lossy(), f64::INFINITY);
        assert_eq!(huge.to_sci(3), "1.97E434");
    }

    #[test]
    fn scientific_rounding() {
        assert_eq!(LogReal::from_f64(50_287_000.0).to_sci(3), "5.03E7");
        assert_eq!(LogReal::from_f64(9.996e6).to_sci(3), "1.00E7");
        assert_eq!(LogReal::from_f64(7.92e6).to_sci(3), "7.92E6");
        assert_eq!(LogReal::from_f64(-0.001234).to_sci(2), "-1.2E-3");
        assert_eq!(LogReal::ZERO.to_sci(3), "0.00E0");
    }

    #[test]
    fn zero_sentinel() {
        let z = LogReal::from_f64(0.0);
        assert!(z.is_zero());
        assert_eq!(z.ln_abs(), f64::NEG_INFINITY);
        assert_eq!(LogReal::from_ln(f64::NEG_INFINITY), LogReal::ZERO);
    }
}
