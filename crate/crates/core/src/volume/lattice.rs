//! Volume of a diagonal slice from lattice-point counts of its dilations.
//!
//! For a dilation `m` with integral row sums `t_j = m (1 - h_j)` the integer
//! matrices with those row sums are the lattice points of `m P_N(h)`, and
//! `m^{-N(N-3)/2}` times their number tends to the volume.

use num_bigint::{BigInt, Sign as BigSign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::diagonal::RationalDiagonal;
use crate::enumeration::{count_matrices_with, working_cells, CountOptions, MatrixCount, RowSums};
use crate::error::{Error, Result};
use crate::logreal::LogReal;

/// Increasing dilation factors, each making every row sum integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DilationSchedule {
    denominators: Vec<u64>,
}

impl DilationSchedule {
    pub fn new(diag: &RationalDiagonal, denominators: Vec<u64>) -> Result<Self> {
        if denominators.windows(2).any(|w| w[0] >= w[1]) || denominators.first() == Some(&0) {
            return Err(Error::Domain(
                "dilations must be positive and strictly increasing".into(),
            ));
        }
        for &m in &denominators {
            diag.row_sums_at(m)
                .map_err(|row| Error::Integrality { m, row })?;
        }
        Ok(DilationSchedule { denominators })
    }

    /// Smallest dilation step with integral row sums and an even total.
    ///
    /// Odd totals admit no symmetric zero-diagonal matrix, so those dilations
    /// only contribute zeros.
    pub fn step(diag: &RationalDiagonal) -> u64 {
        let base = diag.base_dilation();
        let total: u64 = diag
            .row_sums_at(base)
            .expect("base dilation is integral")
            .iter()
            .sum();
        if total % 2 == 1 {
            2 * base
        } else {
            base
        }
    }

    /// The first `count` multiples of [`DilationSchedule::step`].
    pub fn multiples(diag: &RationalDiagonal, count: usize) -> Self {
        let step = Self::step(diag);
        DilationSchedule {
            denominators: (1..=count as u64).map(|k| k * step).collect(),
        }
    }

    /// Multiples of the step as long as the counter stays within `cell_budget`,
    /// at most `max_entries` of them.
    pub fn within_budget(diag: &RationalDiagonal, max_entries: usize, cell_budget: u64) -> Self {
        let step = Self::step(diag);
        let mut denominators = Vec::new();
        for k in 1..=max_entries as u64 {
            let m = k * step;
            let t = diag.row_sums_at(m).expect("multiple of the step");
            let Ok(rs) = RowSums::new(t) else { break };
            if working_cells(&rs) > cell_budget as u128 {
                break;
            }
            denominators.push(m);
        }
        DilationSchedule { denominators }
    }

    pub fn denominators(&self) -> &[u64] {
        &self.denominators
    }
}

/// Lattice data at one dilation.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeEntry {
    pub m: u64,
    /// Lattice points of the closed dilated polytope.
    pub raw_count: MatrixCount,
    /// Lattice points in its relative interior (all off-diagonal entries >= 1).
    pub interior_count: MatrixCount,
    /// `m^{-dim} raw_count`
    pub scaled: LogReal,
    /// `m^{-dim} interior_count`
    pub scaled_interior: LogReal,
}

impl VolumeEntry {
    /// Mean of the closed and interior scaled counts.
    ///
    /// By Ehrhart reciprocity the `m^{dim-1}` terms of the two counts cancel,
    /// so this converges one order faster than `scaled`.
    pub fn reciprocal_mean(&self) -> LogReal {
        let a = self.scaled.to_f64_lossy();
        let b = self.scaled_interior.to_f64_lossy();
        if a.is_finite() && b.is_finite() && a > 0.0 {
            LogReal::from_f64(0.5 * (a + b))
        } else {
            // ln((A + B) / 2) without leaving log space
            let (hi, lo) = if self.scaled.ln_abs() >= self.scaled_interior.ln_abs() {
                (self.scaled, self.scaled_interior)
            } else {
                (self.scaled_interior, self.scaled)
            };
            if hi.is_zero() {
                return LogReal::ZERO;
            }
            let ratio = if lo.is_zero() {
                0.0
            } else {
                (lo.ln_abs() - hi.ln_abs()).exp()
            };
            LogReal::from_ln(hi.ln_abs() + ratio.ln_1p() - std::f64::consts::LN_2)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeSequence {
    pub n: usize,
    /// Dimension `N (N - 3) / 2` of the slice.
    pub dimension: usize,
    pub entries: Vec<VolumeEntry>,
    /// First dilation refused by the cell budget, if the schedule was cut.
    pub truncated_at: Option<u64>,
}

impl VolumeSequence {
    /// Values under the chosen rule, one per entry. For
    /// [`Extrapolation::Richardson`] entry `i` uses entries up to `i`.
    pub fn values(&self, rule: Extrapolation) -> Vec<LogReal> {
        match rule {
            Extrapolation::Closed => self.entries.iter().map(|e| e.scaled).collect(),
            Extrapolation::ReciprocalMean => {
                self.entries.iter().map(VolumeEntry::reciprocal_mean).collect()
            }
            Extrapolation::Richardson => (1..=self.entries.len())
                .map(|i| {
                    let window = self.richardson_window(i);
                    rational_to_logreal(&richardson_limit(window, self.dimension))
                })
                .collect(),
        }
    }

    /// The last `dimension / 2 + 1` entries of the first `len`.
    fn richardson_window(&self, len: usize) -> &[VolumeEntry] {
        let q = self.dimension / 2 + 1;
        &self.entries[len.saturating_sub(q)..len]
    }

    /// Exact limit of the reciprocal means through all entries, as a rational.
    ///
    /// Exact whenever the window holds `dimension / 2 + 1` dilations on which
    /// the counts follow one Ehrhart polynomial.
    pub fn richardson_exact(&self) -> Option<BigRational> {
        if self.entries.is_empty() {
            return None;
        }
        Some(richardson_limit(
            self.richardson_window(self.entries.len()),
            self.dimension,
        ))
    }

    /// Relative gaps between consecutive nonzero values.
    pub fn spreads(&self, rule: Extrapolation) -> Vec<f64> {
        let vals: Vec<LogReal> = self
            .values(rule)
            .into_iter()
            .filter(|v| !v.is_zero())
            .collect();
        vals.windows(2)
            .map(|w| relative_gap(w[0], w[1]))
            .collect()
    }
}

fn relative_gap(prev: LogReal, last: LogReal) -> f64 {
    // |prev - last| / last
    ((prev.ln_abs() - last.ln_abs()).exp() - 1.0).abs()
}

pub fn lattice_volume_sequence(
    diag: &RationalDiagonal,
    sched: &DilationSchedule,
    opts: &CountOptions,
) -> Result<VolumeSequence> {
    let n = diag.n();
    if n < 3 {
        return Err(Error::Domain(format!("slices need N >= 3, got {n}")));
    }
    let dimension = n * (n - 3) / 2;
    let mut entries = Vec::with_capacity(sched.denominators.len());
    let mut truncated_at = None;
    for &m in &sched.denominators {
        let t = diag
            .row_sums_at(m)
            .map_err(|row| Error::Integrality { m, row })?;
        let rs = RowSums::new(t.clone())?;
        let raw_count = match count_matrices_with(&rs, opts) {
            Ok(c) => c,
            Err(Error::CapacityExceeded { .. }) => {
                truncated_at = Some(m);
                break;
            }
            Err(e) => return Err(e),
        };
        let interior_count = if dimension == 0 {
            raw_count.clone()
        } else {
            let shift = (n - 1) as u64;
            if t.iter().all(|&v| v >= shift) {
                let inner = RowSums::new(t.iter().map(|&v| v - shift).collect())?;
                count_matrices_with(&inner, opts)?
            } else {
                MatrixCount::zero()
            }
        };
        let ln_scale = dimension as f64 * (m as f64).ln();
        let scale = |c: &MatrixCount| LogReal::from_ln(c.ln() - ln_scale);
        entries.push(VolumeEntry {
            m,
            scaled: scale(&raw_count),
            scaled_interior: scale(&interior_count),
            raw_count,
            interior_count,
        });
    }
    Ok(VolumeSequence {
        n,
        dimension,
        entries,
        truncated_at,
    })
}

/// `(closed + interior) / (2 m^dim)` as an exact rational.
fn exact_mean(e: &VolumeEntry, dimension: usize) -> BigRational {
    let num = BigInt::from_biguint(BigSign::Plus, e.raw_count.value() + e.interior_count.value());
    let den = BigInt::from(2u8) * BigInt::from(e.m).pow(dimension as u32);
    BigRational::new(num, den)
}

/// Value at `m = inf` of the polynomial in `1 / m^2` through the entries'
/// reciprocal means (Lagrange form).
///
/// Reciprocity makes the mean an even or odd polynomial in `m`, so after
/// scaling only even powers of `1 / m` remain.
fn richardson_limit(window: &[VolumeEntry], dimension: usize) -> BigRational {
    let sq: Vec<BigInt> = window.iter().map(|e| BigInt::from(e.m).pow(2)).collect();
    let mut total = BigRational::zero();
    for (i, e) in window.iter().enumerate() {
        let mut weight = BigRational::one();
        for (j, mj) in sq.iter().enumerate() {
            if j != i {
                weight *= BigRational::new(sq[i].clone(), &sq[i] - mj);
            }
        }
        total += exact_mean(e, dimension) * weight;
    }
    total
}

fn rational_to_logreal(r: &BigRational) -> LogReal {
    if r.is_zero() {
        return LogReal::ZERO;
    }
    let ln = |v: &BigInt| MatrixCount::new(v.magnitude().clone()).ln();
    let mag = LogReal::from_ln(ln(r.numer()) - ln(r.denom()));
    if r.is_negative() {
        LogReal::from_f64(-1.0) * mag
    } else {
        mag
    }
}

/// How lattice entries are turned into a volume value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extrapolation {
    /// `m^{-dim}` times the closed count.
    Closed,
    /// Mean of the closed and interior scaled counts.
    ReciprocalMean,
    /// Polynomial extrapolation of the reciprocal means in `1 / m^2`.
    #[default]
    Richardson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub estimate: LogReal,
    /// Relative gap between the last two nonzero values.
    pub spread: f64,
}

/// Last nonzero value and its relative gap to the previous one.
pub fn extrapolate(seq: &VolumeSequence, rule: Extrapolation) -> Result<Extrapolated> {
    let vals: Vec<LogReal> = seq
        .values(rule)
        .into_iter()
        .filter(|v| !v.is_zero())
        .collect();
    if vals.len() < 2 {
        return Err(Error::InsufficientEntries(vals.len()));
    }
    let last = vals[vals.len() - 1];
    let prev = vals[vals.len() - 2];
    Ok(Extrapolated {
        estimate: last,
        spread: relative_gap(prev, last),
    })
}

/// Volume from lattice counts with exact extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeVolume {
    pub estimate: LogReal,
    /// Exact rational volume, when two consecutive full windows agree.
    pub exact: Option<BigRational>,
    /// Relative gap between the last two extrapolated values.
    pub spread: f64,
    /// Counts behind the estimate; for a uniform diagonal these are the
    /// counts of the zero-diagonal slice.
    pub sequence: VolumeSequence,
    /// Whether a uniform diagonal was reduced to the zero diagonal.
    pub from_zero_diagonal: bool,
}

/// Volume of `P_N(h)` from the first `dimension / 2 + 2` admissible
/// dilations, or as many as `opts` allows.
///
/// A uniform diagonal `h 1` gives `P_N(h 1) = h I + (1 - h) P_N(0)`, so its
/// volume is `(1 - h)^dim` times that of the zero-diagonal slice, whose
/// dilations are far cheaper to count.
pub fn lattice_volume(diag: &RationalDiagonal, opts: &CountOptions) -> Result<LatticeVolume> {
    let n = diag.n();
    let h = diag.h();
    let uniform = n > 0 && h.iter().all(|v| *v == h[0]) && !h[0].is_zero();
    let base = if uniform {
        RationalDiagonal::uniform(n, crate::diagonal::Rational::zero())?
    } else {
        diag.clone()
    };
    if n < 3 {
        return Err(Error::Domain(format!("slices need N >= 3, got {n}")));
    }
    let dimension = n * (n - 3) / 2;
    let wanted = dimension / 2 + 2;
    let sched = DilationSchedule::within_budget(&base, wanted, opts.cell_budget);
    let sequence = lattice_volume_sequence(&base, &sched, opts)?;
    let values = sequence.values(Extrapolation::Richardson);
    let Some(&last) = values.last() else {
        return Err(Error::InsufficientEntries(0));
    };
    let spread = match values.len() {
        0 | 1 => f64::INFINITY,
        len => relative_gap(values[len - 2], last),
    };
    let full = sequence.entries.len() == wanted;
    let mut exact = None;
    if full {
        let prev = richardson_limit(&sequence.entries[..wanted - 1], dimension);
        let limit = sequence.richardson_exact().expect("nonempty");
        if prev == limit {
            exact = Some(limit);
        }
    }
    let mut estimate = last;
    if uniform {
        let one_minus = crate::diagonal::Rational::from_integer(1) - h[0];
        let factor = BigRational::new(
            BigInt::from(*one_minus.numer()),
            BigInt::from(*one_minus.denom()),
        )
        .pow(dimension as i32);
        estimate = estimate * rational_to_logreal(&factor);
        exact = exact.map(|v| v * factor);
    }
    Ok(LatticeVolume {
        estimate,
        exact,
        spread,
        sequence,
        from_zero_diagonal: uniform,
    })
}
