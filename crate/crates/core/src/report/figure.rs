//! Volume sweeps along one-parameter families of diagonals.

use serde::Serialize;

use crate::asymptotics::estimate_volume;
use crate::diagonal::DiagonalSpec;
use crate::error::{Error, Result};
use crate::volume::{mc_volume, MCConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    /// `h = (1/2, ..., 1/2, x, 1 - x)` for `4 <= n <= 9`
    Fig1,
    /// `h = (x, x, x, x, x)`
    Fig2a,
    /// `h = (1/2, x, x, x, 1 - 3x)`
    Fig2b,
}

impl FigureKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fig1" => Some(FigureKind::Fig1),
            "fig2a" => Some(FigureKind::Fig2a),
            "fig2b" => Some(FigureKind::Fig2b),
            _ => None,
        }
    }

    /// Range of `x` keeping every diagonal entry in `[0, 1]`.
    pub fn domain(self) -> (f64, f64) {
        match self {
            FigureKind::Fig1 | FigureKind::Fig2a => (0.0, 1.0),
            FigureKind::Fig2b => (0.0, 1.0 / 3.0),
        }
    }

    pub fn dimension(self, n: usize) -> usize {
        match self {
            FigureKind::Fig1 => n,
            FigureKind::Fig2a | FigureKind::Fig2b => 5,
        }
    }

    pub fn diagonal(self, n: usize, x: f64) -> Vec<f64> {
        match self {
            FigureKind::Fig1 => {
                let mut h = vec![0.5; n];
                h[n - 2] = x;
                h[n - 1] = 1.0 - x;
                h
            }
            FigureKind::Fig2a => vec![x; 5],
            FigureKind::Fig2b => vec![0.5, x, x, x, (1.0 - 3.0 * x).max(0.0)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    pub n: usize,
    pub grid: usize,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureRow {
    pub x: f64,
    /// Empty where the formula is undefined.
    pub formula_volume: Option<f64>,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
}

/// Grid of `grid` equally spaced points over the closed domain. Grid point
/// `i` uses seed `seed + i`.
pub fn figure_rows(kind: FigureKind, opts: &FigureOptions) -> Result<Vec<FigureRow>> {
    let n = kind.dimension(opts.n);
    if kind == FigureKind::Fig1 && !(4..=9).contains(&opts.n) {
        return Err(Error::Domain(format!("fig1 needs 4 <= n <= 9, got {}", opts.n)));
    }
    let (lo, hi) = kind.domain();
    let xs: Vec<f64> = match opts.grid {
        0 => Vec::new(),
        1 => vec![lo],
        g => (0..g).map(|i| lo + (hi - lo) * i as f64 / (g - 1) as f64).collect(),
    };
    xs.into_iter()
        .enumerate()
        .map(|(i, x)| {
            let ds = match DiagonalSpec::new(kind.diagonal(n, x)) {
                Ok(ds) => ds,
                // the all-ones corner: a single matrix, zero volume
                Err(Error::InvalidDiagonal(_)) => {
                    return Ok(FigureRow {
                        x,
                        formula_volume: None,
                        mc_estimate: 0.0,
                        mc_stderr: 0.0,
                    })
                }
                Err(e) => return Err(e),
            };
            let formula_volume = estimate_volume(&ds).ok().and_then(|v| v.to_f64());
            let mc = if opts.samples > 0 {
                let cfg = MCConfig::new(opts.samples, opts.seed.wrapping_add(i as u64));
                Some(mc_volume(&ds, &cfg)?)
            } else {
                None
            };
            Ok(FigureRow {
                x,
                formula_volume,
                mc_estimate: mc.map_or(f64::NAN, |m| m.estimate),
                mc_stderr: mc.map_or(f64::NAN, |m| m.stderr),
            })
        })
        .collect()
}
