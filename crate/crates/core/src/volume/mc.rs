//! Hit-or-miss Monte Carlo over the free coordinates of a diagonal slice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::chart::FreeCoordinateChart;
use crate::diagonal::DiagonalSpec;
use crate::error::{Error, Result};

/// Ratio between the lattice-normalized volume and the Lebesgue volume in
/// free coordinates.
///
/// Integer free values always complete to an integer matrix when the total
/// row sum is even, so the free-coordinate lattice is the full `Z^dim` and
/// the ratio is 1.
pub const LATTICE_NORMALIZATION: f64 = 1.0;

/// Samples drawn from one random stream. Fixed so that the merged result
/// does not depend on how streams are spread across threads.
pub const STREAM_SAMPLES: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCConfig {
    pub samples: u64,
    pub seed: u64,
    /// Inflation of the per-coordinate bound `min(s_k, s_l)`, capped at 1.
    pub box_margin: f64,
}

impl MCConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        MCConfig {
            samples,
            seed,
            box_margin: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub samples: u64,
    pub box_volume: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McRatio {
    pub ratio: f64,
    pub stderr: f64,
    pub hits: (u64, u64),
}

/// Precomputed feasibility test for one diagonal.
struct Slice {
    slack: Vec<f64>,
    /// `(sum_{j>=1} s_j - s_0) / 2`: value of `b_12` when all free entries vanish
    b12_at_origin: f64,
}

impl Slice {
    fn new(ds: &DiagonalSpec) -> Self {
        let slack = ds.slack();
        let b12_at_origin = (slack[1..].iter().sum::<f64>() - slack[0]) / 2.0;
        Slice {
            slack,
            b12_at_origin,
        }
    }

    /// `rows` holds the free-entry row sums of rows 1..N, indexed by row.
    fn contains(&self, rows: &[f64], free_sum: f64) -> bool {
        let b12 = self.b12_at_origin - free_sum;
        if b12 < 0.0 {
            return false;
        }
        (1..self.slack.len()).all(|j| {
            let extra = if j == 1 || j == 2 { b12 } else { 0.0 };
            self.slack[j] - rows[j] - extra >= 0.0
        })
    }
}

fn validate(ds: &DiagonalSpec, cfg: &MCConfig) -> Result<FreeCoordinateChart> {
    if cfg.samples == 0 {
        return Err(Error::ZeroSamples);
    }
    if ds.n() < 4 {
        return Err(Error::Domain(format!("Monte Carlo needs N >= 4, got {}", ds.n())));
    }
    if !(cfg.box_margin >= 1.0) {
        return Err(Error::Domain(format!(
            "box margin must be at least 1, got {}",
            cfg.box_margin
        )));
    }
    FreeCoordinateChart::new(ds.n())
}

fn box_bounds(chart: &FreeCoordinateChart, slacks: &[&[f64]], margin: f64) -> Vec<f64> {
    chart
        .free_pairs()
        .iter()
        .map(|&(k, l)| {
            let widest = slacks
                .iter()
                .map(|s| s[k].min(s[l]))
                .fold(0.0, f64::max);
            (margin * widest).min(1.0)
        })
        .collect()
}

/// Runs `samples` draws in fixed-size streams and sums the per-stream tallies.
fn run_streams<F>(cfg: &MCConfig, tally: F) -> [u64; 3]
where
    F: Fn(&mut ChaCha8Rng, u64) -> [u64; 3] + Sync,
{
    let streams = cfg.samples.div_ceil(STREAM_SAMPLES);
    (0..streams)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i);
            let count = STREAM_SAMPLES.min(cfg.samples - i * STREAM_SAMPLES);
            tally(&mut rng, count)
        })
        .reduce(|| [0; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]])
}

/// Draws one point of the box into the per-row sums; returns the sum of all
/// free values.
fn draw(
    rng: &mut ChaCha8Rng,
    pairs: &[(usize, usize)],
    bounds: &[f64],
    rows: &mut [f64],
) -> f64 {
    rows.iter_mut().for_each(|r| *r = 0.0);
    let mut total = 0.0;
    for (&(k, l), &ub) in pairs.iter().zip(bounds) {
        let v = ub * rng.random::<f64>();
        rows[k] += v;
        rows[l] += v;
        total += v;
    }
    total
}

/// Volume of the diagonal slice, normalized like the lattice count.
pub fn mc_volume(ds: &DiagonalSpec, cfg: &MCConfig) -> Result<McEstimate> {
    let chart = validate(ds, cfg)?;
    let slice = Slice::new(ds);
    let bounds = box_bounds(&chart, &[&slice.slack], cfg.box_margin);
    let box_volume: f64 = bounds.iter().product();
    let pairs = chart.free_pairs();
    let n = ds.n();

    let [hits, _, _] = run_streams(cfg, |rng, count| {
        let mut rows = vec![0.0; n];
        let mut hits = 0;
        for _ in 0..count {
            let total = draw(rng, pairs, &bounds, &mut rows);
            if slice.contains(&rows, total) {
                hits += 1;
            }
        }
        [hits, 0, 0]
    });

    let p = hits as f64 / cfg.samples as f64;
    let scale = box_volume * LATTICE_NORMALIZATION;
    Ok(McEstimate {
        estimate: scale * p,
        stderr: scale * (p * (1.0 - p) / cfg.samples as f64).sqrt(),
        hits,
        samples: cfg.samples,
        box_volume,
    })
}

/// Ratio `vol(ds1) / vol(ds2)` from common random draws in a shared box.
pub fn mc_volume_ratio(ds1: &DiagonalSpec, ds2: &DiagonalSpec, cfg: &MCConfig) -> Result<McRatio> {
    if ds1.n() != ds2.n() {
        return Err(Error::DimensionMismatch(ds1.n(), ds2.n()));
    }
    let chart = validate(ds1, cfg)?;
    let (a, b) = (Slice::new(ds1), Slice::new(ds2));
    let bounds = box_bounds(&chart, &[&a.slack, &b.slack], cfg.box_margin);
    let pairs = chart.free_pairs();
    let n = ds1.n();

    let [h1, h2, both] = run_streams(cfg, |rng, count| {
        let mut rows = vec![0.0; n];
        let mut tally = [0u64; 3];
        for _ in 0..count {
            let total = draw(rng, pairs, &bounds, &mut rows);
            let in_a = a.contains(&rows, total);
            let in_b = b.contains(&rows, total);
            tally[0] += u64::from(in_a);
            tally[1] += u64::from(in_b);
            tally[2] += u64::from(in_a && in_b);
        }
        tally
    });
    if h2 == 0 {
        return Err(Error::ZeroHits);
    }
    let nf = cfg.samples as f64;
    let (p1, p2, p12) = (h1 as f64 / nf, h2 as f64 / nf, both as f64 / nf);
    let ratio = h1 as f64 / h2 as f64;
    // delta method for correlated binomial proportions
    let var = (p1 * (1.0 - p1) / (p2 * p2) + p1 * p1 * p2 * (1.0 - p2) / p2.powi(4)
        - 2.0 * p1 * (p12 - p1 * p2) / p2.powi(3))
        / nf;
    Ok(McRatio {
        ratio,
        stderr: var.max(0.0).sqrt(),
        hits: (h1, h2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let ds = DiagonalSpec::uniform(5, 0.4).unwrap();
        let cfg = MCConfig::new(200_000, 11);
        let a = mc_volume(&ds, &cfg).unwrap();
        let b = mc_volume(&ds, &cfg).unwrap();
        assert_eq!(a, b);
        let c = mc_volume(&ds, &MCConfig::new(200_000, 12)).unwrap();
        assert_ne!(a.hits, c.hits);
    }

    #[test]
    fn independent_of_thread_count() {
        let ds = DiagonalSpec::uniform(4, 0.5).unwrap();
        let cfg = MCConfig::new(300_000, 5);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| mc_volume(&ds, &cfg).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap()
            .install(|| mc_volume(&ds, &cfg).unwrap());
        assert_eq!(single, multi);
    }

    #[test]
    fn single_hit_equals_box_volume() {
        let ds = DiagonalSpec::uniform(4, 0.5).unwrap();
        let seed = (0..100)
            .find(|&s| mc_volume(&ds, &MCConfig::new(1, s)).unwrap().hits == 1)
            .expect("some seed hits");
        let est = mc_volume(&ds, &MCConfig::new(1, seed)).unwrap();
        assert_eq!(est.box_volume, 0.25);
        assert_eq!(est.estimate, est.box_volume * LATTICE_NORMALIZATION);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn zero_samples_rejected() {
        let ds = DiagonalSpec::uniform(4, 0.5).unwrap();
        assert!(matches!(
            mc_volume(&ds, &MCConfig::new(0, 1)),
            Err(Error::ZeroSamples)
        ));
        assert!(mc_volume(&DiagonalSpec::uniform(3, 0.5).unwrap(), &MCConfig::new(10, 1)).is_err());
    }

    #[test]
    fn n4_half_matches_exact_area() {
        // for N = 4, h = 1/2 the slice is the triangle u, v >= 0, u + v <= 1/2
        let ds = DiagonalSpec::uniform(4, 0.5).unwrap();
        let est = mc_volume(&ds, &MCConfig::new(1_000_000, 3)).unwrap();
        assert!((est.estimate - 0.125).abs() < 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn identical_diagonals_have_unit_ratio() {
        let ds = DiagonalSpec::uniform(5, 0.3).unwrap();
        let r = mc_volume_ratio(&ds, &ds, &MCConfig::new(100_000, 9)).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert_eq!(r.stderr, 0.0);
    }

    #[test]
    fn ratio_follows_uniform_scaling() {
        // P_N(c 1) = (1 - c) P_N(0): the ratio is ((1 - c1) / (1 - c2))^dim
        let a = DiagonalSpec::uniform(5, 0.2).unwrap();
        let b = DiagonalSpec::uniform(5, 0.25).unwrap();
        let r = mc_volume_ratio(&a, &b, &MCConfig::new(1_000_000, 21)).unwrap();
        let expected = (0.8f64 / 0.75).powi(5);
        assert!((r.ratio - expected).abs() < 3.0 * r.stderr, "{r:?} vs {expected}");
    }

    #[test]
    fn degenerate_reference_has_no_hits() {
        let a = DiagonalSpec::uniform(5, 0.3).unwrap();
        let b = DiagonalSpec::uniform(5, 0.999_999_9).unwrap();
        assert!(matches!(
            mc_volume_ratio(&a, &b, &MCConfig::new(10_000, 1)),
            Err(Error::ZeroHits)
        ));
        let c = DiagonalSpec::uniform(6, 0.3).unwrap();
        assert!(mc_volume_ratio(&a, &c, &MCConfig::new(10, 1)).is_err());
    }
}
