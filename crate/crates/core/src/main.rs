use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use symvol::asymptotics::{
    coverage_fraction, estimate_count, estimate_volume, lower_bound, moments, validity_check,
    DEFAULT_OMEGA,
};
use symvol::diagonal::{parse_rational, RationalDiagonal};
use symvol::enumeration::{CountOptions, RowSums, DEFAULT_CELL_BUDGET};
use symvol::report::{
    count_row, figure_rows, format_real, table1_rows, table2_rows, write_records, write_report,
    CacheLock, CountCache, Counter, FigureKind, FigureOptions, Format, TableReport,
};
use symvol::volume::{
    extrapolate, lattice_volume, lattice_volume_sequence, mc_volume, DilationSchedule, Extrapolation, MCConfig,
};
use symvol::Error;

const CACHE_ENV: &str = "SYMVOL_CACHE";

#[derive(Parser)]
#[command(name = "symvol", version, about = "Counts of symmetric zero-diagonal integer matrices and diagonal-slice volumes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Maximum number of cells of the counting table.
    #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
    cell_budget: u64,
}

#[derive(Args)]
struct CacheArgs {
    /// Line-delimited JSON file of exact counts.
    #[arg(long, env = CACHE_ENV)]
    cache_path: Option<PathBuf>,
}

#[derive(Args)]
struct RowArgs {
    /// Matrix dimension; must match the length of --t when given.
    #[arg(long)]
    n: Option<usize>,
    /// Row sums, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<u64>,
    #[arg(long, default_value_t = DEFAULT_OMEGA)]
    omega: f64,
}

impl RowArgs {
    fn row_sums(&self) -> symvol::Result<RowSums> {
        match self.n {
            Some(n) => RowSums::with_dimension(n, self.t.clone()),
            None => RowSums::new(self.t.clone()),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact count, estimate, ratio, moments and validity for one row-sum vector.
    Count {
        #[command(flatten)]
        row: RowArgs,
        #[command(flatten)]
        cache: CacheArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Asymptotic estimate only, with an optional lower bound.
    Estimate {
        #[command(flatten)]
        row: RowArgs,
        /// Exponent of the lower bound, in (0, 1/2); uses the mean entry for every row.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Volume of the slice with prescribed diagonal: formula, lattice and Monte Carlo.
    Volume {
        /// Diagonal entries, comma separated rationals `p/q` or decimals.
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<String>,
        /// Monte Carlo samples; 0 skips sampling.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Dilation factors for the lattice sequence; chosen automatically when absent.
        #[arg(long, value_delimiter = ',')]
        dilations: Option<Vec<u64>>,
        #[command(flatten)]
        common: Common,
    },
    /// The 15 row-sum vectors of 7x7 matrices with total 56.
    Table1 {
        #[arg(long, default_value_t = DEFAULT_OMEGA)]
        omega: f64,
        #[command(flatten)]
        cache: CacheArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Constant row sums for N = 6..18.
    Table2 {
        /// Largest N for which exact counts are computed.
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long, default_value_t = DEFAULT_OMEGA)]
        omega: f64,
        #[command(flatten)]
        cache: CacheArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Volume sweep along a one-parameter family of diagonals.
    Figure {
        #[arg(value_parser = ["fig1", "fig2a", "fig2b"])]
        kind: String,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// List the entries of the count cache.
    Cache {
        #[command(flatten)]
        cache: CacheArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapacityExceeded { .. } | Error::CacheLocked(_) | Error::Guardrail(_) => 3,
        Error::Io(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

/// Holds the cache lock for the whole command and writes back on success.
struct CacheSession {
    path: PathBuf,
    cache: CountCache,
    original: CountCache,
    _lock: CacheLock,
}

impl CacheSession {
    fn open(path: Option<&Path>) -> symvol::Result<Option<Self>> {
        let Some(path) = path else { return Ok(None) };
        let lock = CacheLock::acquire(path)?;
        let (cache, warnings) = CountCache::load(path)?;
        for w in warnings {
            eprintln!("warning: {w}");
        }
        Ok(Some(CacheSession {
            path: path.to_path_buf(),
            original: cache.clone(),
            cache,
            _lock: lock,
        }))
    }

    fn close(self) -> symvol::Result<()> {
        if self.cache != self.original {
            self.cache.store(&self.path)?;
        }
        Ok(())
    }
}

fn with_counter<T>(
    cache: &CacheArgs,
    cell_budget: u64,
    f: impl FnOnce(&mut Counter<'_>) -> symvol::Result<T>,
) -> symvol::Result<T> {
    let mut session = CacheSession::open(cache.cache_path.as_deref())?;
    let options = CountOptions { cell_budget };
    let out = {
        let mut counter = Counter::new(options, session.as_mut().map(|s| &mut s.cache));
        f(&mut counter)?
    };
    if let Some(s) = session {
        s.close()?;
    }
    Ok(out)
}

fn print_table(report: TableReport, format: Format) -> symvol::Result<u8> {
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    write_report(io::stdout().lock(), &report.rows, format)?;
    Ok(0)
}

#[derive(Serialize)]
struct EstimateRecord {
    n: usize,
    t: String,
    lambda: String,
    estimate_sci: String,
    ln_estimate: String,
    lower_bound_sci: String,
    coverage: String,
    y2: String,
    y3: String,
    y4: String,
    max_validity_ratio: String,
    in_window: String,
}

#[derive(Serialize)]
struct VolumeRecord {
    n: usize,
    h: String,
    formula_volume: String,
    lattice_volume: String,
    lattice_exact: String,
    lattice_spread: String,
    lattice_last_m: String,
    lattice_truncated_at: String,
    mc_estimate: String,
    mc_stderr: String,
}

#[derive(Default)]
struct LatticeColumns {
    volume: String,
    exact: String,
    spread: String,
    last_m: Option<u64>,
    truncated: Option<u64>,
}

#[derive(Serialize)]
struct FigureRecord {
    x: String,
    formula_volume: String,
    mc_estimate: String,
    mc_stderr: String,
}

#[derive(Serialize)]
struct CacheRecord {
    n: usize,
    t_sorted: String,
    count: String,
    engine_version: String,
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn sci(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6e}")
    } else {
        String::new()
    }
}

fn run(cli: Cli) -> symvol::Result<u8> {
    match cli.command {
        Command::Count { row, cache, common } => {
            let rs = row.row_sums()?;
            let (report, err) = with_counter(&cache, common.cell_budget, |counter| {
                Ok(count_row(counter, &rs, row.omega))
            })?;
            write_report(io::stdout().lock(), &[report], common.format.into())?;
            match err {
                None => Ok(0),
                Some(e) => {
                    eprintln!("error: {e}");
                    Ok(exit_code(&e))
                }
            }
        }
        Command::Estimate { row, alpha, format } => {
            let rs = row.row_sums()?;
            let m = moments(&rs)?;
            let est = estimate_count(&rs)?;
            let v = validity_check(&rs, row.omega);
            let lower = match alpha {
                Some(a) => lower_bound(&rs, a, &vec![m.lambda; rs.n()])?.to_sci(3),
                None => String::new(),
            };
            let rec = EstimateRecord {
                n: rs.n(),
                t: join(rs.t()),
                lambda: format_real(m.lambda),
                estimate_sci: est.to_sci(3),
                ln_estimate: format!("{:.6}", est.ln_abs()),
                lower_bound_sci: lower,
                coverage: format!("{:.4}", coverage_fraction(m.lambda)?),
                y2: format_real(m.y2),
                y3: format_real(m.y3),
                y4: format_real(m.y4),
                max_validity_ratio: format!("{:.4}", v.max_ratio),
                in_window: v.in_window.to_string(),
            };
            let header = [
                "n",
                "t",
                "lambda",
                "estimate_sci",
                "ln_estimate",
                "lower_bound_sci",
                "coverage",
                "y2",
                "y3",
                "y4",
                "max_validity_ratio",
                "in_window",
            ];
            write_records(io::stdout().lock(), &[rec], &header, format.into())?;
            Ok(0)
        }
        Command::Volume {
            h,
            samples,
            seed,
            dilations,
            common,
        } => {
            let values = h
                .iter()
                .map(|s| parse_rational(s))
                .collect::<symvol::Result<Vec<_>>>()?;
            let diag = RationalDiagonal::new(values)?;
            let ds = diag.to_spec()?;
            let n = ds.n();
            let formula = if n >= 4 {
                estimate_volume(&ds)?.to_sci(6)
            } else {
                "n/a".into()
            };
            let opts = CountOptions {
                cell_budget: common.cell_budget,
            };
            let lattice = match dilations {
                Some(ms) => {
                    let sched = DilationSchedule::new(&diag, ms)?;
                    let seq = lattice_volume_sequence(&diag, &sched, &opts)?;
                    let last_m = seq.entries.last().map(|e| e.m);
                    let truncated = seq.truncated_at;
                    extrapolate(&seq, Extrapolation::default()).map(|x| LatticeColumns {
                        volume: x.estimate.to_sci(6),
                        exact: seq.richardson_exact().map(|r| r.to_string()).unwrap_or_default(),
                        spread: format!("{:.4}", x.spread),
                        last_m,
                        truncated,
                    })
                }
                None => lattice_volume(&diag, &opts).map(|v| LatticeColumns {
                    volume: v.estimate.to_sci(6),
                    exact: v.exact.map(|r| r.to_string()).unwrap_or_default(),
                    spread: format!("{:.4}", v.spread),
                    last_m: v.sequence.entries.last().map(|e| e.m),
                    truncated: v.sequence.truncated_at,
                }),
            };
            let lattice = lattice.unwrap_or_else(|e| {
                eprintln!("warning: lattice sequence: {e}");
                LatticeColumns::default()
            });
            let (mc_estimate, mc_stderr) = if samples > 0 && n >= 4 {
                let mc = mc_volume(&ds, &MCConfig::new(samples, seed))?;
                (sci(mc.estimate), sci(mc.stderr))
            } else {
                (String::new(), String::new())
            };
            let rec = VolumeRecord {
                n,
                h: h.join(","),
                formula_volume: formula,
                lattice_volume: lattice.volume,
                lattice_exact: lattice.exact,
                lattice_spread: lattice.spread,
                lattice_last_m: lattice.last_m.map(|m| m.to_string()).unwrap_or_default(),
                lattice_truncated_at: lattice.truncated.map(|m| m.to_string()).unwrap_or_default(),
                mc_estimate,
                mc_stderr,
            };
            let header = [
                "n",
                "h",
                "formula_volume",
                "lattice_volume",
                "lattice_exact",
                "lattice_spread",
                "lattice_last_m",
                "lattice_truncated_at",
                "mc_estimate",
                "mc_stderr",
            ];
            write_records(io::stdout().lock(), &[rec], &header, common.format.into())?;
            Ok(0)
        }
        Command::Table1 {
            omega,
            cache,
            common,
        } => {
            let report = with_counter(&cache, common.cell_budget, |c| table1_rows(c, omega))?;
            print_table(report, common.format.into())
        }
        Command::Table2 {
            max_n,
            omega,
            cache,
            common,
        } => {
            let report =
                with_counter(&cache, common.cell_budget, |c| table2_rows(c, max_n, omega))?;
            print_table(report, common.format.into())
        }
        Command::Figure {
            kind,
            n,
            grid,
            samples,
            seed,
            format,
        } => {
            let kind = FigureKind::parse(&kind).expect("validated by clap");
            let rows = figure_rows(
                kind,
                &FigureOptions {
                    n,
                    grid,
                    samples,
                    seed,
                },
            )?;
            if rows.is_empty() {
                eprintln!("warning: empty sweep");
            }
            let header = ["x", "formula_volume", "mc_estimate", "mc_stderr"];
            match format {
                OutputFormat::Csv => {
                    let recs: Vec<_> = rows
                        .iter()
                        .map(|r| FigureRecord {
                            x: format!("{:.6}", r.x),
                            formula_volume: r.formula_volume.map(sci).unwrap_or_default(),
                            mc_estimate: sci(r.mc_estimate),
                            mc_stderr: sci(r.mc_stderr),
                        })
                        .collect();
                    write_records(io::stdout().lock(), &recs, &header, Format::Csv)?;
                }
                OutputFormat::Json => {
                    write_records(io::stdout().lock(), &rows, &header, Format::Json)?;
                }
            }
            Ok(0)
        }
        Command::Cache { cache, format } => {
            let Some(path) = cache.cache_path else {
                return Err(Error::Domain(format!("no cache path; pass --cache-path or set {CACHE_ENV}")));
            };
            let (cache, warnings) = CountCache::load(&path)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            let recs: Vec<_> = cache
                .entries()
                .map(|e| CacheRecord {
                    n: e.n,
                    t_sorted: join(&e.t_sorted),
                    count: e.count.clone(),
                    engine_version: e.engine_version.clone(),
                })
                .collect();
            let header = ["n", "t_sorted", "count", "engine_version"];
            write_records(io::stdout().lock(), &recs, &header, format.into())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    let _ = io::stdout().flush();
    ExitCode::from(code)
}
