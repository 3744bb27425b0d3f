//! Benchmark orchestration: load or generate operands, run algorithms with
//! warm-up and median-of-3 timing, attach Roofline predictions.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use spgemm_core::baseline::{column_symbolic, hash_multiply_with, heap_multiply_with};
use spgemm_core::gen::{generate, GenKind, GenSpec};
use spgemm_core::mm::mm_read;
use spgemm_core::pb::{pb_multiply, PbConfig};
use spgemm_core::pool::with_threads;
use spgemm_core::reference::{compare_csr, reference_multiply, REFERENCE_MAX_CELLS};
use spgemm_core::report::{Phase, PhaseReport, PhaseTimes};
use spgemm_core::roofline::{
    ai_col_lower, ai_outer_lower, ai_upper, MachineModel, MultiplyStats, DEFAULT_BYTES_PER_NONZERO,
};
use spgemm_core::{CooMatrix, CsrMatrix};

/// Largest dimension for which a run is cross-checked against another
/// algorithm.
pub const SPOT_CHECK_MAX_N: usize = 1 << 14;

pub const TIMED_RUNS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algo {
    Pb,
    Heap,
    Hash,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Pb => "pb",
            Algo::Heap => "heap",
            Algo::Hash => "hash",
        }
    }

    /// Lower-bound arithmetic intensity of this algorithm's class.
    pub fn ai_lower(self, cf: f64, b: f64) -> f64 {
        match self {
            Algo::Pb => ai_outer_lower(cf, b),
            Algo::Heap | Algo::Hash => ai_col_lower(cf, b),
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pb" => Ok(Algo::Pb),
            "heap" => Ok(Algo::Heap),
            "hash" => Ok(Algo::Hash),
            other => bail!("unknown algorithm {other:?} (expected pb, heap or hash)"),
        }
    }
}

/// Parses a comma-separated algorithm list such as `pb,heap,hash`.
pub fn parse_algos(s: &str) -> Result<Vec<Algo>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum MatrixSource {
    /// Square the matrix stored in a Matrix Market file.
    File(PathBuf),
    /// Multiply two generated matrices: `spec` and `spec` with seed + 1.
    Gen(GenSpec),
}

impl MatrixSource {
    pub fn descriptor(&self) -> String {
        match self {
            MatrixSource::File(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string()),
            MatrixSource::Gen(s) => match s.kind {
                GenKind::Er => "er".into(),
                GenKind::Rmat => "rmat".into(),
            },
        }
    }

    pub fn scale(&self) -> Option<u32> {
        match self {
            MatrixSource::Gen(s) => Some(s.scale),
            MatrixSource::File(_) => None,
        }
    }

    pub fn edge_factor(&self) -> Option<usize> {
        match self {
            MatrixSource::Gen(s) => Some(s.edge_factor),
            MatrixSource::File(_) => None,
        }
    }

    pub fn load(&self) -> Result<Operands> {
        match self {
            MatrixSource::File(path) => {
                let m = mm_read(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(Operands::new(m.clone(), m))
            }
            MatrixSource::Gen(spec) => {
                let a = generate(spec)?;
                let b = generate(&spec.with_seed(spec.seed.wrapping_add(1)))?;
                Ok(Operands::new(a, b))
            }
        }
    }
}

/// Both operands in every format the algorithms need.
pub struct Operands {
    pub a: CooMatrix,
    pub b: CooMatrix,
    pub a_csc: spgemm_core::CscMatrix,
    pub b_csr: CsrMatrix,
    pub b_csc: spgemm_core::CscMatrix,
}

impl Operands {
    pub fn new(a: CooMatrix, b: CooMatrix) -> Self {
        let a_csc = a.to_csc();
        let b_csr = b.to_csr();
        let b_csc = b_csr.to_csc();
        Self {
            a,
            b,
            a_csc,
            b_csr,
            b_csc,
        }
    }
}

/// Result of one multiplication.
pub struct RunOutput {
    pub c: CsrMatrix,
    pub stats: MultiplyStats,
    pub report: PhaseReport,
}

/// Runs `algo` once on `threads` workers. For the column algorithms the
/// merge is reported under the expand phase and the other numeric phases
/// stay at zero.
pub fn run_once(algo: Algo, ops: &Operands, threads: usize, cfg: &PbConfig) -> Result<RunOutput> {
    match algo {
        Algo::Pb => {
            let cfg = PbConfig {
                nthreads: threads,
                ..cfg.clone()
            };
            let out = pb_multiply(&ops.a_csc, &ops.b_csr, &cfg)?;
            let stats = out.stats(&ops.a_csc, &ops.b_csr);
            Ok(RunOutput {
                c: out.c,
                stats,
                report: out.report,
            })
        }
        Algo::Heap | Algo::Hash => {
            let (c, times, flop) = with_threads(threads, || -> Result<_> {
                let mut times = PhaseTimes::default();
                let sym =
                    times.time(Phase::Symbolic, || column_symbolic(&ops.a_csc, &ops.b_csc))?;
                let c = times.time(Phase::Expand, || match algo {
                    Algo::Heap => heap_multiply_with(&ops.a_csc, &ops.b_csc, &sym),
                    _ => hash_multiply_with(&ops.a_csc, &ops.b_csc, &sym),
                })?;
                Ok((c, times, sym.flop))
            })??;
            let stats = MultiplyStats::new(
                ops.a_csc.nnz() as u64,
                ops.b_csc.nnz() as u64,
                c.nnz() as u64,
                flop,
            )?;
            let report = PhaseReport::new(times, &stats, DEFAULT_BYTES_PER_NONZERO);
            Ok(RunOutput {
                c: c.to_csr(),
                stats,
                report,
            })
        }
    }
}

/// Warm-up run, then the run with the median total time out of
/// [`TIMED_RUNS`].
pub fn run_timed(algo: Algo, ops: &Operands, threads: usize, cfg: &PbConfig) -> Result<RunOutput> {
    run_once(algo, ops, threads, cfg)?;
    let mut runs = (0..TIMED_RUNS)
        .map(|_| run_once(algo, ops, threads, cfg))
        .collect::<Result<Vec<_>>>()?;
    runs.sort_by(|x, y| {
        x.report
            .total_seconds()
            .total_cmp(&y.report.total_seconds())
    });
    Ok(runs.swap_remove(TIMED_RUNS / 2))
}

/// Checks `c` against the dense oracle when it fits, otherwise against
/// `other`'s result.
pub fn spot_check(algo: Algo, ops: &Operands, c: &CsrMatrix, cfg: &PbConfig) -> Result<String> {
    let cells = ops.a.nrows() as u128 * ops.b.ncols() as u128;
    let (expected, against) = if cells <= REFERENCE_MAX_CELLS as u128 {
        (
            reference_multiply(&ops.a, &ops.b)?.to_csr(),
            "dense reference",
        )
    } else {
        let other = if algo == Algo::Hash {
            Algo::Pb
        } else {
            Algo::Hash
        };
        (run_once(other, ops, 1, cfg)?.c, other.name())
    };
    compare_csr(&expected, c, 1e-10)
        .map_err(|e| anyhow!("{algo} disagrees with {against}: {e}"))?;
    Ok(against.to_string())
}

#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub algo: Algo,
    pub matrix: String,
    pub scale: Option<u32>,
    pub edge_factor: Option<usize>,
    pub nthreads: usize,
    pub stats: MultiplyStats,
    pub report: PhaseReport,
    /// Bandwidth used for the predictions, bytes/second.
    pub beta: f64,
}

impl BenchRecord {
    pub fn cf(&self) -> Option<f64> {
        self.stats.cf()
    }

    pub fn flops(&self) -> f64 {
        self.report.flops()
    }

    pub fn ai_upper(&self) -> Option<f64> {
        self.cf().map(|cf| ai_upper(cf, DEFAULT_BYTES_PER_NONZERO))
    }

    pub fn ai_outer_lower(&self) -> Option<f64> {
        self.cf()
            .map(|cf| ai_outer_lower(cf, DEFAULT_BYTES_PER_NONZERO))
    }

    pub fn ai_algo_lower(&self) -> Option<f64> {
        self.cf()
            .map(|cf| self.algo.ai_lower(cf, DEFAULT_BYTES_PER_NONZERO))
    }

    /// `beta * ai_upper(cf, 16)`: the hard bandwidth ceiling, flops/second.
    pub fn peak_flops(&self) -> Option<f64> {
        self.ai_upper().map(|ai| self.beta * ai)
    }

    /// Ceiling predicted by this algorithm's own lower-bound AI.
    pub fn predicted_flops(&self) -> Option<f64> {
        self.ai_algo_lower().map(|ai| self.beta * ai)
    }

    pub fn measured_over_peak(&self) -> Option<f64> {
        self.peak_flops().map(|p| self.flops() / p)
    }

    pub fn measured_over_predicted(&self) -> Option<f64> {
        self.predicted_flops().map(|p| self.flops() / p)
    }

    /// Measured flops stay at or below the bandwidth ceiling. An empty
    /// product has no ceiling and passes trivially.
    pub fn within_ceiling(&self) -> bool {
        self.peak_flops().is_none_or(|p| self.flops() <= p)
    }
}

#[derive(Clone, Debug)]
pub struct BenchArgs {
    pub algos: Vec<Algo>,
    pub sources: Vec<MatrixSource>,
    pub threads: Vec<usize>,
    pub cfg: PbConfig,
    pub machine: MachineModel,
    pub check: bool,
}

/// Runs every (matrix, algo, threads) combination.
pub fn run_benchmark(
    args: &BenchArgs,
    mut progress: impl FnMut(&BenchRecord),
) -> Result<Vec<BenchRecord>> {
    if args.algos.is_empty() {
        bail!("no algorithms selected");
    }
    let mut records = Vec::new();
    for source in &args.sources {
        let ops = source.load()?;
        if ops.a.ncols() != ops.b.nrows() {
            bail!(
                "{}: cannot multiply {}x{} by {}x{}",
                source.descriptor(),
                ops.a.nrows(),
                ops.a.ncols(),
                ops.b.nrows(),
                ops.b.ncols()
            );
        }
        for &algo in &args.algos {
            for &threads in &args.threads {
                let run = run_timed(algo, &ops, threads, &args.cfg)?;
                if args.check && ops.a.nrows().max(ops.b.ncols()) <= SPOT_CHECK_MAX_N {
                    spot_check(algo, &ops, &run.c, &args.cfg)
                        .with_context(|| format!("spot check on {}", source.descriptor()))?;
                }
                let rec = BenchRecord {
                    algo,
                    matrix: source.descriptor(),
                    scale: source.scale(),
                    edge_factor: source.edge_factor(),
                    nthreads: threads,
                    stats: run.stats,
                    report: run.report,
                    beta: args.machine.beta,
                };
                progress(&rec);
                records.push(rec);
            }
        }
    }
    Ok(records)
}
