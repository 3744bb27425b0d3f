//! Command-line interface of the `spgemm` binary.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use spgemm_core::gen::GenSpec;
use spgemm_core::pb::PbConfig;
use spgemm_core::pool::{available_threads, with_threads};
use spgemm_core::report::Phase;
use spgemm_core::roofline::{
    ai_col_lower, ai_outer_lower, ai_upper, crossover_cf, peak_flops, traffic_model, MachineModel,
};

use crate::output::{emit_csv, emit_plotdata};
use crate::runner::{
    parse_algos, run_benchmark, run_once, spot_check, Algo, BenchArgs, MatrixSource, Operands,
};
use crate::stream::{stream_copy_bench, DEFAULT_STREAM_BYTES, DEFAULT_STREAM_TRIALS};

#[derive(Debug, Parser)]
#[command(
    name = "spgemm",
    version,
    about = "Propagation-blocking SpGEMM and baselines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multiply once and print statistics and phase times.
    Multiply(MultiplyArgs),
    /// Print compression factor and Roofline bounds for a product.
    Analyze(AnalyzeArgs),
    /// Measure sustained copy bandwidth.
    Stream(StreamArgs),
    /// Run a benchmark sweep and write CSV results.
    Bench(BenchCliArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenArg {
    Er,
    Rmat,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Matrix Market file to square.
    #[arg(long, conflicts_with = "gen")]
    pub matrix: Vec<PathBuf>,
    /// Generate operands instead of reading a file.
    #[arg(long, value_enum)]
    pub gen: Option<GenArg>,
    /// log2 of the generated dimension; a comma-separated list for `bench`.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub scale: Vec<u32>,
    /// Nonzeros per column (ER) or per row on average (RMAT).
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub edge_factor: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl SourceArgs {
    pub fn sources(&self) -> Result<Vec<MatrixSource>> {
        let mut out: Vec<MatrixSource> = self
            .matrix
            .iter()
            .cloned()
            .map(MatrixSource::File)
            .collect();
        if let Some(g) = self.gen {
            for &scale in &self.scale {
                for &ef in &self.edge_factor {
                    let spec = match g {
                        GenArg::Er => GenSpec::er(scale, ef, self.seed),
                        GenArg::Rmat => GenSpec::rmat(scale, ef, self.seed),
                    };
                    spec.validate()?;
                    out.push(MatrixSource::Gen(spec));
                }
            }
        }
        if out.is_empty() {
            bail!("give --matrix <path> or --gen {{er|rmat}}");
        }
        Ok(out)
    }

    pub fn single(&self) -> Result<MatrixSource> {
        let mut s = self.sources()?;
        if s.len() != 1 {
            bail!("this command takes exactly one matrix");
        }
        Ok(s.remove(0))
    }
}

#[derive(Debug, Args)]
pub struct PbArgs {
    /// Number of bins (power of two); chosen from the L2 size when absent.
    #[arg(long)]
    pub nbins: Option<usize>,
    /// Size of each thread-local staging bin.
    #[arg(long, default_value_t = PbConfig::default().lbin_bytes)]
    pub lbin_bytes: usize,
    /// Split bins by flop instead of equal row ranges.
    #[arg(long)]
    pub balance_rows: bool,
}

impl PbArgs {
    fn config(&self, nthreads: usize) -> PbConfig {
        PbConfig {
            nbins: self.nbins,
            lbin_bytes: self.lbin_bytes,
            nthreads,
            balance_rows: self.balance_rows,
            ..PbConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct MultiplyArgs {
    #[arg(long, default_value = "pb")]
    pub algo: Algo,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub pb: PbArgs,
    #[arg(long, env = "SPGEMM_THREADS")]
    pub threads: Option<usize>,
    /// Verify the product against the dense oracle or another algorithm.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Sustained memory bandwidth, GB/s.
    #[arg(long)]
    pub beta: f64,
    /// Bytes per stored nonzero.
    #[arg(long, default_value_t = 16.0)]
    pub b_bytes: f64,
    #[arg(long, env = "SPGEMM_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StreamArgs {
    /// Buffer size in bytes; each trial reads and writes it once.
    #[arg(long, default_value_t = DEFAULT_STREAM_BYTES)]
    pub bytes: usize,
    #[arg(long, default_value_t = DEFAULT_STREAM_TRIALS)]
    pub trials: usize,
    #[arg(long, env = "SPGEMM_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchCliArgs {
    #[arg(long, default_value = "pb,heap,hash")]
    pub algos: String,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub pb: PbArgs,
    /// Thread counts to sweep.
    #[arg(long, env = "SPGEMM_THREADS", value_delimiter = ',')]
    pub threads: Vec<usize>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub plotdata: Option<PathBuf>,
    /// Sustained bandwidth in GB/s; measured with the copy kernel when absent.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_STREAM_BYTES)]
    pub stream_bytes: usize,
    /// Compute peak in GFLOPS, adds the flat part of the plotted ceiling.
    #[arg(long)]
    pub peak_gflops: Option<f64>,
    /// Skip the correctness spot check.
    #[arg(long)]
    pub no_check: bool,
}

pub fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Multiply(a) => multiply(a, out),
        Command::Analyze(a) => analyze(a, out),
        Command::Stream(a) => stream(a, out),
        Command::Bench(a) => bench(a, out),
    }
}

fn threads_or_default(t: Option<usize>) -> usize {
    t.unwrap_or_else(available_threads)
}

fn load(src: &MatrixSource) -> Result<Operands> {
    let ops = src.load()?;
    if ops.a.ncols() != ops.b.nrows() {
        bail!(
            "dimension mismatch: {}x{} times {}x{}",
            ops.a.nrows(),
            ops.a.ncols(),
            ops.b.nrows(),
            ops.b.ncols()
        );
    }
    Ok(ops)
}

fn multiply(a: MultiplyArgs, out: &mut impl Write) -> Result<()> {
    let src = a.source.single()?;
    let threads = threads_or_default(a.threads);
    let cfg = a.pb.config(threads);
    let ops = load(&src)?;
    let run = run_once(a.algo, &ops, threads, &cfg)?;
    let s = run.stats;
    writeln!(out, "algo      {}", a.algo)?;
    writeln!(out, "matrix    {}", src.descriptor())?;
    writeln!(
        out,
        "dims      {}x{} * {}x{}",
        ops.a.nrows(),
        ops.a.ncols(),
        ops.b.nrows(),
        ops.b.ncols()
    )?;
    writeln!(out, "threads   {threads}")?;
    writeln!(out, "nnz_a     {}", s.nnz_a)?;
    writeln!(out, "nnz_b     {}", s.nnz_b)?;
    writeln!(out, "nnz_c     {}", s.nnz_c)?;
    writeln!(out, "flop      {}", s.flop)?;
    match s.cf() {
        Some(cf) => writeln!(out, "cf        {cf:.4}")?,
        None => writeln!(out, "cf        -")?,
    }
    for p in Phase::ALL {
        writeln!(
            out,
            "{:<10} {:.6} s",
            format!("t_{}", p.name()),
            run.report.times.get(p)
        )?;
    }
    writeln!(out, "t_total    {:.6} s", run.report.total_seconds())?;
    writeln!(out, "mflops    {:.2}", run.report.flops() / 1e6)?;
    if a.check {
        let against = spot_check(a.algo, &ops, &run.c, &cfg)?;
        writeln!(out, "check     ok (against {against})")?;
    }
    Ok(())
}

fn analyze(a: AnalyzeArgs, out: &mut impl Write) -> Result<()> {
    let src = a.source.single()?;
    let machine = MachineModel::new(a.beta * 1e9, a.b_bytes)?;
    let threads = threads_or_default(a.threads);
    let ops = load(&src)?;
    let run = run_once(Algo::Pb, &ops, threads, &PbConfig::with_threads(threads))?;
    let s = run.stats;
    writeln!(out, "matrix          {}", src.descriptor())?;
    writeln!(out, "nnz_a           {}", s.nnz_a)?;
    writeln!(out, "nnz_b           {}", s.nnz_b)?;
    writeln!(out, "nnz_c           {}", s.nnz_c)?;
    writeln!(out, "flop            {}", s.flop)?;
    let Some(cf) = s.cf() else {
        writeln!(out, "cf              - (empty product)")?;
        return Ok(());
    };
    let b = machine.b;
    let tm = traffic_model(&s, b);
    writeln!(out, "cf              {cf:.4}")?;
    writeln!(out, "ai_upper        {:.6} flops/byte", ai_upper(cf, b))?;
    writeln!(out, "ai_col_lower    {:.6} flops/byte", ai_col_lower(cf, b))?;
    writeln!(
        out,
        "ai_outer_lower  {:.6} flops/byte",
        ai_outer_lower(cf, b)
    )?;
    writeln!(
        out,
        "peak_upper      {:.2} MFLOPS",
        peak_flops(&machine, ai_upper(cf, b)) / 1e6
    )?;
    writeln!(
        out,
        "peak_col        {:.2} MFLOPS",
        peak_flops(&machine, ai_col_lower(cf, b)) / 1e6
    )?;
    writeln!(
        out,
        "peak_outer      {:.2} MFLOPS",
        peak_flops(&machine, ai_outer_lower(cf, b)) / 1e6
    )?;
    writeln!(
        out,
        "favoured        {} (crossover cf = {})",
        if cf > crossover_cf() {
            "outer product"
        } else {
            "column"
        },
        crossover_cf()
    )?;
    writeln!(out, "traffic_expand  {:.0} bytes", tm.expand())?;
    writeln!(out, "traffic_sort    {:.0} bytes", tm.sort_read)?;
    writeln!(out, "traffic_compr   {:.0} bytes", tm.compress_write)?;
    writeln!(out, "traffic_total   {:.0} bytes", tm.total())?;
    Ok(())
}

fn stream(a: StreamArgs, out: &mut impl Write) -> Result<()> {
    let threads = threads_or_default(a.threads);
    let r = with_threads(threads, || stream_copy_bench(a.bytes, a.trials))??;
    writeln!(out, "threads   {threads}")?;
    writeln!(out, "bytes     {}", r.bytes_per_trial)?;
    writeln!(out, "trials    {}", r.seconds.len())?;
    writeln!(out, "median    {:.3} GB/s", r.median() / 1e9)?;
    writeln!(out, "min       {:.3} GB/s", r.min() / 1e9)?;
    writeln!(out, "max       {:.3} GB/s", r.max() / 1e9)?;
    writeln!(out, "stddev    {:.3} GB/s", r.variance().sqrt() / 1e9)?;
    Ok(())
}

fn bench(a: BenchCliArgs, out: &mut impl Write) -> Result<()> {
    let algos = parse_algos(&a.algos)?;
    let sources = a.source.sources()?;
    let threads = if a.threads.is_empty() {
        vec![available_threads()]
    } else {
        a.threads.clone()
    };
    let max_threads = *threads.iter().max().unwrap();
    let beta = match a.beta {
        Some(gb) => gb * 1e9,
        None => {
            let r = with_threads(max_threads, || {
                stream_copy_bench(a.stream_bytes, DEFAULT_STREAM_TRIALS)
            })??;
            writeln!(
                out,
                "# measured copy bandwidth {:.3} GB/s on {max_threads} threads",
                r.median() / 1e9
            )?;
            r.median()
        }
    };
    let machine = MachineModel::with_bandwidth(beta)?;
    let args = BenchArgs {
        algos,
        sources,
        threads,
        cfg: a.pb.config(max_threads),
        machine,
        check: !a.no_check,
    };
    let records = run_benchmark(&args, |r| {
        // Progress output is best effort; a closed pipe must not abort the sweep.
        let _ = writeln!(
            out,
            "{:<5} {:<16} t={:<3} flop={:<12} cf={:<8} {:>10.2} MFLOPS  measured/peak={}",
            r.algo.name(),
            r.matrix,
            r.nthreads,
            r.stats.flop,
            r.cf().map_or("-".into(), |c| format!("{c:.3}")),
            r.flops() / 1e6,
            r.measured_over_peak()
                .map_or("-".into(), |x| format!("{x:.3}")),
        );
    })?;
    emit_csv(&records, &a.out)?;
    if let Some(p) = &a.plotdata {
        emit_plotdata(&records, beta, a.peak_gflops.map(|g| g * 1e9), p)?;
    }
    let over: Vec<_> = records.iter().filter(|r| !r.within_ceiling()).collect();
    if !over.is_empty() {
        bail!("{} run(s) exceeded the bandwidth ceiling", over.len());
    }
    Ok(())
}
