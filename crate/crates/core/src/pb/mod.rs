//! Outer-product SpGEMM with propagation blocking.
//!
//! `C = A B` with `A` in CSC and `B` in CSR runs as five phases separated by
//! barriers:
//!
//! 1. **symbolic**: flop per inner index from pointer arrays, bin count,
//!    per-bin tuple counts.
//! 2. **expand**: each worker forms outer products `A(:, i) B(i, :)` and
//!    appends `(packed key, value)` records to its private local bins; full
//!    local bins are copied wholesale into the shared global bins, and the
//!    leftovers are drained at the end.
//! 3. **sort**: every bin is radix sorted in place, one bin per task.
//! 4. **compress**: equal keys within a bin are summed with two pointers.
//! 5. **convert**: bins are concatenated in order into CSR.
//!
//! Bins partition output rows into contiguous ranges, so keys only store
//! the row offset inside the bin and usually fit in 32 bits.

mod bins;
mod compress;
mod convert;
mod expand;
mod key;
mod sort;
mod symbolic;

pub use bins::{BinSet, Record};
pub use compress::compress_bin;
pub use convert::convert_csr;
pub use expand::expand;
pub use key::{bits_for, pack_key, unpack_key, KeyLayout, KeyWidth, PackedKey, RadixKey};
pub use sort::{sort_bin, INSERTION_THRESHOLD};
pub use symbolic::{
    choose_nbins, flop_per_inner_index, symbolic, BinLayout, SymbolicResult, MAX_AUTO_BINS,
    MIN_AUTO_BINS,
};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pool::with_threads;
use crate::report::{Phase, PhaseReport, PhaseTimes};
use crate::roofline::{MultiplyStats, DEFAULT_BYTES_PER_NONZERO};
use crate::sparse::{CscMatrix, CsrMatrix, MatrixDims};

/// Size of one unpacked `(rowid, colid, value)` tuple: 4 + 4 + 8 bytes.
pub const EXPANDED_TUPLE_BYTES: usize = 16;

/// One entry of the unmerged product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpandedTuple {
    pub rowid: u32,
    pub colid: u32,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PbConfig {
    /// Global bin count; `None` picks one from flop and `l2_bytes`.
    pub nbins: Option<usize>,
    /// Bytes per thread-private local bin.
    pub lbin_bytes: usize,
    /// Per-core L2 capacity used for bin sizing.
    pub l2_bytes: usize,
    pub nthreads: usize,
    /// Rebuild bins with flop-balanced row ranges when a uniform bin would
    /// not fit in L2.
    pub balance_rows: bool,
}

impl Default for PbConfig {
    fn default() -> Self {
        Self {
            nbins: None,
            lbin_bytes: 512,
            l2_bytes: 1 << 20,
            nthreads: crate::pool::available_threads(),
            balance_rows: false,
        }
    }
}

impl PbConfig {
    pub fn with_threads(nthreads: usize) -> Self {
        Self {
            nthreads,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(n) = self.nbins {
            if n == 0 || !n.is_power_of_two() {
                return Err(Error::Parameter(format!(
                    "nbins must be a power of two, got {n}"
                )));
            }
        }
        if self.lbin_bytes < EXPANDED_TUPLE_BYTES
            || !self.lbin_bytes.is_multiple_of(EXPANDED_TUPLE_BYTES)
        {
            return Err(Error::Parameter(format!(
                "local bin size {} is not a positive multiple of {EXPANDED_TUPLE_BYTES} bytes",
                self.lbin_bytes
            )));
        }
        if self.nthreads == 0 {
            return Err(Error::Parameter("nthreads must be at least 1".into()));
        }
        if self.l2_bytes < 2 {
            return Err(Error::Parameter("l2_bytes must be at least 2".into()));
        }
        Ok(())
    }
}

/// Tuple counts observed between phases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineCounts {
    /// Records in the bins when sorting starts.
    pub expanded: u64,
    /// Records surviving compression, summed over bins.
    pub compressed: u64,
}

#[derive(Clone, Debug)]
pub struct PbProduct {
    pub c: CsrMatrix,
    pub symbolic: SymbolicResult,
    pub report: PhaseReport,
    pub counts: PipelineCounts,
}

impl PbProduct {
    pub fn stats(&self, a: &CscMatrix, b: &CsrMatrix) -> MultiplyStats {
        MultiplyStats {
            nnz_a: a.nnz() as u64,
            nnz_b: b.nnz() as u64,
            nnz_c: self.c.nnz() as u64,
            flop: self.symbolic.flop,
        }
    }
}

/// Multiplies `a * b` on a pool of `cfg.nthreads` workers.
pub fn pb_multiply(a: &CscMatrix, b: &CsrMatrix, cfg: &PbConfig) -> Result<PbProduct> {
    cfg.validate()?;
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch {
            left: a.ncols(),
            right: b.nrows(),
        });
    }
    with_threads(cfg.nthreads, || {
        let mut times = PhaseTimes::default();
        let sym = times.time(Phase::Symbolic, || symbolic(a, b, cfg))?;
        match sym.keys.width {
            KeyWidth::W32 => run_numeric::<u32>(a, b, cfg, sym, times),
            KeyWidth::W64 => run_numeric::<u64>(a, b, cfg, sym, times),
        }
    })?
}

fn run_numeric<K: RadixKey>(
    a: &CscMatrix,
    b: &CsrMatrix,
    cfg: &PbConfig,
    sym: SymbolicResult,
    mut times: PhaseTimes,
) -> Result<PbProduct> {
    let dims = MatrixDims::new(a.nrows(), b.ncols())?;

    let bins = times.time(Phase::Expand, || -> Result<BinSet<K>> {
        let mut bins = BinSet::<K>::allocate(&sym)?;
        expand(a, b, &sym, &mut bins, cfg)?;
        Ok(bins)
    });
    let mut bins = bins?;
    let expanded = bins.total_tuples() as u64;
    if expanded != sym.flop {
        return Err(Error::InternalFault(format!(
            "expand produced {expanded} tuples, symbolic counted {}",
            sym.flop
        )));
    }

    times.time(Phase::Sort, || {
        bins.bins_mut()
            .into_par_iter()
            .for_each(|bin| sort_bin(bin));
    });
    let counts: Vec<usize> = times.time(Phase::Compress, || {
        bins.bins_mut()
            .into_par_iter()
            .map(|bin| compress_bin(bin))
            .collect()
    });
    let compressed = counts.iter().sum::<usize>() as u64;
    bins.set_counts(counts);

    let c = times.time(Phase::Convert, || convert_csr(&bins, dims))?;
    drop(bins);

    let stats = MultiplyStats {
        nnz_a: a.nnz() as u64,
        nnz_b: b.nnz() as u64,
        nnz_c: c.nnz() as u64,
        flop: sym.flop,
    };
    let report = PhaseReport::new(times, &stats, DEFAULT_BYTES_PER_NONZERO);
    Ok(PbProduct {
        c,
        symbolic: sym,
        report,
        counts: PipelineCounts {
            expanded,
            compressed,
        },
    })
}
