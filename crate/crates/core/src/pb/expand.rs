//! Expand phase: outer products of `A(:, i)` and `B(i, :)` streamed into
//! bins through thread-private local bins.

use std::sync::atomic::{AtomicUsize, Ordering};

use super::bins::{BinSet, LocalBins, Record};
use super::key::RadixKey;
use super::symbolic::SymbolicResult;
use super::{PbConfig, EXPANDED_TUPLE_BYTES};
use crate::error::{Error, Result};
use crate::sparse::{CscMatrix, CsrMatrix};

/// Work chunks handed out per worker; chunks are cut so each carries about
/// the same flop.
const CHUNKS_PER_THREAD: usize = 32;

/// Splits `0..k` into contiguous ranges of roughly equal flop.
fn balanced_chunks(per_column_flop: &[u64], flop: u64, nchunks: usize) -> Vec<(usize, usize)> {
    let k = per_column_flop.len();
    let target = flop.div_ceil(nchunks.max(1) as u64).max(1);
    let mut chunks = Vec::with_capacity(nchunks + 1);
    let (mut start, mut acc) = (0usize, 0u64);
    for (i, &f) in per_column_flop.iter().enumerate() {
        acc += f;
        if acc >= target {
            chunks.push((start, i + 1));
            start = i + 1;
            acc = 0;
        }
    }
    if start < k {
        chunks.push((start, k));
    }
    chunks
}

/// Fills `bins` with every product `A(r, i) * B(i, c)` as a packed record
/// in the bin that owns row `r`. Must run inside the rayon pool whose
/// workers should take part.
pub fn expand<K: RadixKey>(
    a: &CscMatrix,
    b: &CsrMatrix,
    sym: &SymbolicResult,
    bins: &mut BinSet<K>,
    cfg: &PbConfig,
) -> Result<()> {
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch {
            left: a.ncols(),
            right: b.nrows(),
        });
    }
    if bins.is_filled() {
        return Err(Error::InternalFault("expand called on filled bins".into()));
    }
    let nbins = bins.nbins();
    let cap = cfg.lbin_bytes / EXPANDED_TUPLE_BYTES;
    let layout = std::sync::Arc::clone(&sym.layout);
    let col_bits = bins.keys().col_bits;
    let nthreads = rayon::current_num_threads();
    let chunks = balanced_chunks(&sym.per_column_flop, sym.flop, nthreads * CHUNKS_PER_THREAD);
    let next_chunk = AtomicUsize::new(0);

    let global = bins.global();
    rayon::broadcast(|_| {
        let mut local = LocalBins::new(&global, nbins, cap);
        loop {
            let claimed = next_chunk.fetch_add(1, Ordering::Relaxed);
            let Some(&(lo, hi)) = chunks.get(claimed) else {
                break;
            };
            for i in lo..hi {
                let (bcols, bvals) = b.row(i);
                if bcols.is_empty() {
                    continue;
                }
                let (arows, avals) = a.col(i);
                for (&r, &av) in arows.iter().zip(avals) {
                    let bin = layout.bin_of(r);
                    let row_part = ((r - layout.bin_base(bin)) as u64) << col_bits;
                    for (&c, &bv) in bcols.iter().zip(bvals) {
                        local.push(bin, Record::new(K::from_u64(row_part | c as u64), av * bv));
                    }
                }
            }
        }
        local.drain();
    });
    let (cursors, overflow) = global.finish();
    bins.seal(cursors, overflow)
}
