//! Column-by-column SpGEMM baselines with heap and hash accumulators.
//!
//! Both compute `C(:, j) = sum_{i : B(i,j) != 0} A(:, i) * B(i, j)` with
//! `A` and `B` in CSC. Columns are independent; workers take chunks of
//! [`COLUMN_CHUNK`] columns and keep their accumulator private. Output is
//! assembled in two passes: per-chunk results first, then a prefix sum and
//! a disjoint parallel copy.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sparse::{CscMatrix, Index, MatrixDims};

pub const COLUMN_CHUNK: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnSymbolic {
    pub per_column_flop: Vec<u64>,
    pub flop: u64,
}

fn check_dims(a: &CscMatrix, b: &CscMatrix) -> Result<()> {
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch {
            left: a.ncols(),
            right: b.nrows(),
        });
    }
    Ok(())
}

/// `per_column_flop[j] = sum over B(i, j) != 0 of nnz(A(:, i))`. This is
/// also the upper bound on `nnz(C(:, j))`.
pub fn column_symbolic(a: &CscMatrix, b: &CscMatrix) -> Result<ColumnSymbolic> {
    check_dims(a, b)?;
    let per_column_flop: Vec<u64> = (0..b.ncols())
        .into_par_iter()
        .map(|j| {
            b.col(j)
                .0
                .iter()
                .map(|&i| a.col_nnz(i as usize) as u64)
                .sum()
        })
        .collect();
    let flop = per_column_flop
        .iter()
        .try_fold(0u64, |acc, &f| acc.checked_add(f))
        .ok_or(Error::FlopOverflow)?;
    Ok(ColumnSymbolic {
        per_column_flop,
        flop,
    })
}

/// Output of one chunk of columns.
#[derive(Default)]
struct ChunkOut {
    col_nnz: Vec<usize>,
    rowids: Vec<Index>,
    values: Vec<f64>,
}

trait ColumnAccumulator: Send {
    /// Appends column `j` of `A * B` to `out`, ascending by row.
    fn column(&mut self, a: &CscMatrix, b: &CscMatrix, j: usize, flop_j: u64, out: &mut ChunkOut);
}

fn multiply_by_columns<T: ColumnAccumulator>(
    a: &CscMatrix,
    b: &CscMatrix,
    sym: &ColumnSymbolic,
    init: impl Fn() -> T + Sync + Send,
) -> Result<CscMatrix> {
    let n = b.ncols();
    let nchunks = n.div_ceil(COLUMN_CHUNK);
    let chunks: Vec<ChunkOut> = (0..nchunks)
        .into_par_iter()
        .with_max_len(1)
        .map_init(init, |acc, ch| {
            let mut out = ChunkOut::default();
            for j in ch * COLUMN_CHUNK..((ch + 1) * COLUMN_CHUNK).min(n) {
                let before = out.rowids.len();
                acc.column(a, b, j, sym.per_column_flop[j], &mut out);
                out.col_nnz.push(out.rowids.len() - before);
            }
            out
        })
        .collect();

    let mut colptr = Vec::with_capacity(n + 1);
    colptr.push(0usize);
    for ch in &chunks {
        for &c in &ch.col_nnz {
            colptr.push(colptr.last().unwrap() + c);
        }
    }
    let nnz = *colptr.last().unwrap();
    let mut rowids = vec![0 as Index; nnz];
    let mut values = vec![0.0f64; nnz];

    let mut row_rest: &mut [Index] = &mut rowids;
    let mut val_rest: &mut [f64] = &mut values;
    let mut pieces = Vec::with_capacity(chunks.len());
    for ch in &chunks {
        let (r, rr) = row_rest.split_at_mut(ch.rowids.len());
        let (v, vr) = val_rest.split_at_mut(ch.values.len());
        pieces.push((ch, r, v));
        row_rest = rr;
        val_rest = vr;
    }
    pieces.into_par_iter().for_each(|(ch, r, v)| {
        r.copy_from_slice(&ch.rowids);
        v.copy_from_slice(&ch.values);
    });

    Ok(CscMatrix::from_parts_unchecked(
        MatrixDims::new(a.nrows(), b.ncols())?,
        colptr,
        rowids,
        values,
    ))
}

/// Heap item: the next row of one contributing column of `A`. Ordered so
/// that `BinaryHeap` pops the smallest row first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeapEntry {
    pub rowid: Index,
    /// Index into the column's list of contributing `A` columns.
    pub list: u32,
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .rowid
            .cmp(&self.rowid)
            .then_with(|| other.list.cmp(&self.list))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Default)]
struct HeapAccumulator {
    heap: BinaryHeap<HeapEntry>,
    /// Per contributing column: (cursor, end, scale).
    lists: Vec<(usize, usize, f64)>,
}

impl ColumnAccumulator for HeapAccumulator {
    fn column(&mut self, a: &CscMatrix, b: &CscMatrix, j: usize, _flop_j: u64, out: &mut ChunkOut) {
        self.heap.clear();
        self.lists.clear();
        let (brows, bvals) = b.col(j);
        for (&i, &bv) in brows.iter().zip(bvals) {
            let (start, end) = (a.colptr()[i as usize], a.colptr()[i as usize + 1]);
            if start < end {
                self.heap.push(HeapEntry {
                    rowid: a.rowids()[start],
                    list: self.lists.len() as u32,
                });
                self.lists.push((start, end, bv));
            }
        }
        let col_start = out.rowids.len();
        while let Some(HeapEntry { rowid, list }) = self.heap.pop() {
            let (cursor, end, scale) = &mut self.lists[list as usize];
            let v = a.values()[*cursor] * *scale;
            if out.rowids.len() > col_start && *out.rowids.last().unwrap() == rowid {
                *out.values.last_mut().unwrap() += v;
            } else {
                out.rowids.push(rowid);
                out.values.push(v);
            }
            *cursor += 1;
            if *cursor < *end {
                self.heap.push(HeapEntry {
                    rowid: a.rowids()[*cursor],
                    list,
                });
            }
        }
    }
}

/// Column SpGEMM merging the scaled columns of `A` with a min-heap on row
/// index.
pub fn heap_multiply(a: &CscMatrix, b: &CscMatrix) -> Result<CscMatrix> {
    let sym = column_symbolic(a, b)?;
    heap_multiply_with(a, b, &sym)
}

/// [`heap_multiply`] reusing a precomputed [`ColumnSymbolic`].
pub fn heap_multiply_with(a: &CscMatrix, b: &CscMatrix, sym: &ColumnSymbolic) -> Result<CscMatrix> {
    check_dims(a, b)?;
    multiply_by_columns(a, b, sym, HeapAccumulator::default)
}

const EMPTY: Index = Index::MAX;

/// Open addressing with linear probing. The table for a column has
/// `next_pow2(2 * flop_j)` slots, so the load factor stays at or below 0.5.
#[derive(Default)]
struct HashAccumulator {
    keys: Vec<Index>,
    vals: Vec<f64>,
    used: Vec<usize>,
    scratch: Vec<(Index, f64)>,
}

impl HashAccumulator {
    #[inline]
    fn slot(row: Index, bits: u32) -> usize {
        (row.wrapping_mul(0x9E37_79B1) >> (32 - bits)) as usize
    }
}

impl ColumnAccumulator for HashAccumulator {
    fn column(&mut self, a: &CscMatrix, b: &CscMatrix, j: usize, flop_j: u64, out: &mut ChunkOut) {
        if flop_j == 0 {
            return;
        }
        let size = (2 * flop_j as usize).next_power_of_two();
        let bits = size.trailing_zeros();
        if self.keys.len() < size {
            self.keys.resize(size, EMPTY);
            self.vals.resize(size, 0.0);
        }
        let mask = size - 1;

        let (brows, bvals) = b.col(j);
        for (&i, &bv) in brows.iter().zip(bvals) {
            let (arows, avals) = a.col(i as usize);
            for (&r, &av) in arows.iter().zip(avals) {
                let mut s = Self::slot(r, bits);
                loop {
                    let k = self.keys[s];
                    if k == r {
                        self.vals[s] += av * bv;
                        break;
                    }
                    if k == EMPTY {
                        self.keys[s] = r;
                        self.vals[s] = av * bv;
                        self.used.push(s);
                        break;
                    }
                    s = (s + 1) & mask;
                }
            }
        }

        self.scratch.clear();
        for &s in &self.used {
            self.scratch.push((self.keys[s], self.vals[s]));
            self.keys[s] = EMPTY;
        }
        self.used.clear();
        self.scratch.sort_unstable_by_key(|&(r, _)| r);
        for &(r, v) in &self.scratch {
            out.rowids.push(r);
            out.values.push(v);
        }
    }
}

/// Column SpGEMM accumulating each output column in a hash table keyed by
/// row index.
pub fn hash_multiply(a: &CscMatrix, b: &CscMatrix) -> Result<CscMatrix> {
    let sym = column_symbolic(a, b)?;
    hash_multiply_with(a, b, &sym)
}

/// [`hash_multiply`] reusing a precomputed [`ColumnSymbolic`].
pub fn hash_multiply_with(a: &CscMatrix, b: &CscMatrix, sym: &ColumnSymbolic) -> Result<CscMatrix> {
    check_dims(a, b)?;
    multiply_by_columns(a, b, sym, HashAccumulator::default)
}
