//! Symbolic phase: flop count, bin count and bin sizing from pointer arrays.

use std::sync::Arc;

use rayon::prelude::*;

use super::key::{KeyLayout, KeyWidth};
use super::PbConfig;
use crate::error::{Error, Result};
use crate::sparse::{CscMatrix, CsrMatrix, Index};

pub const MIN_AUTO_BINS: usize = 64;
pub const MAX_AUTO_BINS: usize = 8192;

/// Assignment of output rows to bins. Bin `b` owns rows
/// `bounds[b]..bounds[b + 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinLayout {
    nrows: usize,
    bounds: Vec<Index>,
    mapping: RowMapping,
}

#[derive(Clone, Debug, PartialEq)]
enum RowMapping {
    /// `bin = row / rows_per_bin`.
    Uniform { rows_per_bin: u32 },
    /// Explicit per-row lookup for balanced variable-width bins.
    Table(Vec<u32>),
}

impl BinLayout {
    pub fn uniform(nrows: usize, nbins: usize) -> Self {
        let rows_per_bin = nrows.div_ceil(nbins).max(1);
        let bounds = (0..=nbins)
            .map(|b| (b * rows_per_bin).min(nrows) as Index)
            .collect();
        Self {
            nrows,
            bounds,
            mapping: RowMapping::Uniform {
                rows_per_bin: rows_per_bin as u32,
            },
        }
    }

    /// Variable-width bins with roughly equal flop each, from a prefix scan
    /// over per-row flop.
    pub fn balanced(per_row_flop: &[u64], nbins: usize) -> Self {
        let nrows = per_row_flop.len();
        let total: u64 = per_row_flop.iter().sum();
        let mut bounds = Vec::with_capacity(nbins + 1);
        bounds.push(0 as Index);
        let mut acc = 0u64;
        let mut next_bin = 1usize;
        for (r, &f) in per_row_flop.iter().enumerate() {
            acc += f;
            // Close every bin whose flop target the prefix has now reached.
            while next_bin < nbins
                && acc as u128 * nbins as u128 >= total as u128 * next_bin as u128
            {
                bounds.push((r + 1) as Index);
                next_bin += 1;
            }
        }
        while bounds.len() < nbins + 1 {
            bounds.push(nrows as Index);
        }
        *bounds.last_mut().unwrap() = nrows as Index;

        let mut table = vec![0u32; nrows];
        for b in 0..nbins {
            for row in bounds[b]..bounds[b + 1] {
                table[row as usize] = b as u32;
            }
        }
        Self {
            nrows,
            bounds,
            mapping: RowMapping::Table(table),
        }
    }

    pub fn nbins(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn bounds(&self) -> &[Index] {
        &self.bounds
    }

    /// `Some(rows_per_bin)` for the uniform layout.
    pub fn rows_per_bin(&self) -> Option<usize> {
        match self.mapping {
            RowMapping::Uniform { rows_per_bin } => Some(rows_per_bin as usize),
            RowMapping::Table(_) => None,
        }
    }

    #[inline]
    pub fn bin_of(&self, row: Index) -> usize {
        match &self.mapping {
            RowMapping::Uniform { rows_per_bin } => (row / rows_per_bin) as usize,
            RowMapping::Table(t) => t[row as usize] as usize,
        }
    }

    #[inline]
    pub fn bin_base(&self, bin: usize) -> Index {
        self.bounds[bin]
    }

    pub fn max_rows_in_bin(&self) -> usize {
        self.bounds
            .windows(2)
            .map(|w| (w[1] - w[0]) as usize)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct SymbolicResult {
    pub flop: u64,
    /// `nnz(A(:, i)) * nnz(B(i, :))` for every inner index `i`.
    pub per_column_flop: Vec<u64>,
    pub nbins: usize,
    pub per_bin_flop: Vec<u64>,
    pub layout: Arc<BinLayout>,
    pub keys: KeyLayout,
}

impl SymbolicResult {
    /// Bytes of one stored (key, value) record.
    pub fn record_bytes(&self) -> usize {
        self.keys.width.bytes() + 8
    }
}

/// Picks a power-of-two bin count so that one bin of sorted records fills
/// at most half of L2: `next_pow2(flop * tuple_bytes / (l2_bytes / 2))`,
/// clamped to `[64, 8192]` and then to the largest power of two `<= nrows`.
pub fn choose_nbins(flop: u64, nrows: usize, sorted_tuple_bytes: usize, l2_bytes: usize) -> usize {
    let half_l2 = (l2_bytes / 2).max(1) as u128;
    let raw = (flop as u128 * sorted_tuple_bytes as u128).div_ceil(half_l2);
    let raw = raw.min(MAX_AUTO_BINS as u128) as usize;
    let mut nbins = raw
        .max(1)
        .next_power_of_two()
        .clamp(MIN_AUTO_BINS, MAX_AUTO_BINS);
    while nbins > nrows.max(1) {
        nbins /= 2;
    }
    nbins
}

fn check_dims(a: &CscMatrix, b: &CsrMatrix) -> Result<()> {
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch {
            left: a.ncols(),
            right: b.nrows(),
        });
    }
    Ok(())
}

/// Flop per inner index and the total, from the pointer arrays alone.
pub fn flop_per_inner_index(a: &CscMatrix, b: &CsrMatrix) -> Result<(Vec<u64>, u64)> {
    check_dims(a, b)?;
    let per: Vec<u64> = (0..a.ncols())
        .into_par_iter()
        .map(|i| (a.col_nnz(i) as u64).checked_mul(b.row_nnz(i) as u64))
        .collect::<Option<_>>()
        .ok_or(Error::FlopOverflow)?;
    let flop = per
        .iter()
        .try_fold(0u64, |acc, &f| acc.checked_add(f))
        .ok_or(Error::FlopOverflow)?;
    Ok((per, flop))
}

/// Tuples each bin will receive: every entry of `A(:, i)` contributes
/// `nnz(B(i, :))` tuples to its row's bin.
fn flop_per_bin(a: &CscMatrix, b: &CsrMatrix, layout: &BinLayout) -> Vec<u64> {
    let nbins = layout.nbins();
    (0..a.ncols())
        .into_par_iter()
        .fold(
            || vec![0u64; nbins],
            |mut acc, i| {
                let fan = b.row_nnz(i) as u64;
                if fan > 0 {
                    for &r in a.col(i).0 {
                        acc[layout.bin_of(r)] += fan;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; nbins],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(p, q)| *p += q);
                x
            },
        )
}

fn flop_per_row(a: &CscMatrix, b: &CsrMatrix) -> Vec<u64> {
    let mut per_row = vec![0u64; a.nrows()];
    for i in 0..a.ncols() {
        let fan = b.row_nnz(i) as u64;
        if fan > 0 {
            for &r in a.col(i).0 {
                per_row[r as usize] += fan;
            }
        }
    }
    per_row
}

/// Sizes the expanded matrix and its bins. Runs on the ambient rayon pool.
pub fn symbolic(a: &CscMatrix, b: &CsrMatrix, cfg: &PbConfig) -> Result<SymbolicResult> {
    cfg.validate()?;
    let (per_column_flop, flop) = flop_per_inner_index(a, b)?;
    let nrows = a.nrows();
    let ncols = b.ncols();

    let nbins = match cfg.nbins {
        Some(n) => n,
        None => {
            // Try 4-byte keys first; widen the record estimate if the bin
            // count that results still needs 8-byte keys.
            let narrow = choose_nbins(flop, nrows, KeyWidth::W32.bytes() + 8, cfg.l2_bytes);
            let keys = KeyLayout::new(nrows.div_ceil(narrow), ncols);
            if keys.width == KeyWidth::W32 {
                narrow
            } else {
                choose_nbins(flop, nrows, KeyWidth::W64.bytes() + 8, cfg.l2_bytes)
            }
        }
    };

    let mut layout = BinLayout::uniform(nrows, nbins);
    let mut per_bin_flop = flop_per_bin(a, b, &layout);

    if cfg.balance_rows {
        let record = KeyLayout::new(layout.max_rows_in_bin(), ncols)
            .width
            .bytes()
            + 8;
        let oversized = per_bin_flop
            .iter()
            .any(|&f| f as u128 * record as u128 > cfg.l2_bytes as u128);
        if oversized {
            layout = BinLayout::balanced(&flop_per_row(a, b), nbins);
            per_bin_flop = flop_per_bin(a, b, &layout);
        }
    }

    let keys = KeyLayout::new(layout.max_rows_in_bin(), ncols);
    Ok(SymbolicResult {
        flop,
        per_column_flop,
        nbins,
        per_bin_flop,
        layout: Arc::new(layout),
        keys,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{CooMatrix, MatrixDims, Triplet};

    fn dense(n: usize) -> CooMatrix {
        let mut e = Vec::new();
        for i in 0..n as Index {
            for j in 0..n as Index {
                e.push(Triplet::new(i, j, 1.0));
            }
        }
        CooMatrix::new(MatrixDims::square(n).unwrap(), e).unwrap()
    }

    #[test]
    fn identity_flop() {
        let i4 = CooMatrix::identity(4).unwrap();
        let s = symbolic(&i4.to_csc(), &i4.to_csr(), &PbConfig::default()).unwrap();
        assert_eq!(s.flop, 4);
        assert_eq!(s.per_column_flop, vec![1, 1, 1, 1]);
        assert_eq!(s.per_bin_flop.iter().sum::<u64>(), 4);
    }

    #[test]
    fn dense_2x2_flop() {
        let d = dense(2);
        let s = symbolic(&d.to_csc(), &d.to_csr(), &PbConfig::default()).unwrap();
        assert_eq!(s.flop, 8);
    }

    #[test]
    fn nbins_formula() {
        assert_eq!(choose_nbins(16 << 20, 1 << 20, 12, 1 << 20), 512);
        assert_eq!(choose_nbins(0, 1 << 20, 12, 1 << 20), 64);
        assert_eq!(choose_nbins(0, 40, 12, 1 << 20), 32);
        assert_eq!(choose_nbins(u64::MAX / 2, 1 << 30, 16, 1 << 20), 8192);
        assert_eq!(choose_nbins(100, 1, 12, 1 << 20), 1);
    }

    #[test]
    fn worked_bin_sizing() {
        // 16M tuples over 1K bins of 12-byte records: 192 KB each.
        let flop: u64 = 16 << 20;
        let per_bin = flop / 1024;
        assert_eq!(per_bin, 16 << 10);
        assert_eq!(per_bin * 12, 192 << 10);
        assert!(per_bin * 12 <= 1 << 20);
    }

    #[test]
    fn uniform_layout() {
        let l = BinLayout::uniform(10, 4);
        assert_eq!(l.rows_per_bin(), Some(3));
        assert_eq!(l.bounds(), &[0, 3, 6, 9, 10]);
        assert_eq!(l.bin_of(9), 3);
        assert_eq!(l.bin_of(5), 1);
        let l = BinLayout::uniform(3, 8);
        assert_eq!(l.bounds(), &[0, 1, 2, 3, 3, 3, 3, 3, 3]);
    }

    #[test]
    fn balanced_layout_covers_rows() {
        let per_row = [100, 1, 1, 1, 1, 1, 1, 100, 1, 1];
        let l = BinLayout::balanced(&per_row, 4);
        assert_eq!(l.nbins(), 4);
        assert_eq!(l.bounds()[0], 0);
        assert_eq!(*l.bounds().last().unwrap(), 10);
        assert!(l.bounds().windows(2).all(|w| w[0] <= w[1]));
        for r in 0..10u32 {
            let b = l.bin_of(r);
            assert!(l.bounds()[b] <= r && r < l.bounds()[b + 1]);
        }
    }

    #[test]
    fn balanced_layout_all_zero_flop() {
        let l = BinLayout::balanced(&[0; 5], 4);
        assert_eq!(*l.bounds().last().unwrap(), 5);
        assert_eq!(l.nbins(), 4);
    }

    #[test]
    fn dimension_mismatch() {
        let a = CooMatrix::empty(MatrixDims::new(2, 3).unwrap());
        let b = CooMatrix::empty(MatrixDims::new(2, 3).unwrap());
        assert!(matches!(
            symbolic(&a.to_csc(), &b.to_csr(), &PbConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
