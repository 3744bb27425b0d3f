//! Assemble the CSR product from compressed bins.

use rayon::prelude::*;

use super::bins::BinSet;
use super::key::{unpack_raw, RadixKey};
use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, Index, MatrixDims};

/// Splits `data` into consecutive pieces of the given lengths.
fn split_lengths<T>(mut data: &mut [T], lengths: impl IntoIterator<Item = usize>) -> Vec<&mut [T]> {
    let mut out = Vec::new();
    for len in lengths {
        let (head, tail) = data.split_at_mut(len);
        out.push(head);
        data = tail;
    }
    out
}

/// Bins own disjoint ascending row ranges, so visiting them in order gives
/// row-major output; within a bin the sorted keys are already `(row, col)`
/// ordered. Each bin writes its own slice of the output arrays and the row
/// counts of its own rows.
pub fn convert_csr<K: RadixKey>(bins: &BinSet<K>, dims: MatrixDims) -> Result<CsrMatrix> {
    let counts = bins
        .compressed_counts()
        .ok_or_else(|| Error::InternalFault("convert called before compress".into()))?;
    let layout = bins.layout();
    if layout.nrows() != dims.nrows {
        return Err(Error::InternalFault(
            "bin layout and output rows disagree".into(),
        ));
    }
    let nnz: usize = counts.iter().sum();
    let col_bits = bins.keys().col_bits;

    let mut rowptr = vec![0usize; dims.nrows + 1];
    let mut colids = vec![0 as Index; nnz];
    let mut values = vec![0.0f64; nnz];

    let bounds = layout.bounds();
    let row_spans = bounds.windows(2).map(|w| (w[1] - w[0]) as usize);
    let row_slices = split_lengths(&mut rowptr[1..], row_spans);
    let col_slices = split_lengths(&mut colids, counts.iter().copied());
    let val_slices = split_lengths(&mut values, counts.iter().copied());

    row_slices
        .into_par_iter()
        .zip(col_slices)
        .zip(val_slices)
        .enumerate()
        .for_each(|(b, ((row_counts, cols), vals))| {
            let base = layout.bin_base(b);
            for ((rec, c), v) in bins.bin(b).iter().zip(cols.iter_mut()).zip(vals.iter_mut()) {
                let (key, value) = (rec.key, rec.value);
                let (row, col) = unpack_raw(key.to_u64(), base, col_bits);
                row_counts[(row - base) as usize] += 1;
                *c = col;
                *v = value;
            }
        });

    for i in 0..dims.nrows {
        rowptr[i + 1] += rowptr[i];
    }
    Ok(CsrMatrix::from_parts_unchecked(
        dims, rowptr, colids, values,
    ))
}
