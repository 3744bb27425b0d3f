//! Sparse storage formats: coordinate (COO), compressed sparse column (CSC)
//! and compressed sparse row (CSR).
//!
//! Indices are 32-bit unsigned and values are `f64`, so one COO nonzero
//! occupies 16 bytes. Dimensions are capped at 2^31.

use crate::error::{Error, Result};

/// Row or column index of a stored nonzero.
pub type Index = u32;

/// Largest supported row or column count.
pub const MAX_DIM: usize = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatrixDims {
    pub nrows: usize,
    pub ncols: usize,
}

impl MatrixDims {
    pub fn new(nrows: usize, ncols: usize) -> Result<Self> {
        if nrows == 0 || ncols == 0 {
            return Err(Error::Structural(format!(
                "dimensions must be at least 1x1, got {nrows}x{ncols}"
            )));
        }
        if nrows > MAX_DIM || ncols > MAX_DIM {
            return Err(Error::Structural(format!(
                "dimensions {nrows}x{ncols} exceed the 2^31 cap"
            )));
        }
        Ok(Self { nrows, ncols })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn transposed(self) -> Self {
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
        }
    }
}

/// One `(row, col, value)` entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triplet {
    pub row: Index,
    pub col: Index,
    pub value: f64,
}

impl Triplet {
    pub fn new(row: Index, col: Index, value: f64) -> Self {
        Self { row, col, value }
    }
}

/// Coordinate-format matrix. Entries may be unsorted and may repeat a
/// position; repeated positions are summed on conversion.
#[derive(Clone, Debug, PartialEq)]
pub struct CooMatrix {
    dims: MatrixDims,
    entries: Vec<Triplet>,
}

impl CooMatrix {
    pub fn new(dims: MatrixDims, entries: Vec<Triplet>) -> Result<Self> {
        for (pos, t) in entries.iter().enumerate() {
            check_entry(dims, t).map_err(|msg| Error::Structural(format!("entry {pos}: {msg}")))?;
        }
        Ok(Self { dims, entries })
    }

    pub(crate) fn from_parts_unchecked(dims: MatrixDims, entries: Vec<Triplet>) -> Self {
        debug_assert!(entries.iter().all(|t| check_entry(dims, t).is_ok()));
        Self { dims, entries }
    }

    pub fn empty(dims: MatrixDims) -> Self {
        Self {
            dims,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Result<Self> {
        let dims = MatrixDims::square(n)?;
        let entries = (0..n as Index).map(|i| Triplet::new(i, i, 1.0)).collect();
        Ok(Self { dims, entries })
    }

    pub fn dims(&self) -> MatrixDims {
        self.dims
    }

    pub fn nrows(&self) -> usize {
        self.dims.nrows
    }

    pub fn ncols(&self) -> usize {
        self.dims.ncols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Triplet] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Triplet> {
        self.entries
    }

    pub fn to_csc(&self) -> CscMatrix {
        coo_to_csc(self)
    }

    pub fn to_csr(&self) -> CsrMatrix {
        coo_to_csr(self)
    }

    pub fn transpose(&self) -> CooMatrix {
        let entries = self
            .entries
            .iter()
            .map(|t| Triplet::new(t.col, t.row, t.value))
            .collect();
        Self {
            dims: self.dims.transposed(),
            entries,
        }
    }
}

fn check_entry(dims: MatrixDims, t: &Triplet) -> std::result::Result<(), String> {
    if t.row as usize >= dims.nrows {
        return Err(format!(
            "row {} out of range for {} rows",
            t.row, dims.nrows
        ));
    }
    if t.col as usize >= dims.ncols {
        return Err(format!(
            "col {} out of range for {} cols",
            t.col, dims.ncols
        ));
    }
    if t.value.is_nan() {
        return Err("NaN value".to_string());
    }
    Ok(())
}

/// Compressed sparse column matrix. Row indices are strictly increasing
/// within each column.
#[derive(Clone, Debug, PartialEq)]
pub struct CscMatrix {
    dims: MatrixDims,
    colptr: Vec<usize>,
    rowids: Vec<Index>,
    values: Vec<f64>,
}

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    dims: MatrixDims,
    rowptr: Vec<usize>,
    colids: Vec<Index>,
    values: Vec<f64>,
}

impl CscMatrix {
    pub fn try_new(
        dims: MatrixDims,
        colptr: Vec<usize>,
        rowids: Vec<Index>,
        values: Vec<f64>,
    ) -> Result<Self> {
        validate_compressed(dims.ncols, dims.nrows, &colptr, &rowids, &values)?;
        Ok(Self {
            dims,
            colptr,
            rowids,
            values,
        })
    }

    pub(crate) fn from_parts_unchecked(
        dims: MatrixDims,
        colptr: Vec<usize>,
        rowids: Vec<Index>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert!(
            validate_compressed(dims.ncols, dims.nrows, &colptr, &rowids, &values).is_ok()
        );
        Self {
            dims,
            colptr,
            rowids,
            values,
        }
    }

    pub fn dims(&self) -> MatrixDims {
        self.dims
    }

    pub fn nrows(&self) -> usize {
        self.dims.nrows
    }

    pub fn ncols(&self) -> usize {
        self.dims.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rowids.len()
    }

    pub fn colptr(&self) -> &[usize] {
        &self.colptr
    }

    pub fn rowids(&self) -> &[Index] {
        &self.rowids
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn col_nnz(&self, j: usize) -> usize {
        self.colptr[j + 1] - self.colptr[j]
    }

    /// Row indices and values of column `j`.
    #[inline]
    pub fn col(&self, j: usize) -> (&[Index], &[f64]) {
        let range = self.colptr[j]..self.colptr[j + 1];
        (&self.rowids[range.clone()], &self.values[range])
    }

    pub fn to_coo(&self) -> CooMatrix {
        let mut entries = Vec::with_capacity(self.nnz());
        for j in 0..self.ncols() {
            let (rows, vals) = self.col(j);
            for (&r, &v) in rows.iter().zip(vals) {
                entries.push(Triplet::new(r, j as Index, v));
            }
        }
        CooMatrix::from_parts_unchecked(self.dims, entries)
    }

    pub fn to_csr(&self) -> CsrMatrix {
        let (rowptr, colids, values) = transpose_compressed(
            self.ncols(),
            self.nrows(),
            &self.colptr,
            &self.rowids,
            &self.values,
        );
        CsrMatrix::from_parts_unchecked(self.dims, rowptr, colids, values)
    }
}

impl CsrMatrix {
    pub fn try_new(
        dims: MatrixDims,
        rowptr: Vec<usize>,
        colids: Vec<Index>,
        values: Vec<f64>,
    ) -> Result<Self> {
        validate_compressed(dims.nrows, dims.ncols, &rowptr, &colids, &values)?;
        Ok(Self {
            dims,
            rowptr,
            colids,
            values,
        })
    }

    pub(crate) fn from_parts_unchecked(
        dims: MatrixDims,
        rowptr: Vec<usize>,
        colids: Vec<Index>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert!(
            validate_compressed(dims.nrows, dims.ncols, &rowptr, &colids, &values).is_ok()
        );
        Self {
            dims,
            rowptr,
            colids,
            values,
        }
    }

    pub fn dims(&self) -> MatrixDims {
        self.dims
    }

    pub fn nrows(&self) -> usize {
        self.dims.nrows
    }

    pub fn ncols(&self) -> usize {
        self.dims.ncols
    }

    pub fn nnz(&self) -> usize {
        self.colids.len()
    }

    pub fn rowptr(&self) -> &[usize] {
        &self.rowptr
    }

    pub fn colids(&self) -> &[Index] {
        &self.colids
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn row_nnz(&self, i: usize) -> usize {
        self.rowptr[i + 1] - self.rowptr[i]
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[Index], &[f64]) {
        let range = self.rowptr[i]..self.rowptr[i + 1];
        (&self.colids[range.clone()], &self.values[range])
    }

    pub fn to_coo(&self) -> CooMatrix {
        let mut entries = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows() {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                entries.push(Triplet::new(i as Index, c, v));
            }
        }
        CooMatrix::from_parts_unchecked(self.dims, entries)
    }

    pub fn to_csc(&self) -> CscMatrix {
        let (colptr, rowids, values) = transpose_compressed(
            self.nrows(),
            self.ncols(),
            &self.rowptr,
            &self.colids,
            &self.values,
        );
        CscMatrix::from_parts_unchecked(self.dims, colptr, rowids, values)
    }
}

/// Builds a column-sorted CSC matrix. Repeated positions are summed in
/// input order.
pub fn coo_to_csc(m: &CooMatrix) -> CscMatrix {
    let (colptr, rowids, values) = compress_triplets(m.ncols(), m.entries(), |t| (t.col, t.row));
    CscMatrix::from_parts_unchecked(m.dims(), colptr, rowids, values)
}

/// Builds a row-sorted CSR matrix. Repeated positions are summed in input
/// order.
pub fn coo_to_csr(m: &CooMatrix) -> CsrMatrix {
    let (rowptr, colids, values) = compress_triplets(m.nrows(), m.entries(), |t| (t.row, t.col));
    CsrMatrix::from_parts_unchecked(m.dims(), rowptr, colids, values)
}

/// Counting sort on the major index, stable sort on the minor index within
/// each major slot, then an in-place merge of repeated minor indices.
fn compress_triplets(
    nmajor: usize,
    entries: &[Triplet],
    key: impl Fn(&Triplet) -> (Index, Index),
) -> (Vec<usize>, Vec<Index>, Vec<f64>) {
    let mut ptr = vec![0usize; nmajor + 1];
    for t in entries {
        ptr[key(t).0 as usize + 1] += 1;
    }
    for i in 0..nmajor {
        ptr[i + 1] += ptr[i];
    }

    let mut slots: Vec<(Index, f64)> = vec![(0, 0.0); entries.len()];
    let mut next = ptr.clone();
    for t in entries {
        let (major, minor) = key(t);
        let dst = &mut next[major as usize];
        slots[*dst] = (minor, t.value);
        *dst += 1;
    }

    let mut out_ptr = Vec::with_capacity(nmajor + 1);
    let mut write = 0usize;
    out_ptr.push(0);
    for i in 0..nmajor {
        let seg = &mut slots[ptr[i]..ptr[i + 1]];
        seg.sort_by_key(|&(minor, _)| minor);
        let mut seg_iter = ptr[i]..ptr[i + 1];
        if let Some(first) = seg_iter.next() {
            slots[write] = slots[first];
            for read in seg_iter {
                let (minor, v) = slots[read];
                if minor == slots[write].0 {
                    slots[write].1 += v;
                } else {
                    write += 1;
                    slots[write] = (minor, v);
                }
            }
            write += 1;
        }
        out_ptr.push(write);
    }
    slots.truncate(write);
    let (idx, vals) = slots.into_iter().unzip();
    (out_ptr, idx, vals)
}

/// Swaps the major and minor orientation of a compressed matrix. Scanning
/// majors in ascending order keeps the output minor indices sorted.
fn transpose_compressed(
    nmajor: usize,
    nminor: usize,
    ptr: &[usize],
    idx: &[Index],
    vals: &[f64],
) -> (Vec<usize>, Vec<Index>, Vec<f64>) {
    let mut out_ptr = vec![0usize; nminor + 1];
    for &i in idx {
        out_ptr[i as usize + 1] += 1;
    }
    for i in 0..nminor {
        out_ptr[i + 1] += out_ptr[i];
    }
    let mut next = out_ptr.clone();
    let mut out_idx = vec![0 as Index; idx.len()];
    let mut out_vals = vec![0.0; idx.len()];
    for major in 0..nmajor {
        for p in ptr[major]..ptr[major + 1] {
            let dst = &mut next[idx[p] as usize];
            out_idx[*dst] = major as Index;
            out_vals[*dst] = vals[p];
            *dst += 1;
        }
    }
    (out_ptr, out_idx, out_vals)
}

fn validate_compressed(
    nmajor: usize,
    nminor: usize,
    ptr: &[usize],
    idx: &[Index],
    vals: &[f64],
) -> Result<()> {
    if ptr.len() != nmajor + 1 {
        return Err(Error::Structural(format!(
            "pointer array has length {}, expected {}",
            ptr.len(),
            nmajor + 1
        )));
    }
    if idx.len() != vals.len() {
        return Err(Error::Structural(format!(
            "{} indices but {} values",
            idx.len(),
            vals.len()
        )));
    }
    if ptr[0] != 0 || ptr[nmajor] != idx.len() {
        return Err(Error::Structural(format!(
            "pointer array must span [0, {}], got [{}, {}]",
            idx.len(),
            ptr[0],
            ptr[nmajor]
        )));
    }
    for m in 0..nmajor {
        if ptr[m] > ptr[m + 1] {
            return Err(Error::Structural(format!("pointer array decreases at {m}")));
        }
        let seg = &idx[ptr[m]..ptr[m + 1]];
        if let Some(&last) = seg.last() {
            if last as usize >= nminor {
                return Err(Error::Structural(format!(
                    "index {last} out of range for {nminor} in slot {m}"
                )));
            }
        }
        if seg.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Structural(format!(
                "indices in slot {m} are not strictly increasing"
            )));
        }
    }
    if vals.iter().any(|v| v.is_nan()) {
        return Err(Error::Structural("NaN value".to_string()));
    }
    Ok(())
}
