//! Dense-accumulator reference product and result comparison helpers.

use crate::error::{Error, Result};
use crate::sparse::{CooMatrix, CsrMatrix, Index, MatrixDims, Triplet};

/// Largest dense output (`nrows * ncols`) the reference product will build.
pub const REFERENCE_MAX_CELLS: usize = 1 << 24;

/// `C[i][j] = sum_k A[i][k] * B[k][j]` accumulated into a dense array, then
/// sparsified in row-major order with exact zeros dropped.
pub fn reference_multiply(a: &CooMatrix, b: &CooMatrix) -> Result<CooMatrix> {
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch {
            left: a.ncols(),
            right: b.nrows(),
        });
    }
    let (m, n) = (a.nrows(), b.ncols());
    let cells = m as u128 * n as u128;
    if cells > REFERENCE_MAX_CELLS as u128 {
        return Err(Error::OracleTooLarge {
            cells,
            cap: REFERENCE_MAX_CELLS,
        });
    }

    let mut b_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); b.nrows()];
    for t in b.entries() {
        b_rows[t.row as usize].push((t.col as usize, t.value));
    }

    let mut dense = vec![0.0f64; m * n];
    for t in a.entries() {
        let row = &mut dense[t.row as usize * n..(t.row as usize + 1) * n];
        for &(j, bv) in &b_rows[t.col as usize] {
            row[j] += t.value * bv;
        }
    }

    let entries = dense
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(p, &v)| Triplet::new((p / n) as Index, (p % n) as Index, v))
        .collect();
    Ok(CooMatrix::from_parts_unchecked(
        MatrixDims::new(m, n)?,
        entries,
    ))
}

/// `|x - y| <= rel_tol * max(|x|, |y|)`.
pub fn values_close(x: f64, y: f64, rel_tol: f64) -> bool {
    x == y || (x - y).abs() <= rel_tol * x.abs().max(y.abs())
}

/// Checks that two CSR matrices share dimensions and sparsity pattern
/// exactly and that values agree to `rel_tol`. The error names the first
/// difference.
pub fn compare_csr(
    expected: &CsrMatrix,
    actual: &CsrMatrix,
    rel_tol: f64,
) -> std::result::Result<(), String> {
    if expected.dims() != actual.dims() {
        return Err(format!(
            "dims differ: expected {:?}, got {:?}",
            expected.dims(),
            actual.dims()
        ));
    }
    if expected.nnz() != actual.nnz() {
        return Err(format!(
            "nnz differs: expected {}, got {}",
            expected.nnz(),
            actual.nnz()
        ));
    }
    for i in 0..expected.nrows() {
        let (ec, ev) = expected.row(i);
        let (ac, av) = actual.row(i);
        if ec != ac {
            return Err(format!(
                "pattern differs in row {i}: expected {ec:?}, got {ac:?}"
            ));
        }
        for ((&c, &x), &y) in ec.iter().zip(ev).zip(av) {
            if !values_close(x, y, rel_tol) {
                return Err(format!("value at ({i}, {c}): expected {x}, got {y}"));
            }
        }
    }
    Ok(())
}
