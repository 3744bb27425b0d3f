#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spgemm_core::{CooMatrix, Index, MatrixDims, Triplet};

/// Random COO with `nnz` entries (repeats allowed) and values in [0.5, 1.5).
pub fn random_coo(nrows: usize, ncols: usize, nnz: usize, seed: u64) -> CooMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..nnz)
        .map(|_| {
            Triplet::new(
                rng.gen_range(0..nrows) as Index,
                rng.gen_range(0..ncols) as Index,
                rng.gen_range(0.5..1.5),
            )
        })
        .collect();
    CooMatrix::new(MatrixDims::new(nrows, ncols).unwrap(), entries).unwrap()
}

/// Sort-and-merge oracle: duplicates summed in input order, row-major.
pub fn merged_triples(entries: &[Triplet]) -> Vec<(Index, Index, f64)> {
    let mut acc: BTreeMap<(Index, Index), f64> = BTreeMap::new();
    for t in entries {
        *acc.entry((t.row, t.col)).or_insert(0.0) += t.value;
    }
    acc.into_iter().map(|((r, c), v)| (r, c, v)).collect()
}

pub fn sorted_triples(m: &CooMatrix) -> Vec<(Index, Index, f64)> {
    let mut v: Vec<_> = m
        .entries()
        .iter()
        .map(|t| (t.row, t.col, t.value))
        .collect();
    v.sort_by_key(|t| (t.0, t.1));
    v
}
