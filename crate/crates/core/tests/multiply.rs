mod common;

use common::random_coo;
use proptest::prelude::*;
use spgemm_core::baseline::{column_symbolic, hash_multiply, heap_multiply};
use spgemm_core::gen::{generate, GenSpec};
use spgemm_core::pb::{expand, pb_multiply, symbolic, BinSet, PbConfig};
use spgemm_core::pool::with_threads;
use spgemm_core::reference::{compare_csr, reference_multiply};
use spgemm_core::{CooMatrix, Index};

/// Naive triple-loop enumeration of every outer-product tuple.
fn naive_expanded(a: &CooMatrix, b: &CooMatrix) -> Vec<(Index, Index, u64)> {
    let mut out = Vec::new();
    for ta in a.entries() {
        for tb in b.entries() {
            if ta.col == tb.row {
                out.push((ta.row, tb.col, (ta.value * tb.value).to_bits()));
            }
        }
    }
    out.sort_unstable();
    out
}

#[test]
fn expanded_multiset_matches_naive_enumeration() {
    let a = random_coo(64, 64, 300, 1);
    let b = random_coo(64, 64, 300, 2);
    let (ac, br) = (a.to_csc(), b.to_csr());
    // Merge duplicates first so both sides enumerate the same operands.
    let (a, b) = (ac.to_coo(), br.to_coo());
    for (nbins, lbin, threads) in [(1, 16, 1), (8, 512, 3), (64, 4096, 4)] {
        let cfg = PbConfig {
            nbins: Some(nbins),
            lbin_bytes: lbin,
            ..PbConfig::with_threads(threads)
        };
        let sym = symbolic(&ac, &br, &cfg).unwrap();
        let mut bins = BinSet::<u32>::allocate(&sym).unwrap();
        with_threads(threads, || expand(&ac, &br, &sym, &mut bins, &cfg))
            .unwrap()
            .unwrap();
        let mut got: Vec<_> = bins
            .expanded_tuples()
            .into_iter()
            .map(|t| (t.rowid, t.colid, t.value.to_bits()))
            .collect();
        got.sort_unstable();
        assert_eq!(got, naive_expanded(&a, &b));
        // partition rule
        for bin in 0..bins.nbins() {
            let lo = sym.layout.bin_base(bin);
            let hi = sym.layout.bounds()[bin + 1];
            assert_eq!(bins.bin(bin).len() as u64, sym.per_bin_flop[bin]);
            let rows_per_bin = sym.layout.rows_per_bin().unwrap() as u32;
            assert_eq!(lo, bin as u32 * rows_per_bin);
            assert!(hi - lo <= rows_per_bin);
        }
    }
}

#[test]
fn pb_matches_dense_oracle_on_random_values() {
    for seed in 0..20u64 {
        let n = 20 + (seed as usize * 7) % 60;
        let a = random_coo(n, n + 3, 4 * n, seed);
        let b = random_coo(n + 3, n / 2 + 1, 4 * n, seed + 100);
        let expected = reference_multiply(&a, &b).unwrap().to_csr();
        let out = pb_multiply(&a.to_csc(), &b.to_csr(), &PbConfig::with_threads(3)).unwrap();
        compare_csr(&expected, &out.c, 1e-10).unwrap();
    }
}

#[test]
fn three_way_cross_check_on_generated_pairs() {
    for seed in 0..40u64 {
        let scale = 4 + (seed % 4) as u32;
        let ef = 2 + (seed as usize % 5);
        let spec = if seed % 2 == 0 {
            GenSpec::er(scale, ef, seed)
        } else {
            GenSpec::rmat(scale, ef, seed)
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec.with_seed(seed + 1000)).unwrap();
        let pb = pb_multiply(&a.to_csc(), &b.to_csr(), &PbConfig::with_threads(2))
            .unwrap()
            .c;
        let heap = heap_multiply(&a.to_csc(), &b.to_csc()).unwrap().to_csr();
        let hash = hash_multiply(&a.to_csc(), &b.to_csc()).unwrap().to_csr();
        compare_csr(&heap, &pb, 1e-10).unwrap();
        compare_csr(&heap, &hash, 1e-10).unwrap();
    }
}

#[test]
fn column_and_outer_symbolic_agree() {
    let a = generate(&GenSpec::rmat(9, 8, 4)).unwrap();
    let b = generate(&GenSpec::rmat(9, 8, 5)).unwrap();
    let col = column_symbolic(&a.to_csc(), &b.to_csc()).unwrap();
    let outer = symbolic(&a.to_csc(), &b.to_csr(), &PbConfig::default()).unwrap();
    assert_eq!(col.flop, outer.flop);
    assert_eq!(col.per_column_flop.iter().sum::<u64>(), col.flop);
    assert_eq!(outer.per_column_flop.iter().sum::<u64>(), outer.flop);
    assert_eq!(outer.per_bin_flop.iter().sum::<u64>(), outer.flop);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pipeline_invariants(
        m in 1usize..48, k in 1usize..48, n in 1usize..48,
        nnz_a in 0usize..200, nnz_b in 0usize..200,
        nbins_log in 0u32..7, lbin_tuples in 1usize..40, threads in 1usize..5,
        seed in any::<u64>(),
    ) {
        let a = random_coo(m, k, nnz_a, seed);
        let b = random_coo(k, n, nnz_b, seed ^ 0xabcdef);
        let cfg = PbConfig {
            nbins: Some(1 << nbins_log),
            lbin_bytes: 16 * lbin_tuples,
            ..PbConfig::with_threads(threads)
        };
        let out = pb_multiply(&a.to_csc(), &b.to_csr(), &cfg).unwrap();
        prop_assert_eq!(out.counts.expanded, out.symbolic.flop);
        prop_assert_eq!(out.counts.compressed, out.c.nnz() as u64);
        prop_assert!(out.symbolic.flop >= out.c.nnz() as u64);

        // Value conservation: sum over the expanded matrix equals sum over C.
        let (ac, br) = (a.to_csc(), b.to_csr());
        let mut expanded_sum = 0.0;
        for i in 0..k {
            let (_, av) = ac.col(i);
            let (_, bv) = br.row(i);
            expanded_sum += av.iter().sum::<f64>() * bv.iter().sum::<f64>();
        }
        let c_sum: f64 = out.c.values().iter().sum();
        prop_assert!((expanded_sum - c_sum).abs() <= 1e-9 * expanded_sum.abs().max(1.0));

        let expected = reference_multiply(&a, &b).unwrap().to_csr();
        prop_assert!(compare_csr(&expected, &out.c, 1e-10).is_ok());
    }
}
