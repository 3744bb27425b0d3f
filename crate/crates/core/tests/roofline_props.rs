use proptest::prelude::*;
use spgemm_core::roofline::*;

proptest! {
    #[test]
    fn bound_ordering(cf in 1.0f64..1e4, b in 0.1f64..64.0) {
        let (lo, mid, hi) = (ai_outer_lower(cf, b), ai_col_lower(cf, b), ai_upper(cf, b));
        prop_assert!(lo < mid && mid < hi);
    }

    #[test]
    fn monotone_in_cf(cf in 1.0f64..1e3, step in 0.01f64..10.0, b in 1.0f64..32.0) {
        prop_assert!(ai_upper(cf + step, b) > ai_upper(cf, b));
        prop_assert!(ai_col_lower(cf + step, b) > ai_col_lower(cf, b));
        prop_assert!(ai_outer_lower(cf + step, b) > ai_outer_lower(cf, b));
        prop_assert!(outer_to_col_ratio(cf + step) < outer_to_col_ratio(cf));
    }

    #[test]
    fn outer_bound_is_flop_over_traffic(nnz_c in 1u64..1_000_000, cf_int in 1u64..64, b in 1.0f64..32.0) {
        // With nnz(A) = nnz(B) = nnz(C) = flop / cf the traffic model reproduces
        // the closed-form outer-product bound.
        let flop = nnz_c * cf_int;
        let stats = MultiplyStats::new(nnz_c, nnz_c, nnz_c, flop).unwrap();
        let cf = stats.cf().unwrap();
        let via_traffic = flop as f64 / traffic_model(&stats, b).total();
        let closed = ai_outer_lower(cf, b);
        prop_assert!((via_traffic - closed).abs() <= 1e-12 * closed);
    }
}

#[test]
fn er_cf_one_traffic_is_five_b_per_flop() {
    let stats = MultiplyStats::new(1000, 1000, 1000, 1000).unwrap();
    let t = traffic_model(&stats, 16.0);
    assert_eq!(t.total() / stats.flop as f64, 80.0);
    assert_eq!(
        1.0 / (t.total() / stats.flop as f64),
        ai_outer_lower(1.0, 16.0)
    );
}
