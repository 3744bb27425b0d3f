use spgemm_core::gen::{gen_er, gen_rmat, GenSpec, RmatParams};
use spgemm_core::CooMatrix;

fn row_degrees(m: &CooMatrix) -> Vec<usize> {
    let mut d = vec![0usize; m.nrows()];
    for t in m.entries() {
        d[t.row as usize] += 1;
    }
    d
}

fn mean_var(xs: &[usize]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<usize>() as f64 / n;
    let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

#[test]
fn rmat_rows_are_skewed() {
    let m = gen_rmat(&GenSpec::rmat(10, 16, 1)).unwrap();
    assert!(m.nnz() <= 16 << 10);
    let deg = row_degrees(&m);
    let (mean, _) = mean_var(&deg);
    let max = *deg.iter().max().unwrap() as f64;
    assert!(max > 4.0 * mean, "max row degree {max} vs mean {mean}");
}

#[test]
fn uniform_rmat_degree_spread_matches_er() {
    // ER fixes every column degree, so compare row degrees, which are
    // approximately Poisson(d) under both generators.
    let (scale, d) = (14, 8);
    let er = gen_er(&GenSpec::er(scale, d, 5)).unwrap();
    let mut spec = GenSpec::rmat(scale, d, 5);
    spec.rmat_params = RmatParams::UNIFORM;
    let rmat = gen_rmat(&spec).unwrap();

    let (er_mean, er_var) = mean_var(&row_degrees(&er));
    let (rm_mean, rm_var) = mean_var(&row_degrees(&rmat));
    assert!((er_mean - d as f64).abs() < 1e-12);
    // Duplicate collapse removes a handful of edges from uniform RMAT.
    assert!(
        (rm_mean - er_mean).abs() / er_mean < 0.01,
        "{rm_mean} vs {er_mean}"
    );
    let ratio = rm_var / er_var;
    assert!((0.9..1.1).contains(&ratio), "variance ratio {ratio}");

    // Chi-square of the row-degree histograms against each other.
    let maxdeg = 30;
    let hist = |deg: &[usize]| {
        let mut h = vec![0f64; maxdeg + 1];
        for &x in deg {
            h[x.min(maxdeg)] += 1.0;
        }
        h
    };
    let (he, hr) = (hist(&row_degrees(&er)), hist(&row_degrees(&rmat)));
    let (chi2, dof) = he
        .iter()
        .zip(&hr)
        .filter(|(e, r)| *e + *r >= 10.0)
        .fold((0.0, 0usize), |(acc, k), (e, r)| {
            (acc + (e - r).powi(2) / (e + r), k + 1)
        });
    // Loose sanity bound: well above the 99.9th percentile for ~20 dof.
    assert!(
        chi2 < 3.0 * dof as f64 + 30.0,
        "chi2 {chi2} over {dof} bins"
    );
}

#[test]
fn generators_are_pure_functions_of_spec() {
    for spec in [GenSpec::er(9, 4, 77), GenSpec::rmat(9, 4, 77)] {
        let runs: Vec<_> = (0..3)
            .map(|_| spgemm_core::gen::generate(&spec).unwrap())
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[1], runs[2]);
    }
    // Output does not depend on the worker count.
    let spec = GenSpec::rmat(12, 8, 3);
    let one = spgemm_core::pool::with_threads(1, || gen_rmat(&spec).unwrap()).unwrap();
    let four = spgemm_core::pool::with_threads(4, || gen_rmat(&spec).unwrap()).unwrap();
    assert_eq!(one, four);
}
