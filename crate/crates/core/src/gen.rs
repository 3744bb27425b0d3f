//! Synthetic matrix generators.
//!
//! Both generators are pure functions of their [`GenSpec`]. Randomness comes
//! from ChaCha8 (`rand_chacha`) seeded with `ChaCha8Rng::seed_from_u64(seed)`
//! and split into independent streams with `set_stream`: ER uses one stream
//! per column, RMAT one stream per block of [`RMAT_EDGES_PER_STREAM`] edges.
//! Output therefore does not depend on the number of worker threads.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sparse::{CooMatrix, Index, MatrixDims, Triplet};

pub const RMAT_EDGES_PER_STREAM: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Er,
    Rmat,
}

/// Quadrant probabilities for recursive descent: `a` top-left, `b`
/// top-right, `c` bottom-left, `d` bottom-right.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RmatParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RmatParams {
    pub const UNIFORM: Self = Self {
        a: 0.25,
        b: 0.25,
        c: 0.25,
        d: 0.25,
    };

    pub const GRAPH500: Self = Self {
        a: 0.57,
        b: 0.19,
        c: 0.19,
        d: 0.05,
    };

    fn sum(&self) -> f64 {
        self.a + self.b + self.c + self.d
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    /// The matrix is `2^scale x 2^scale`.
    pub scale: u32,
    /// Average nonzeros per column.
    pub edge_factor: usize,
    pub seed: u64,
    pub rmat_params: RmatParams,
}

impl GenSpec {
    pub fn er(scale: u32, edge_factor: usize, seed: u64) -> Self {
        Self {
            kind: GenKind::Er,
            scale,
            edge_factor,
            seed,
            rmat_params: RmatParams::UNIFORM,
        }
    }

    /// RMAT with Graph500 parameters.
    pub fn rmat(scale: u32, edge_factor: usize, seed: u64) -> Self {
        Self {
            kind: GenKind::Rmat,
            scale,
            edge_factor,
            seed,
            rmat_params: RmatParams::GRAPH500,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn n(&self) -> usize {
        1usize << self.scale
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=30).contains(&self.scale) {
            return Err(Error::Parameter(format!(
                "scale {} outside [1, 30]",
                self.scale
            )));
        }
        if self.edge_factor < 1 {
            return Err(Error::Parameter("edge factor must be at least 1".into()));
        }
        let p = self.rmat_params;
        if [p.a, p.b, p.c, p.d]
            .iter()
            .any(|x| !(0.0..=1.0).contains(x))
        {
            return Err(Error::Parameter(format!(
                "probabilities {p:?} must lie in [0, 1]"
            )));
        }
        if (p.sum() - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!(
                "probabilities {p:?} sum to {}, expected 1",
                p.sum()
            )));
        }
        if self.kind == GenKind::Er && p != RmatParams::UNIFORM {
            return Err(Error::Parameter(
                "ER requires uniform quadrant probabilities".into(),
            ));
        }
        Ok(())
    }
}

/// Generates the matrix described by `spec`.
pub fn generate(spec: &GenSpec) -> Result<CooMatrix> {
    match spec.kind {
        GenKind::Er => gen_er(spec),
        GenKind::Rmat => gen_rmat(spec),
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Erdős-Rényi matrix with exactly `edge_factor` distinct rows per column,
/// sampled uniformly without replacement. All values are 1.0.
pub fn gen_er(spec: &GenSpec) -> Result<CooMatrix> {
    if spec.kind != GenKind::Er {
        return Err(Error::Parameter("gen_er called with a non-ER spec".into()));
    }
    spec.validate()?;
    let n = spec.n();
    let d = spec.edge_factor;
    if d > n {
        return Err(Error::Parameter(format!(
            "edge factor {d} exceeds the {n} rows available per column"
        )));
    }
    let seed = spec.seed;
    let entries: Vec<Triplet> = (0..n)
        .into_par_iter()
        .flat_map_iter(|col| {
            let mut rng = stream_rng(seed, col as u64);
            let mut rows = index::sample(&mut rng, n, d).into_vec();
            rows.sort_unstable();
            rows.into_iter()
                .map(move |r| Triplet::new(r as Index, col as Index, 1.0))
        })
        .collect();
    Ok(CooMatrix::from_parts_unchecked(
        MatrixDims::square(n)?,
        entries,
    ))
}

/// RMAT matrix with `edge_factor * 2^scale` sampled edges. Duplicate edges
/// are collapsed, so nnz can fall short of the edge count. All values are
/// 1.0 and entries come out column-major sorted.
pub fn gen_rmat(spec: &GenSpec) -> Result<CooMatrix> {
    if spec.kind != GenKind::Rmat {
        return Err(Error::Parameter(
            "gen_rmat called with a non-RMAT spec".into(),
        ));
    }
    spec.validate()?;
    let n = spec.n();
    let nedges = spec
        .edge_factor
        .checked_mul(n)
        .ok_or_else(|| Error::Parameter("edge count overflows".into()))?;
    let nstreams = nedges.div_ceil(RMAT_EDGES_PER_STREAM);
    let p = spec.rmat_params;
    let (ab, abc) = (p.a + p.b, p.a + p.b + p.c);
    let (seed, scale) = (spec.seed, spec.scale);

    let mut edges: Vec<(Index, Index)> = (0..nstreams)
        .into_par_iter()
        .flat_map_iter(|s| {
            let mut rng = stream_rng(seed, s as u64);
            let count = RMAT_EDGES_PER_STREAM.min(nedges - s * RMAT_EDGES_PER_STREAM);
            (0..count).map(move |_| {
                let (mut row, mut col) = (0 as Index, 0 as Index);
                for _ in 0..scale {
                    let u: f64 = rng.gen();
                    let (rbit, cbit) = if u < p.a {
                        (0, 0)
                    } else if u < ab {
                        (0, 1)
                    } else if u < abc {
                        (1, 0)
                    } else {
                        (1, 1)
                    };
                    row = (row << 1) | rbit;
                    col = (col << 1) | cbit;
                }
                (col, row)
            })
        })
        .collect();
    edges.par_sort_unstable();
    edges.dedup();
    let entries = edges
        .into_iter()
        .map(|(c, r)| Triplet::new(r, c, 1.0))
        .collect();
    Ok(CooMatrix::from_parts_unchecked(
        MatrixDims::square(n)?,
        entries,
    ))
}
