//! Sparse matrix-matrix multiplication (SpGEMM) built around an
//! outer-product, propagation-blocking kernel.
//!
//! - [`sparse`]: COO/CSC/CSR storage and conversions
//! - [`gen`]: Erdős-Rényi and RMAT generators
//! - [`mm`]: Matrix Market I/O
//! - [`reference`]: dense-accumulator oracle and result comparison
//! - [`pb`]: the propagation-blocking multiply (symbolic, expand, sort,
//!   compress, convert)
//! - [`baseline`]: heap and hash column SpGEMM
//! - [`roofline`]: arithmetic-intensity bounds and traffic model
//!
//! ```
//! use spgemm_core::{gen, pb};
//!
//! let a = gen::gen_er(&gen::GenSpec::er(8, 4, 1)).unwrap();
//! let out = pb::pb_multiply(&a.to_csc(), &a.to_csr(), &pb::PbConfig::default()).unwrap();
//! assert_eq!(out.symbolic.flop, 4 * 4 * 256);
//! ```

pub mod baseline;
pub mod error;
pub mod gen;
pub mod mm;
pub mod pb;
pub mod pool;
pub mod reference;
pub mod report;
pub mod roofline;
pub mod sparse;

pub use error::{Error, Result};
pub use sparse::{CooMatrix, CscMatrix, CsrMatrix, Index, MatrixDims, Triplet};
