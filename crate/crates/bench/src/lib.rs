//! Benchmark harness for `spgemm-core`: timed runs, STREAM bandwidth
//! calibration, CSV and Roofline plot output, and the `spgemm` CLI.

pub mod cli;
pub mod output;
pub mod runner;
pub mod stream;

pub use output::{emit_csv, emit_plotdata, CsvRow, CSV_HEADER};
pub use runner::{run_benchmark, Algo, BenchArgs, BenchRecord, MatrixSource};
pub use stream::{stream_copy_bench, StreamResult};
