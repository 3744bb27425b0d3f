//! CSV results and Roofline plot data.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use spgemm_core::report::Phase;

use crate::runner::BenchRecord;

pub const CSV_HEADER: &str = "algo,matrix,scale,edge_factor,nthreads,nnz_a,nnz_b,nnz_c,flop,cf,\
t_symbolic,t_expand,t_sort,t_compress,t_convert,t_total,mflops,bw_expand,bw_sort,bw_compress,\
ai_upper,ai_outer_lower,peak_mflops,measured_over_peak";

/// One CSV line. Times are seconds, bandwidths GB/s, intensities
/// flops/byte. Fields without a value (no generator parameters, empty
/// product, phase the algorithm does not have) are left blank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub algo: String,
    pub matrix: String,
    pub scale: Option<u32>,
    pub edge_factor: Option<usize>,
    pub nthreads: usize,
    pub nnz_a: u64,
    pub nnz_b: u64,
    pub nnz_c: u64,
    pub flop: u64,
    pub cf: Option<f64>,
    pub t_symbolic: f64,
    pub t_expand: f64,
    pub t_sort: f64,
    pub t_compress: f64,
    pub t_convert: f64,
    pub t_total: f64,
    pub mflops: f64,
    pub bw_expand: Option<f64>,
    pub bw_sort: Option<f64>,
    pub bw_compress: Option<f64>,
    pub ai_upper: Option<f64>,
    pub ai_outer_lower: Option<f64>,
    pub peak_mflops: Option<f64>,
    pub measured_over_peak: Option<f64>,
}

impl From<&BenchRecord> for CsvRow {
    fn from(r: &BenchRecord) -> Self {
        let t = &r.report.times;
        let is_pb = r.algo == crate::runner::Algo::Pb;
        let bw = |p: Phase| {
            if is_pb {
                r.report.bandwidth(p).map(|x| x / 1e9)
            } else {
                None
            }
        };
        Self {
            algo: r.algo.name().into(),
            matrix: r.matrix.clone(),
            scale: r.scale,
            edge_factor: r.edge_factor,
            nthreads: r.nthreads,
            nnz_a: r.stats.nnz_a,
            nnz_b: r.stats.nnz_b,
            nnz_c: r.stats.nnz_c,
            flop: r.stats.flop,
            cf: r.cf(),
            t_symbolic: t.symbolic,
            t_expand: t.expand,
            t_sort: t.sort,
            t_compress: t.compress,
            t_convert: t.convert,
            t_total: t.total(),
            mflops: r.flops() / 1e6,
            bw_expand: bw(Phase::Expand),
            bw_sort: bw(Phase::Sort),
            bw_compress: bw(Phase::Compress),
            ai_upper: r.ai_upper(),
            ai_outer_lower: r.ai_outer_lower(),
            peak_mflops: r.peak_flops().map(|p| p / 1e6),
            measured_over_peak: r.measured_over_peak(),
        }
    }
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in records {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[BenchRecord], path: &Path) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_csv(records, BufWriter::new(f))
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Roofline ceiling sampled at `ai` points. Without a compute peak the
/// ceiling is the bandwidth line alone; with one it flattens at the knee
/// `(peak / beta, peak)`.
pub fn roofline_polyline(
    beta: f64,
    peak_compute: Option<f64>,
    ai_min: f64,
    ai_max: f64,
) -> Vec<(f64, f64)> {
    let mut xs = vec![ai_min, ai_max];
    if let Some(p) = peak_compute {
        let knee = p / beta;
        if knee > ai_min && knee < ai_max {
            xs.insert(1, knee);
        }
    }
    xs.into_iter()
        .map(|x| {
            let bw = beta * x;
            (x, peak_compute.map_or(bw, |p| bw.min(p)))
        })
        .collect()
}

/// Writes gnuplot-style blocks: measured `(ai_upper, flops)` points
/// labelled by algorithm, a blank-line separator, then the ceiling.
pub fn write_plotdata<W: Write>(
    records: &[BenchRecord],
    beta: f64,
    peak_compute: Option<f64>,
    mut out: W,
) -> Result<()> {
    writeln!(out, "# measured: ai flops algo matrix nthreads")?;
    let mut ai_min = f64::INFINITY;
    let mut ai_max = 0.0f64;
    for r in records {
        if let Some(ai) = r.ai_upper() {
            writeln!(
                out,
                "{ai} {} {} {} {}",
                r.flops(),
                r.algo,
                r.matrix,
                r.nthreads
            )?;
            ai_min = ai_min.min(ai);
            ai_max = ai_max.max(ai);
        }
    }
    if !ai_min.is_finite() {
        ai_min = 1e-3;
        ai_max = 1.0;
    }
    writeln!(out)?;
    writeln!(out)?;
    writeln!(out, "# ceiling: ai flops")?;
    for (x, y) in roofline_polyline(beta, peak_compute, ai_min / 2.0, ai_max * 2.0) {
        writeln!(out, "{x} {y}")?;
    }
    Ok(())
}

pub fn emit_plotdata(
    records: &[BenchRecord],
    beta: f64,
    peak_compute: Option<f64>,
    path: &Path,
) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(f);
    write_plotdata(records, beta, peak_compute, &mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polyline_knee() {
        let pts = roofline_polyline(50e9, Some(100e9), 0.01, 10.0);
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[1], (2.0, 100e9));
        assert_eq!(pts[0].1, 50e9 * 0.01);
        assert_eq!(pts[2].1, 100e9);
    }

    #[test]
    fn polyline_without_compute_peak_is_bandwidth_line() {
        let pts = roofline_polyline(40e9, None, 0.0125, 0.0625);
        assert_eq!(pts, vec![(0.0125, 500e6), (0.0625, 2.5e9)]);
    }

    #[test]
    fn empty_records_give_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }
}
