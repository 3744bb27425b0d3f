//! Roofline model for SpGEMM.
//!
//! Arithmetic intensity (AI) is flops per byte of DRAM traffic, with `b`
//! bytes charged per stored nonzero. With compression factor
//! `cf = flop / nnz(C)`:
//!
//! | bound            | AI                    |
//! |------------------|-----------------------|
//! | read/write once  | `cf / b`              |
//! | column SpGEMM    | `cf / ((2 + cf) b)`   |
//! | outer-product ESC| `cf / ((3 + 2 cf) b)` |
//!
//! and a bandwidth-bound kernel attains at most `beta * AI` flops/s.

use crate::error::{Error, Result};

/// Bytes per COO nonzero: two 4-byte indices plus an 8-byte value.
pub const DEFAULT_BYTES_PER_NONZERO: f64 = 16.0;

/// Compression factor below which the outer-product algorithm is expected
/// to beat column SpGEMM in practice.
pub const CROSSOVER_CF: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MachineModel {
    /// Sustained memory bandwidth, bytes/second.
    pub beta: f64,
    /// Bytes per stored nonzero.
    pub b: f64,
}

impl MachineModel {
    pub fn new(beta: f64, b: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Parameter(format!(
                "bandwidth must be positive, got {beta}"
            )));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::Parameter(format!(
                "bytes per nonzero must be positive, got {b}"
            )));
        }
        Ok(Self { beta, b })
    }

    pub fn with_bandwidth(beta: f64) -> Result<Self> {
        Self::new(beta, DEFAULT_BYTES_PER_NONZERO)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct MultiplyStats {
    pub nnz_a: u64,
    pub nnz_b: u64,
    pub nnz_c: u64,
    pub flop: u64,
}

impl MultiplyStats {
    pub fn new(nnz_a: u64, nnz_b: u64, nnz_c: u64, flop: u64) -> Result<Self> {
        if nnz_c > flop {
            return Err(Error::Parameter(format!(
                "nnz(C) = {nnz_c} exceeds flop = {flop}"
            )));
        }
        Ok(Self {
            nnz_a,
            nnz_b,
            nnz_c,
            flop,
        })
    }

    /// `flop / nnz(C)`, or `None` for an empty product.
    pub fn cf(&self) -> Option<f64> {
        compression_factor(self)
    }
}

pub fn compression_factor(stats: &MultiplyStats) -> Option<f64> {
    (stats.nnz_c > 0).then(|| stats.flop as f64 / stats.nnz_c as f64)
}

pub fn ai_upper(cf: f64, b: f64) -> f64 {
    cf / b
}

pub fn ai_col_lower(cf: f64, b: f64) -> f64 {
    cf / ((2.0 + cf) * b)
}

pub fn ai_outer_lower(cf: f64, b: f64) -> f64 {
    cf / ((3.0 + 2.0 * cf) * b)
}

/// Bandwidth-bound ceiling `beta * ai`, flops/second.
pub fn peak_flops(machine: &MachineModel, ai: f64) -> f64 {
    machine.beta * ai
}

/// `min(peak_compute, beta * ai)` when a compute peak is known.
pub fn attainable_flops(machine: &MachineModel, peak_compute: Option<f64>, ai: f64) -> f64 {
    let mem = peak_flops(machine, ai);
    peak_compute.map_or(mem, |p| p.min(mem))
}

pub fn crossover_cf() -> f64 {
    CROSSOVER_CF
}

/// `ai_outer_lower / ai_col_lower = (2 + cf) / (3 + 2 cf)`; decreasing in cf.
pub fn outer_to_col_ratio(cf: f64) -> f64 {
    (2.0 + cf) / (3.0 + 2.0 * cf)
}

/// Modeled DRAM traffic per phase of the outer-product algorithm, bytes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrafficModel {
    pub expand_read: f64,
    pub expand_write: f64,
    pub sort_read: f64,
    pub compress_write: f64,
}

impl TrafficModel {
    pub fn expand(&self) -> f64 {
        self.expand_read + self.expand_write
    }

    /// `b * (nnz(A) + nnz(B) + 2 flop + nnz(C))`.
    pub fn total(&self) -> f64 {
        self.expand_read + self.expand_write + self.sort_read + self.compress_write
    }
}

pub fn traffic_model(stats: &MultiplyStats, b: f64) -> TrafficModel {
    TrafficModel {
        expand_read: b * (stats.nnz_a + stats.nnz_b) as f64,
        expand_write: b * stats.flop as f64,
        sort_read: b * stats.flop as f64,
        compress_write: b * stats.nnz_c as f64,
    }
}
