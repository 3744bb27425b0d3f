//! STREAM-style copy kernel used to measure sustained memory bandwidth.

use std::hint::black_box;
use std::time::Instant;

use anyhow::{ensure, Result};
use rayon::prelude::*;

pub const DEFAULT_STREAM_BYTES: usize = 1 << 30;
pub const DEFAULT_STREAM_TRIALS: usize = 5;

const CHUNK: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub struct StreamResult {
    /// Bytes counted per trial: one read and one write of the buffer.
    pub bytes_per_trial: f64,
    pub seconds: Vec<f64>,
}

impl StreamResult {
    pub fn new(bytes_per_trial: f64, seconds: Vec<f64>) -> Self {
        Self {
            bytes_per_trial,
            seconds,
        }
    }

    fn rates(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self
            .seconds
            .iter()
            .map(|&s| self.bytes_per_trial / s)
            .collect();
        r.sort_by(f64::total_cmp);
        r
    }

    /// Median bandwidth, bytes/second.
    pub fn median(&self) -> f64 {
        let r = self.rates();
        let n = r.len();
        if n % 2 == 1 {
            r[n / 2]
        } else {
            0.5 * (r[n / 2 - 1] + r[n / 2])
        }
    }

    pub fn min(&self) -> f64 {
        self.rates()[0]
    }

    pub fn max(&self) -> f64 {
        *self.rates().last().unwrap()
    }

    /// Population variance of per-trial bandwidth, (bytes/second)^2.
    pub fn variance(&self) -> f64 {
        let r = self.rates();
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / r.len() as f64
    }
}

/// Times `trials` parallel copies of a `buffer_bytes` array on the current
/// rayon pool. Each trial moves `2 * buffer_bytes`.
pub fn stream_copy_bench(buffer_bytes: usize, trials: usize) -> Result<StreamResult> {
    ensure!(trials >= 1, "need at least one trial");
    let len = buffer_bytes / std::mem::size_of::<f64>();
    ensure!(len > 0, "buffer of {buffer_bytes} bytes is too small");

    let mut src: Vec<f64> = Vec::new();
    let mut dst: Vec<f64> = Vec::new();
    src.try_reserve_exact(len)?;
    dst.try_reserve_exact(len)?;
    // SAFETY: capacity reserved above; both buffers are fully written by the
    // parallel first-touch pass before any read.
    unsafe {
        src.set_len(len);
        dst.set_len(len);
    }
    src.par_chunks_mut(CHUNK)
        .zip(dst.par_chunks_mut(CHUNK))
        .enumerate()
        .for_each(|(c, (s, d))| {
            for (i, (x, y)) in s.iter_mut().zip(d.iter_mut()).enumerate() {
                *x = (c * CHUNK + i) as f64;
                *y = 0.0;
            }
        });

    let mut seconds = Vec::with_capacity(trials);
    for _ in 0..trials {
        let start = Instant::now();
        dst.par_chunks_mut(CHUNK)
            .zip(src.par_chunks(CHUNK))
            .for_each(|(d, s)| d.copy_from_slice(s));
        black_box(&mut dst);
        seconds.push(start.elapsed().as_secs_f64().max(1e-9));
    }
    Ok(StreamResult::new(2.0 * (len * 8) as f64, seconds))
}
