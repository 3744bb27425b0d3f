//! Per-phase timing and modeled-traffic report for one multiplication.

use std::time::{Duration, Instant};

use crate::roofline::{traffic_model, MultiplyStats, TrafficModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Symbolic,
    Expand,
    Sort,
    Compress,
    Convert,
}

impl Phase {
    pub const ALL: [Phase; 5] = [
        Phase::Symbolic,
        Phase::Expand,
        Phase::Sort,
        Phase::Compress,
        Phase::Convert,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Symbolic => "symbolic",
            Phase::Expand => "expand",
            Phase::Sort => "sort",
            Phase::Compress => "compress",
            Phase::Convert => "convert",
        }
    }
}

/// Wall-clock seconds per phase. Phases an algorithm does not have stay 0.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseTimes {
    pub symbolic: f64,
    pub expand: f64,
    pub sort: f64,
    pub compress: f64,
    pub convert: f64,
}

impl PhaseTimes {
    pub fn get(&self, phase: Phase) -> f64 {
        match phase {
            Phase::Symbolic => self.symbolic,
            Phase::Expand => self.expand,
            Phase::Sort => self.sort,
            Phase::Compress => self.compress,
            Phase::Convert => self.convert,
        }
    }

    pub fn set(&mut self, phase: Phase, secs: f64) {
        match phase {
            Phase::Symbolic => self.symbolic = secs,
            Phase::Expand => self.expand = secs,
            Phase::Sort => self.sort = secs,
            Phase::Compress => self.compress = secs,
            Phase::Convert => self.convert = secs,
        }
    }

    pub fn total(&self) -> f64 {
        Phase::ALL.iter().map(|&p| self.get(p)).sum()
    }

    /// Runs `f`, records its wall time under `phase` and returns its result.
    pub fn time<T>(&mut self, phase: Phase, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.set(phase, secs(start.elapsed()));
        out
    }
}

fn secs(d: Duration) -> f64 {
    // Clamp so derived rates stay finite on coarse clocks.
    d.as_secs_f64().max(1e-9)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseReport {
    pub times: PhaseTimes,
    pub traffic: TrafficModel,
    pub flop: u64,
}

impl PhaseReport {
    pub fn new(times: PhaseTimes, stats: &MultiplyStats, b: f64) -> Self {
        Self {
            times,
            traffic: traffic_model(stats, b),
            flop: stats.flop,
        }
    }

    pub fn total_seconds(&self) -> f64 {
        self.times.total()
    }

    /// `flop / total seconds`.
    pub fn flops(&self) -> f64 {
        self.flop as f64 / self.total_seconds()
    }

    /// Modeled bytes moved by `phase`, if the traffic model covers it.
    pub fn modeled_bytes(&self, phase: Phase) -> Option<f64> {
        match phase {
            Phase::Expand => Some(self.traffic.expand()),
            Phase::Sort => Some(self.traffic.sort_read),
            Phase::Compress => Some(self.traffic.compress_write),
            Phase::Symbolic | Phase::Convert => None,
        }
    }

    /// Modeled bytes over measured seconds; `None` if the phase is unmodeled
    /// or was not run.
    pub fn bandwidth(&self, phase: Phase) -> Option<f64> {
        let t = self.times.get(phase);
        self.modeled_bytes(phase)
            .filter(|_| t > 0.0)
            .map(|bytes| bytes / t)
    }
}
