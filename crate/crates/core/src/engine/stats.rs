//! Run statistics: speedup, utilization, and store usage as `key=value` lines.

use std::fmt;
use std::time::Duration;

use super::SimResult;
use crate::design::Design;
use crate::error::{Error, Result};
use crate::io::wcv;

pub fn speedup(t_serial: Duration, t_parallel: Duration) -> f64 {
    t_serial.as_secs_f64() / t_parallel.as_secs_f64()
}

/// Geometric mean of positive ratios.
pub fn geometric_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Invalid("geometric mean of no values".into()));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Invalid(format!("geometric mean needs positive values, got {v}")));
    }
    let mean_log = values.iter().map(|v| v.log2()).sum::<f64>() / values.len() as f64;
    Ok(mean_log.exp2())
}

/// Design-level figures that need no simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSummary {
    pub cells: usize,
    pub basic_gates: usize,
    pub nets: usize,
    pub given_waveforms: usize,
    pub given_transitions: usize,
    /// `None` when there are no stimuli or all of them are empty.
    pub wcv: Option<f64>,
}

impl DesignSummary {
    pub fn of(design: &Design) -> Self {
        let lengths = design.stimuli.lengths();
        DesignSummary {
            cells: design.netlist.cells().len(),
            basic_gates: design.netlist.basic_gate_count(),
            nets: design.netlist.net_count(),
            given_waveforms: lengths.len(),
            given_transitions: lengths.iter().sum(),
            wcv: wcv(&lengths).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub design: DesignSummary,
    pub engine: super::EngineKind,
    pub workers: usize,
    pub wall: Duration,
    pub pages_used: u64,
    pub capacity_pages: usize,
    pub waste_bytes: u64,
    pub waste_bound_bytes: u64,
    pub busy_ratios: Vec<f64>,
    /// Present when a serial reference time was supplied.
    pub speedup: Option<f64>,
}

impl RunReport {
    pub fn new(design: &Design, result: &SimResult, serial_wall: Option<Duration>) -> Result<Self> {
        let usage = result.store.usage()?;
        Ok(RunReport {
            design: DesignSummary::of(design),
            engine: result.engine,
            workers: result.stats.workers.len(),
            wall: result.stats.wall,
            pages_used: usage.pages_used,
            capacity_pages: result.store.capacity_pages(),
            waste_bytes: usage.waste_bytes,
            waste_bound_bytes: usage.bound_bytes,
            busy_ratios: result.stats.workers.iter().map(|w| w.busy_ratio()).collect(),
            speedup: serial_wall.map(|s| speedup(s, result.stats.wall)),
        })
    }

    pub fn waste_within_bound(&self) -> bool {
        self.waste_bytes <= self.waste_bound_bytes
    }
}

impl fmt::Display for DesignSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cells={}", self.cells)?;
        writeln!(f, "basic_gates={}", self.basic_gates)?;
        writeln!(f, "nets={}", self.nets)?;
        writeln!(f, "given_waveforms={}", self.given_waveforms)?;
        writeln!(f, "given_transitions={}", self.given_transitions)?;
        match self.wcv {
            Some(w) => writeln!(f, "wcv={w:.6}"),
            None => writeln!(f, "wcv=nan"),
        }
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.design)?;
        writeln!(f, "engine={}", self.engine)?;
        writeln!(f, "workers={}", self.workers)?;
        writeln!(f, "wall_ms={:.3}", self.wall.as_secs_f64() * 1e3)?;
        writeln!(f, "pages_used={}", self.pages_used)?;
        writeln!(f, "capacity_pages={}", self.capacity_pages)?;
        writeln!(f, "waste_bytes={}", self.waste_bytes)?;
        writeln!(f, "waste_bound_bytes={}", self.waste_bound_bytes)?;
        for (w, r) in self.busy_ratios.iter().enumerate() {
            writeln!(f, "busy_ratio.{w}={r:.4}")?;
        }
        if let Some(s) = self.speedup {
            writeln!(f, "speedup={s:.4}")?;
        }
        Ok(())
    }
}
