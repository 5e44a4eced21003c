//! Simulation engines and their shared configuration.

mod cell;
mod clock;
mod parallel;
mod serial;
pub mod stats;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

pub use parallel::simulate_parallel;
pub use serial::simulate_serial;

use crate::design::Design;
use crate::error::{Error, Result};
use crate::netlist::{Driver, NetId};
use crate::waveform::{CsrpStore, Transition, WaveformId, DEFAULT_PAGE_LEN, MIN_PAGE_LEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Serial,
    Parallel,
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineKind::Serial => "serial",
            EngineKind::Parallel => "parallel",
        })
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "serial" => Ok(EngineKind::Serial),
            "parallel" => Ok(EngineKind::Parallel),
            _ => Err(Error::Invalid(format!("unknown engine `{s}`"))),
        }
    }
}

/// How many pages the store gets up front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sizing {
    /// `ceil(given transitions * factor / (page_len - 1))` pages plus one per
    /// waveform.
    Expansion(f64),
    /// Enough pages for every waveform's worst-case length: a computed
    /// waveform can have at most as many transitions as all of its cell's
    /// inputs combined, and at most one per picosecond of the duration.
    WorstCase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub engine: EngineKind,
    pub workers: usize,
    pub page_len: usize,
    pub sizing: Sizing,
    /// Record per-cell start/finish order in the parallel engine.
    pub record_trace: bool,
}

pub const DEFAULT_EXPANSION: f64 = 4.0;

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            engine: EngineKind::Parallel,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            page_len: DEFAULT_PAGE_LEN,
            sizing: Sizing::Expansion(DEFAULT_EXPANSION),
            record_trace: false,
        }
    }
}

impl SimConfig {
    pub fn serial() -> Self {
        SimConfig {
            engine: EngineKind::Serial,
            workers: 1,
            ..SimConfig::default()
        }
    }

    pub fn parallel(workers: usize) -> Self {
        SimConfig {
            engine: EngineKind::Parallel,
            workers,
            ..SimConfig::default()
        }
    }

    pub fn with_page_len(mut self, page_len: usize) -> Self {
        self.page_len = page_len;
        self
    }

    pub fn with_sizing(mut self, sizing: Sizing) -> Self {
        self.sizing = sizing;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.record_trace = on;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Invalid("need at least one worker".into()));
        }
        if self.page_len < MIN_PAGE_LEN {
            return Err(Error::StoreArgs(format!(
                "page length {} is below the minimum of {MIN_PAGE_LEN}",
                self.page_len
            )));
        }
        if let Sizing::Expansion(f) = self.sizing {
            if !(f.is_finite() && f >= 0.0) {
                return Err(Error::Invalid(format!("bad expansion factor {f}")));
            }
        }
        Ok(())
    }

    fn sizing_label(&self) -> String {
        match self.sizing {
            Sizing::Expansion(f) => format!("{f}"),
            Sizing::WorstCase => "worst-case".into(),
        }
    }
}

/// Runs whichever engine `config` selects.
pub fn simulate(design: &Design, config: &SimConfig) -> Result<SimResult> {
    match config.engine {
        EngineKind::Serial => simulate_serial(design, config),
        EngineKind::Parallel => simulate_parallel(design, config),
    }
}

pub fn capacity_pages(design: &Design, config: &SimConfig) -> Result<usize> {
    let per_page = (config.page_len - 1) as u128;
    let nets = design.netlist.net_count() as u128;
    let pages = match config.sizing {
        Sizing::Expansion(f) => {
            let given = design.stimuli.total_transitions() as f64 * f;
            (given / per_page as f64).ceil() as u128 + nets
        }
        Sizing::WorstCase => worst_case_lengths(design)
            .iter()
            .map(|&len| len.div_ceil(per_page).max(1))
            .sum(),
    };
    if pages >= u32::MAX as u128 {
        return Err(Error::StoreArgs(format!("store sizing needs {pages} pages")));
    }
    Ok(pages as usize)
}

/// Upper bound on each net's transition count: given length for stimuli, and
/// for cell outputs the sum over the cell's input nets (each input transition
/// triggers at most one output transition), capped by the number of distinct
/// timestamps.
pub fn worst_case_lengths(design: &Design) -> Vec<u128> {
    let n = &design.netlist;
    let cap = n.duration() as u128 + 1;
    let mut len = vec![0u128; n.net_count()];
    for (net, ts) in &design.stimuli.waves {
        len[net.index()] = ts.len() as u128;
    }
    for &c in n.topo_order() {
        let cell = n.cell(c);
        let total = cell
            .inputs
            .iter()
            .fold(0u128, |acc, i| acc.saturating_add(len[i.index()]));
        for &o in &cell.outputs {
            len[o.index()] = total.min(cap);
        }
    }
    len
}

fn new_store(design: &Design, config: &SimConfig) -> Result<CsrpStore> {
    let cap = capacity_pages(design, config)?.max(1);
    CsrpStore::new(design.netlist.net_count().max(1), config.page_len, cap)
}

fn load_stimuli(store: &CsrpStore, design: &Design) -> Result<()> {
    for (&net, ts) in &design.stimuli.waves {
        store.load_given_waveform(net.into(), ts)?;
    }
    Ok(())
}

fn with_sizing_hint(e: Error, config: &SimConfig) -> Error {
    match e {
        Error::StoreFull {
            capacity_pages,
            page_len,
            ..
        } => Error::StoreFull {
            capacity_pages,
            page_len,
            expansion: config.sizing_label(),
        },
        other => other,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WorkerStats {
    pub cells: usize,
    /// Passes over the worker's unfinished cells.
    pub sweeps: u64,
    /// Passes that processed at least one cell.
    pub busy_sweeps: u64,
    /// Time spent inside cell evaluation.
    pub busy: Duration,
}

impl WorkerStats {
    pub fn busy_ratio(&self) -> f64 {
        if self.sweeps == 0 {
            0.0
        } else {
            self.busy_sweeps as f64 / self.sweeps as f64
        }
    }
}

/// One processed cell in the parallel engine. Sequence numbers come from a
/// single shared counter, so they totally order all starts and finishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub cell: usize,
    pub worker: usize,
    pub start_seq: u64,
    pub end_seq: u64,
}

#[derive(Debug, Clone, Default)]
pub struct SimStats {
    pub workers: Vec<WorkerStats>,
    pub wall: Duration,
    pub cells_processed: usize,
    pub trace: Vec<TraceEvent>,
}

#[derive(Debug)]
pub struct SimResult {
    pub engine: EngineKind,
    pub store: CsrpStore,
    pub stats: SimStats,
}

impl SimResult {
    pub fn waveform(&self, net: NetId) -> Result<Vec<Transition>> {
        self.store.read_waveform(WaveformId::from(net))
    }

    pub fn waveforms(&self) -> Result<Vec<Vec<Transition>>> {
        self.store.all_waveforms()
    }
}

/// A net and its two differing waveforms.
pub type Divergence = (NetId, Vec<Transition>, Vec<Transition>);

/// First net whose waveforms differ between two results, with both
/// waveforms.
pub fn first_divergence(design: &Design, a: &SimResult, b: &SimResult) -> Result<Option<Divergence>> {
    for i in 0..design.netlist.net_count() {
        let net = NetId(i as u32);
        if matches!(design.netlist.driver(net), Driver::Stimulus) {
            continue;
        }
        let (wa, wb) = (a.waveform(net)?, b.waveform(net)?);
        if wa != wb {
            return Ok(Some((net, wa, wb)));
        }
    }
    Ok(None)
}
