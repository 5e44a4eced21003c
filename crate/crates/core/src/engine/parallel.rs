//! One-pass parallel engine.
//!
//! Cells are dealt round-robin to workers before the run starts. Each worker
//! repeatedly sweeps its unfinished cells, processes every cell whose input
//! waveforms are all published, and exits once all of its cells are done.
//! Workers share nothing but the store (page counter and known flags) and a
//! progress counter used for deadlock detection.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use super::cell::{process_cell, CellWorkspace};
use super::clock::Instant;
use super::{
    load_stimuli, new_store, with_sizing_hint, EngineKind, SimConfig, SimResult, SimStats, TraceEvent,
    WorkerStats,
};
use crate::design::Design;
use crate::error::{Error, Result};
use crate::netlist::CellId;
use crate::waveform::{CsrpStore, WaveformId};

const FINISHED: usize = usize::MAX;

struct Shared<'a> {
    design: &'a Design,
    store: &'a CsrpStore,
    workers: usize,
    record_trace: bool,
    /// Number of cells completed so far, over all workers.
    progress: AtomicUsize,
    /// Per worker: `FINISHED`, `e + 1` after a sweep that started at progress
    /// `e` and found nothing ready, or 0.
    idle_at: Vec<AtomicUsize>,
    abort: AtomicBool,
    first_error: Mutex<Option<Error>>,
    seq: AtomicU64,
}

impl Shared<'_> {
    fn fail(&self, e: Error) {
        let mut slot = self.first_error.lock().unwrap_or_else(|p| p.into_inner());
        slot.get_or_insert(e);
        self.abort.store(true, Ordering::Release);
    }

    fn all_stalled_at(&self, epoch: usize) -> bool {
        self.idle_at.iter().all(|s| {
            let v = s.load(Ordering::Acquire);
            v == FINISHED || v == epoch + 1
        })
    }
}

struct WorkerOutcome {
    stats: WorkerStats,
    trace: Vec<TraceEvent>,
}

fn run_worker(shared: &Shared<'_>, worker: usize) -> WorkerOutcome {
    let netlist = &shared.design.netlist;
    let owned: Vec<CellId> = (worker..netlist.cells().len())
        .step_by(shared.workers)
        .map(|c| CellId(c as u32))
        .collect();
    let mut done = vec![false; owned.len()];
    let mut remaining = owned.len();
    let mut ws = CellWorkspace::new(worker, shared.store.page_len(), netlist.max_outputs());
    let mut stats = WorkerStats {
        cells: owned.len(),
        ..WorkerStats::default()
    };
    let mut trace = Vec::new();

    while remaining > 0 {
        if shared.abort.load(Ordering::Acquire) {
            break;
        }
        let epoch = shared.progress.load(Ordering::Acquire);
        stats.sweeps += 1;
        let mut progressed = false;

        for (slot, &cell) in owned.iter().enumerate() {
            if done[slot] {
                continue;
            }
            let ready = netlist
                .cell(cell)
                .inputs
                .iter()
                .all(|&net| shared.store.is_known(WaveformId::from(net)));
            if !ready {
                continue;
            }
            if !progressed {
                shared.idle_at[worker].store(0, Ordering::Release);
            }
            let start_seq = shared.seq.fetch_add(1, Ordering::AcqRel);
            let started = Instant::now();
            if let Err(e) = process_cell(netlist, &shared.design.delays, shared.store, cell, &mut ws) {
                shared.fail(e);
                return WorkerOutcome { stats, trace };
            }
            stats.busy += started.elapsed();
            let end_seq = shared.seq.fetch_add(1, Ordering::AcqRel);
            if shared.record_trace {
                trace.push(TraceEvent {
                    cell: cell.index(),
                    worker,
                    start_seq,
                    end_seq,
                });
            }
            done[slot] = true;
            remaining -= 1;
            progressed = true;
            shared.progress.fetch_add(1, Ordering::AcqRel);
        }

        if progressed {
            stats.busy_sweeps += 1;
            continue;
        }
        shared.idle_at[worker].store(epoch + 1, Ordering::Release);
        if shared.progress.load(Ordering::Acquire) == epoch && shared.all_stalled_at(epoch) {
            // Nothing was published since every unfinished worker last looked,
            // so nothing ever will be.
            let total = netlist.cells().len();
            shared.fail(Error::Deadlock {
                remaining: total - epoch,
            });
            break;
        }
        std::thread::yield_now();
    }

    shared.idle_at[worker].store(FINISHED, Ordering::Release);
    WorkerOutcome { stats, trace }
}

pub fn simulate_parallel(design: &Design, config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let started = Instant::now();
    let store = new_store(design, config)?;
    load_stimuli(&store, design).map_err(|e| with_sizing_hint(e, config))?;

    let n_cells = design.netlist.cells().len();
    let workers = config.workers.min(n_cells.max(1));
    let shared = Shared {
        design,
        store: &store,
        workers,
        record_trace: config.record_trace,
        progress: AtomicUsize::new(0),
        idle_at: (0..workers).map(|_| AtomicUsize::new(0)).collect(),
        abort: AtomicBool::new(false),
        first_error: Mutex::new(None),
        seq: AtomicU64::new(0),
    };

    let outcomes: Vec<WorkerOutcome> = if workers == 1 {
        vec![run_worker(&shared, 0)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let shared = &shared;
                    scope.spawn(move || run_worker(shared, w))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };

    if let Some(e) = shared.first_error.into_inner().unwrap_or_else(|p| p.into_inner()) {
        return Err(with_sizing_hint(e, config));
    }
    let cells_processed = shared.progress.load(Ordering::Acquire);
    debug_assert_eq!(cells_processed, n_cells);

    let mut trace: Vec<TraceEvent> = outcomes.iter().flat_map(|o| o.trace.iter().copied()).collect();
    trace.sort_by_key(|t| t.start_seq);
    let wall: Duration = started.elapsed();
    Ok(SimResult {
        engine: EngineKind::Parallel,
        store,
        stats: SimStats {
            workers: outcomes.into_iter().map(|o| o.stats).collect(),
            wall,
            cells_processed,
            trace,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::DelayTable;
    use crate::design::Stimuli;
    use crate::logic4::{GateKind, Logic4};
    use crate::netlist::{CellTemplate, NetlistBuilder};
    use crate::waveform::Transition;

    fn cyclic_design() -> Design {
        let mut b = NetlistBuilder::new();
        b.add_template(CellTemplate::single_gate("AND2", GateKind::And, 2).unwrap())
            .unwrap();
        let a = b.net("a");
        b.stimulus(a);
        b.cell("free", "AND2", &["a", "a"], &["f"]).unwrap();
        b.cell("c0", "AND2", &["a", "w1"], &["w0"]).unwrap();
        b.cell("c1", "AND2", &["a", "w0"], &["w1"]).unwrap();
        let netlist = b.build_unchecked(100).unwrap();
        let delays = DelayTable::build(&netlist, &[]).unwrap();
        let mut stimuli = Stimuli::default();
        stimuli.waves.insert(a, vec![Transition::new(0, Logic4::One)]);
        Design {
            netlist,
            delays,
            stimuli,
        }
    }

    #[test]
    fn watchdog_reports_deadlock() {
        let d = cyclic_design();
        for workers in [1, 2, 3] {
            match simulate_parallel(&d, &SimConfig::parallel(workers)) {
                Err(Error::Deadlock { remaining }) => assert_eq!(remaining, 2),
                other => panic!("expected deadlock, got {other:?}"),
            }
        }
    }

    #[test]
    fn store_full_carries_retry_hint() {
        let mut b = NetlistBuilder::new();
        b.add_template(CellTemplate::single_gate("BUF", GateKind::Buf, 1).unwrap())
            .unwrap();
        let a = b.net("a");
        b.stimulus(a);
        for i in 0..4 {
            let from = if i == 0 { "a".to_string() } else { format!("n{}", i - 1) };
            b.cell(&format!("c{i}"), "BUF", &[&from], &[&format!("n{i}")]).unwrap();
        }
        let netlist = b.build(10_000).unwrap();
        let entries: Vec<_> = (0..4)
            .flat_map(|c| {
                [(crate::logic4::Edge::Rise, Logic4::One), (crate::logic4::Edge::Fall, Logic4::Zero)].map(
                    |(edge, value)| crate::delay::DelayEntry {
                        cell: CellId(c),
                        in_pin: 0,
                        out_pin: 0,
                        edge,
                        value,
                        delay: 1,
                    },
                )
            })
            .collect();
        let delays = DelayTable::build(&netlist, &entries).unwrap();
        let mut stimuli = Stimuli::default();
        stimuli.waves.insert(
            a,
            (0..40)
                .map(|i| Transition::new(i * 10, if i % 2 == 0 { Logic4::One } else { Logic4::Zero }))
                .collect(),
        );
        let d = Design::new(netlist, delays, stimuli).unwrap();
        let cfg = SimConfig::parallel(2)
            .with_page_len(4)
            .with_sizing(super::super::Sizing::Expansion(0.0));
        match simulate_parallel(&d, &cfg) {
            Err(Error::StoreFull { expansion, .. }) => assert_eq!(expansion, "0"),
            other => panic!("expected store full, got {other:?}"),
        }
        assert!(simulate_parallel(&d, &cfg.clone().with_sizing(super::super::Sizing::WorstCase)).is_ok());
    }
}
