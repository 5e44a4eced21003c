//! Event-driven reference simulator.
//!
//! A single queue orders work by `(time, rank)`. Stimulus sources have rank 0
//! and cells rank by topological position, so at any timestamp a cell runs
//! only after every cell that can still change its inputs at that timestamp.
//! When a cell runs it first applies all of its input changes for that time,
//! re-evaluates, and schedules output changes; it then releases the output
//! transitions that are due at that time to its sinks.
//!
//! Each output net keeps its entire projected waveform in one list. A new
//! schedule first denies every pending transition at or after its own
//! appearance time, then is dropped if it repeats the last value.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::clock::Instant;
use super::{load_stimuli, new_store, with_sizing_hint, SimConfig, SimResult, SimStats, WorkerStats};
use crate::design::Design;
use crate::error::Result;
use crate::logic4::{classify_edge, normalize_z, Logic4};
use crate::netlist::{Driver, NetId};
use crate::waveform::Transition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Event {
    time: i64,
    /// 0 for a stimulus source, `1 + topological index` for a cell.
    rank: u32,
    /// Net index for sources, cell index for cells.
    node: u32,
}

struct State {
    queue: BinaryHeap<Reverse<Event>>,
    rank: Vec<u32>,
    pending_inputs: Vec<Vec<(usize, Logic4)>>,
}

impl State {
    fn deliver(&mut self, sinks: &[(crate::netlist::CellId, usize)], value: Logic4, time: i64) {
        for &(cell, pin) in sinks {
            self.pending_inputs[cell.index()].push((pin, value));
            self.queue.push(Reverse(Event {
                time,
                rank: self.rank[cell.index()],
                node: cell.0,
            }));
        }
    }
}

/// Schedules `value` at `time` onto a projected waveform whose first
/// `committed` transitions have already appeared.
fn schedule(wave: &mut Vec<Transition>, committed: usize, value: Logic4, time: i64) {
    let keep = wave.partition_point(|t| t.time < time);
    debug_assert!(keep >= committed, "a matured transition cannot be denied");
    wave.truncate(keep);
    if wave.last().map_or(Logic4::X, |t| t.value) != value {
        wave.push(Transition::new(time, value));
    }
}

pub fn simulate_serial(design: &Design, config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let started = Instant::now();
    let netlist = &design.netlist;
    let delays = &design.delays;
    let duration = netlist.duration();
    let n_cells = netlist.cells().len();
    let n_nets = netlist.net_count();

    let mut rank = vec![0u32; n_cells];
    for (i, c) in netlist.topo_order().iter().enumerate() {
        rank[c.index()] = i as u32 + 1;
    }

    let mut waves: Vec<Vec<Transition>> = vec![Vec::new(); n_nets];
    for (net, ts) in &design.stimuli.waves {
        waves[net.index()] = ts.clone();
    }
    let mut committed = vec![0usize; n_nets];
    let mut inputs: Vec<Vec<Logic4>> = netlist
        .cells()
        .iter()
        .map(|c| vec![Logic4::X; c.inputs.len()])
        .collect();
    let mut outputs: Vec<Vec<Logic4>> = netlist
        .cells()
        .iter()
        .map(|c| vec![Logic4::X; c.outputs.len()])
        .collect();
    let mut last_run: Vec<Option<i64>> = vec![None; n_cells];

    let mut st = State {
        queue: BinaryHeap::new(),
        rank,
        pending_inputs: vec![Vec::new(); n_cells],
    };
    for net in netlist.stimulus_nets() {
        if let Some(first) = waves[net.index()].first() {
            st.queue.push(Reverse(Event {
                time: first.time,
                rank: 0,
                node: net.0,
            }));
        }
    }

    let mut triggered = Vec::new();
    let mut next_out = Vec::new();
    let mut scratch = crate::netlist::TemplateScratch::default();

    while let Some(Reverse(ev)) = st.queue.pop() {
        if ev.time > duration {
            break;
        }
        let now = ev.time;

        if ev.rank == 0 {
            let net = NetId(ev.node);
            let i = committed[net.index()];
            let t = waves[net.index()][i];
            debug_assert_eq!(t.time, now);
            committed[net.index()] = i + 1;
            st.deliver(netlist.sinks(net), t.value, now);
            if let Some(next) = waves[net.index()].get(i + 1) {
                st.queue.push(Reverse(Event {
                    time: next.time,
                    rank: 0,
                    node: net.0,
                }));
            }
            continue;
        }

        let ci = ev.node as usize;
        if last_run[ci] == Some(now) {
            continue;
        }
        last_run[ci] = Some(now);
        let cell_id = crate::netlist::CellId(ev.node);
        let cell = netlist.cell(cell_id);

        if !st.pending_inputs[ci].is_empty() {
            triggered.clear();
            for (pin, value) in st.pending_inputs[ci].drain(..) {
                let old = normalize_z(inputs[ci][pin]);
                inputs[ci][pin] = value;
                if old != normalize_z(value) {
                    triggered.push((pin, classify_edge(old, value)?));
                }
            }
            if !triggered.is_empty() {
                let template = netlist.template_of(cell_id);
                next_out.clear();
                next_out.resize(cell.outputs.len(), Logic4::X);
                template.eval_into(&inputs[ci], &mut scratch, &mut next_out);
                for (k, &value) in next_out.iter().enumerate() {
                    if value == outputs[ci][k] {
                        continue;
                    }
                    outputs[ci][k] = value;
                    let delay = delays.final_delay(cell_id, &triggered, k, value);
                    let Some(at) = delay.after(now).filter(|&at| at <= duration) else {
                        continue;
                    };
                    let net = cell.outputs[k].index();
                    schedule(&mut waves[net], committed[net], value, at);
                    st.queue.push(Reverse(Event {
                        time: at,
                        rank: ev.rank,
                        node: ev.node,
                    }));
                }
            }
        }

        // Release this cell's output transitions that are due now.
        for &net in &cell.outputs {
            let ni = net.index();
            while let Some(&t) = waves[ni].get(committed[ni]).filter(|t| t.time <= now) {
                debug_assert_eq!(t.time, now);
                committed[ni] += 1;
                st.deliver(netlist.sinks(net), t.value, now);
            }
        }
    }

    let store = new_store(design, config)?;
    load_stimuli(&store, design).map_err(|e| with_sizing_hint(e, config))?;
    for (i, wave) in waves.iter().enumerate() {
        if matches!(netlist.driver(NetId(i as u32)), Driver::Cell { .. }) {
            store
                .load_given_waveform(NetId(i as u32).into(), wave)
                .map_err(|e| with_sizing_hint(e, config))?;
        }
    }

    Ok(SimResult {
        engine: super::EngineKind::Serial,
        store,
        stats: SimStats {
            workers: vec![WorkerStats {
                cells: n_cells,
                sweeps: 1,
                busy_sweeps: 1,
                busy: started.elapsed(),
            }],
            wall: started.elapsed(),
            cells_processed: n_cells,
            trace: Vec::new(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Logic4::*;

    #[test]
    fn schedule_denies_and_drops_repeats() {
        let mut w = vec![Transition::new(0, Zero)];
        schedule(&mut w, 1, One, 20);
        schedule(&mut w, 1, Zero, 15);
        assert_eq!(w, vec![Transition::new(0, Zero)]);

        let mut w = Vec::new();
        schedule(&mut w, 0, One, 10);
        schedule(&mut w, 0, X, 20);
        schedule(&mut w, 0, Zero, 30);
        schedule(&mut w, 0, One, 5);
        assert_eq!(w, vec![Transition::new(5, One)]);
    }
}
