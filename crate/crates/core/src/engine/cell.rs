//! Per-cell output computation for the parallel engine.
//!
//! One sweep over the merged input timestamps: at each timestamp every input
//! transition at that time is applied, the template is re-evaluated, and each
//! output whose value changed is scheduled `min delay` later through that
//! output's scratch buffer.

use crate::delay::DelayTable;
use crate::error::Result;
use crate::logic4::{classify_edge, normalize_z, Edge, Logic4};
use crate::netlist::{CellId, Netlist, TemplateScratch};
use crate::waveform::{CsrpStore, ScratchBuffer, Transition, WaveformCursor};

/// Reusable per-worker buffers.
pub(crate) struct CellWorkspace {
    scratches: Vec<ScratchBuffer>,
    inputs: Vec<Logic4>,
    current: Vec<Logic4>,
    next_out: Vec<Logic4>,
    triggered: Vec<(usize, Edge)>,
    heads: Vec<Option<Transition>>,
    template: TemplateScratch,
}

impl CellWorkspace {
    pub(crate) fn new(worker: usize, page_len: usize, max_outputs: usize) -> Self {
        CellWorkspace {
            scratches: (0..max_outputs).map(|_| ScratchBuffer::new(worker, page_len)).collect(),
            inputs: Vec::new(),
            current: Vec::new(),
            next_out: Vec::new(),
            triggered: Vec::new(),
            heads: Vec::new(),
            template: TemplateScratch::default(),
        }
    }
}

/// Computes and publishes every output waveform of `cell`. All input
/// waveforms must already be known.
pub(crate) fn process_cell(
    netlist: &Netlist,
    delays: &DelayTable,
    store: &CsrpStore,
    cell: CellId,
    ws: &mut CellWorkspace,
) -> Result<()> {
    let c = netlist.cell(cell);
    let template = netlist.template_of(cell);
    let horizon = netlist.duration();
    let n_in = c.inputs.len();
    let n_out = c.outputs.len();

    let mut cursors: Vec<WaveformCursor<'_>> = c
        .inputs
        .iter()
        .map(|&net| store.cursor(net.into()))
        .collect::<Result<_>>()?;
    ws.heads.clear();
    ws.heads.extend(cursors.iter_mut().map(Iterator::next));
    ws.inputs.clear();
    ws.inputs.resize(n_in, Logic4::X);
    ws.current.clear();
    ws.current.resize(n_out, Logic4::X);
    ws.next_out.clear();
    ws.next_out.resize(n_out, Logic4::X);
    for (k, &net) in c.outputs.iter().enumerate() {
        ws.scratches[k].begin(net.into(), horizon);
    }

    while let Some(now) = ws.heads.iter().flatten().map(|t| t.time).min() {
        ws.triggered.clear();
        for (i, cursor) in cursors.iter_mut().enumerate().take(n_in) {
            let Some(t) = ws.heads[i].filter(|t| t.time == now) else {
                continue;
            };
            let old = normalize_z(ws.inputs[i]);
            ws.inputs[i] = t.value;
            if old != normalize_z(t.value) {
                let edge = classify_edge(old, t.value).expect("values differ after normalization");
                ws.triggered.push((i, edge));
            }
            ws.heads[i] = cursor.next();
        }
        if ws.triggered.is_empty() {
            continue;
        }
        template.eval_into(&ws.inputs, &mut ws.template, &mut ws.next_out);
        for k in 0..n_out {
            let value = ws.next_out[k];
            if value == ws.current[k] {
                continue;
            }
            ws.current[k] = value;
            let delay = delays.final_delay(cell, &ws.triggered, k, value);
            if let Some(at) = delay.after(now) {
                ws.scratches[k].append(store, value, at)?;
            }
        }
    }

    for scratch in &mut ws.scratches[..n_out] {
        scratch.finalize(store)?;
    }
    Ok(())
}
