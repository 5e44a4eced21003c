//! Browser bindings for the simulator. Every export takes plain strings or
//! numbers and returns a JSON document; failures come back as
//! `{"ok": false, "error": "..."}` rather than as exceptions.

use gatesim::engine::stats::{DesignSummary, RunReport};
use gatesim::engine::{first_divergence, simulate_parallel, simulate_serial, SimConfig, Sizing};
use gatesim::gen::{GenSpec, Regime};
use gatesim::io::{bind, emit_delays, emit_netlist, emit_stimulus, parse_delays, parse_netlist, parse_stimulus};
use gatesim::logic4::eval_gate;
use gatesim::netlist::Driver;
use gatesim::{Design, GateKind, Logic4, NetId};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
#[serde(untagged)]
enum Reply<T> {
    Ok { ok: bool, #[serde(flatten)] body: T },
    Err { ok: bool, error: String },
}

fn reply<T: Serialize>(r: Result<T, String>) -> String {
    let r = match r {
        Ok(body) => Reply::Ok { ok: true, body },
        Err(error) => Reply::Err { ok: false, error },
    };
    serde_json::to_string(&r).expect("replies serialize")
}

#[derive(Debug, Serialize, PartialEq)]
pub struct TruthTable {
    pub gate: String,
    pub values: Vec<String>,
    /// `rows[i][j]` is the output for inputs `values[i]`, `values[j]`; unary
    /// gates have a single row indexed by the input.
    pub rows: Vec<Vec<String>>,
}

pub fn truth_table_of(gate: &str) -> Result<TruthTable, String> {
    let kind: GateKind = gate.parse().map_err(|e: gatesim::Error| e.to_string())?;
    let show = |v: Logic4| v.to_char().to_ascii_uppercase().to_string();
    let eval = |ins: &[Logic4]| eval_gate(kind, ins).map(show).map_err(|e| e.to_string());
    let rows = if kind.is_unary() {
        vec![Logic4::ALL.iter().map(|&a| eval(&[a])).collect::<Result<_, _>>()?]
    } else {
        Logic4::ALL
            .iter()
            .map(|&a| Logic4::ALL.iter().map(|&b| eval(&[a, b])).collect())
            .collect::<Result<_, _>>()?
    };
    Ok(TruthTable {
        gate: kind.name().to_string(),
        values: Logic4::ALL.iter().map(|&v| show(v)).collect(),
        rows,
    })
}

/// Output table of one gate over the four logic values.
#[wasm_bindgen]
pub fn truth_table(gate: &str) -> String {
    reply(truth_table_of(gate))
}

#[derive(Debug, Serialize, PartialEq)]
pub struct Sources {
    pub netlist: String,
    pub delays: String,
    pub stimulus: String,
}

const AND_NETLIST: &str = "\
net a b z
template AND2 in a b out z
  gate g0 and a b
  assign z g0
end
cell u0 AND2 in a b out z
";

pub fn preset_of(name: &str) -> Result<Sources, String> {
    let (delays, stimulus) = match name {
        "simultaneous" => (
            "delay u0 a z rise 1 2\ndelay u0 b z rise 1 2\ndelay u0 a z fall 0 5\ndelay u0 b z fall 0 10\n",
            "duration 40\nwave a 0 1 10 0\nwave b 0 1 10 0\n",
        ),
        "glitch" => (
            "delay u0 a z fall 0 5\ndelay u0 a z rise 1 15\ndelay u0 b z fall 0 5\n",
            "duration 40\nwave a 0 0 5 1\nwave b 0 1 10 0\n",
        ),
        "recursive" => (
            "delay u0 a z rise 1 100\ndelay u0 a z fall x 100\ndelay u0 b z fall 0 10\n",
            "duration 150\nwave a 0 1 1 x 2 1\nwave b 0 1 3 0\n",
        ),
        _ => return Err(format!("unknown preset `{name}`")),
    };
    Ok(Sources {
        netlist: AND_NETLIST.to_string(),
        delays: delays.to_string(),
        stimulus: stimulus.to_string(),
    })
}

/// Text sources of a small hand-written design.
#[wasm_bindgen]
pub fn preset(name: &str) -> String {
    reply(preset_of(name))
}

pub fn generate_sources(cells: usize, inputs: usize, transitions: usize, skewed: bool, seed: u64) -> Result<Sources, String> {
    let d = GenSpec {
        cells,
        inputs,
        transitions,
        regime: if skewed { Regime::Skewed } else { Regime::Uniform },
        duration: 2_000,
        seed,
        ..GenSpec::default()
    }
    .generate()
    .map_err(|e| e.to_string())?;
    Ok(Sources {
        netlist: emit_netlist(&d.netlist),
        delays: emit_delays(&d.netlist, &d.delays),
        stimulus: emit_stimulus(&d.netlist, &d.stimuli),
    })
}

/// Text sources of a random acyclic design.
#[wasm_bindgen]
pub fn generate(cells: usize, inputs: usize, transitions: usize, skewed: bool, seed: u64) -> String {
    reply(generate_sources(cells, inputs, transitions, skewed, seed))
}

#[derive(Debug, Serialize)]
pub struct NetWave {
    pub name: String,
    pub stimulus: bool,
    /// `(time, value)` pairs.
    pub transitions: Vec<(i64, String)>,
}

#[derive(Debug, Serialize)]
pub struct Simulation {
    pub duration: i64,
    pub nets: Vec<NetWave>,
    pub cells: usize,
    pub nets_total: usize,
    pub wcv: Option<f64>,
    pub pages_used: u64,
    pub capacity_pages: usize,
    pub waste_bytes: u64,
    pub waste_bound_bytes: u64,
    /// The event-driven reference produced the same waveforms.
    pub engines_agree: bool,
}

fn located(file: &str) -> impl Fn(gatesim::Error) -> String + '_ {
    move |e| format!("{file}: {e}")
}

fn parse_sources(netlist: &str, delays: &str, stimulus: &str) -> Result<Design, String> {
    let source = parse_netlist(netlist).map_err(located("netlist"))?;
    let stim = parse_stimulus(stimulus).map_err(located("stimulus"))?;
    let (netlist, stimuli) = bind(&source, &stim).map_err(located("stimulus"))?;
    let delays = parse_delays(delays, &netlist).map_err(located("delays"))?;
    Design::new(netlist, delays, stimuli).map_err(|e| e.to_string())
}

pub fn run(netlist: &str, delays: &str, stimulus: &str, page_len: usize) -> Result<Simulation, String> {
    let design = parse_sources(netlist, delays, stimulus)?;
    let err = |e: gatesim::Error| e.to_string();
    // One worker keeps everything on the calling thread.
    let cfg = SimConfig::parallel(1).with_page_len(page_len).with_sizing(Sizing::WorstCase);
    let result = simulate_parallel(&design, &cfg).map_err(err)?;
    let reference = simulate_serial(&design, &SimConfig::serial().with_page_len(page_len).with_sizing(Sizing::WorstCase))
        .map_err(err)?;
    let engines_agree = first_divergence(&design, &reference, &result)
        .map_err(err)?
        .is_none();
    let report = RunReport::new(&design, &result, None).map_err(err)?;
    let summary = DesignSummary::of(&design);
    let nl = &design.netlist;
    let nets = result
        .waveforms()
        .map_err(err)?
        .into_iter()
        .enumerate()
        .map(|(i, w)| {
            let net = NetId(i as u32);
            NetWave {
                name: nl.net_name(net).to_string(),
                stimulus: matches!(nl.driver(net), Driver::Stimulus),
                transitions: w.iter().map(|t| (t.time, t.value.to_char().to_ascii_uppercase().to_string())).collect(),
            }
        })
        .collect();
    Ok(Simulation {
        duration: nl.duration(),
        nets,
        cells: summary.cells,
        nets_total: summary.nets,
        wcv: summary.wcv,
        pages_used: report.pages_used,
        capacity_pages: report.capacity_pages,
        waste_bytes: report.waste_bytes,
        waste_bound_bytes: report.waste_bound_bytes,
        engines_agree,
    })
}

/// Parses the three sources, runs both engines, and returns every net's
/// waveform plus store statistics.
#[wasm_bindgen]
pub fn simulate(netlist: &str, delays: &str, stimulus: &str, page_len: usize) -> String {
    reply(run(netlist, delays, stimulus, page_len))
}
