//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and
//! exits non-zero if any failed.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use gatesim::engine::stats::{geometric_mean, speedup};
use gatesim::engine::{
    capacity_pages, first_divergence, simulate_parallel, simulate_serial, SimConfig, SimResult, Sizing,
    DEFAULT_EXPANSION,
};
use gatesim::gen::{GenSpec, Regime};
use gatesim::io::{export_waveforms, wcv, ExportFormat};
use gatesim::logic4::{and2, or2, xor2};
use gatesim::netlist::NetlistBuilder;
use gatesim::waveform::{memory_waste_bound, ScratchBuffer, SLOT_BYTES};
use gatesim::{
    CellId, CellTemplate, CsrpStore, DelayEntry, DelayTable, Design, Edge, Error, GateKind, Logic4, NetId, Stimuli,
    Transition, WaveformId,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use Logic4::{One, Zero, X, Z};

type Outcome = Result<String, String>;
type BinaryOp = fn(Logic4, Logic4) -> Logic4;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tr(pairs: &[(i64, Logic4)]) -> Vec<Transition> {
    pairs.iter().map(|&(t, v)| Transition::new(t, v)).collect()
}

/// Bookkeeping for the waste bound over all runs of the suite.
#[derive(Default)]
struct WasteLog {
    runs: AtomicUsize,
    violations: AtomicUsize,
    worst_ratio_ppm: AtomicUsize,
}

impl WasteLog {
    fn record(&self, store: &CsrpStore) -> Result<(), String> {
        let u = store.usage().map_err(|e| e.to_string())?;
        let bound = memory_waste_bound(store.page_len() as u64, store.num_waveforms() as u64, SLOT_BYTES as u64);
        self.runs.fetch_add(1, Ordering::Relaxed);
        if u.waste_bytes > bound {
            self.violations.fetch_add(1, Ordering::Relaxed);
        }
        let ppm = (u.waste_bytes as u128 * 1_000_000 / bound.max(1) as u128) as usize;
        self.worst_ratio_ppm.fetch_max(ppm, Ordering::Relaxed);
        Ok(())
    }
}

// --- single-cell scenarios -------------------------------------------------

fn and_design(a: Vec<Transition>, b: Vec<Transition>, delays: &[(&str, Edge, Logic4, i64)], duration: i64) -> Design {
    let mut nb = NetlistBuilder::new();
    nb.add_template(CellTemplate::single_gate("AND2", GateKind::And, 2).unwrap())
        .unwrap();
    let na = nb.net("a");
    let nbn = nb.net("b");
    nb.stimulus(na);
    nb.stimulus(nbn);
    nb.cell("u0", "AND2", &["a", "b"], &["z"]).unwrap();
    let netlist = nb.build(duration).unwrap();
    let entries: Vec<DelayEntry> = delays
        .iter()
        .map(|&(pin, edge, value, delay)| DelayEntry {
            cell: CellId(0),
            in_pin: if pin == "a" { 0 } else { 1 },
            out_pin: 0,
            edge,
            value,
            delay,
        })
        .collect();
    let delays = DelayTable::build(&netlist, &entries).unwrap();
    let mut stimuli = Stimuli::default();
    stimuli.waves.insert(na, a);
    stimuli.waves.insert(nbn, b);
    Design::new(netlist, delays, stimuli).unwrap()
}

fn z_in_both_engines(d: &Design) -> Result<(Vec<Transition>, Vec<Transition>), String> {
    let z = d.netlist.net_by_name("z").unwrap();
    let s = simulate_serial(d, &SimConfig::serial()).map_err(|e| e.to_string())?;
    let p = simulate_parallel(d, &SimConfig::parallel(2)).map_err(|e| e.to_string())?;
    Ok((s.waveform(z).unwrap(), p.waveform(z).unwrap()))
}

fn c1_truth_tables() -> Outcome {
    let started = Instant::now();
    // Expected tables: rows are the left operand, columns the right, both in
    // the order 0 1 X Z.
    let expected: [(&str, BinaryOp, [&str; 4]); 3] = [
        ("AND", and2, ["0000", "01xx", "0xxx", "0xxx"]),
        ("OR", or2, ["01xx", "1111", "x1xx", "x1xx"]),
        ("XOR", xor2, ["01xx", "10xx", "xxxx", "xxxx"]),
    ];
    let order = [Zero, One, X, Z];
    let mut checked = 0;
    for (name, f, rows) in expected {
        for (i, row) in rows.iter().enumerate() {
            for (j, c) in row.chars().enumerate() {
                let expected = Logic4::from_char(c).unwrap();
                let got = f(order[i], order[j]);
                ensure(got == expected, || {
                    format!("{name}({}, {}) = {got}, expected {expected}", order[i], order[j])
                })?;
                let via_eval = gatesim::logic4::eval_gate(
                    match name {
                        "AND" => GateKind::And,
                        "OR" => GateKind::Or,
                        _ => GateKind::Xor,
                    },
                    &[order[i], order[j]],
                )
                .unwrap();
                ensure(via_eval == expected, || format!("eval_gate {name} disagrees"))?;
                checked += 1;
            }
        }
    }
    let took = started.elapsed();
    ensure(checked == 48, || format!("checked {checked} entries"))?;
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("48/48 entries in {took:?}"))
}

fn c2_simultaneous_falls() -> Outcome {
    let d = and_design(
        tr(&[(0, One), (10, Zero)]),
        tr(&[(0, One), (10, Zero)]),
        &[
            ("a", Edge::Rise, One, 2),
            ("b", Edge::Rise, One, 2),
            ("a", Edge::Fall, Zero, 5),
            ("b", Edge::Fall, Zero, 10),
        ],
        100,
    );
    let (s, p) = z_in_both_engines(&d)?;
    let expected = tr(&[(2, One), (15, Zero)]);
    ensure(s == expected, || format!("serial z = {s:?}"))?;
    ensure(p == expected, || format!("parallel z = {p:?}"))?;
    let falls: Vec<_> = p.iter().filter(|t| t.value == Zero).collect();
    ensure(falls.len() == 1 && falls[0].time == 10 + 5, || format!("falls {falls:?}"))?;
    Ok("z = [(2,1), (15,0)]: single fall at +5 ps in both engines".into())
}

fn c3_glitch_denied() -> Outcome {
    let d = and_design(
        tr(&[(0, Zero), (5, One)]),
        tr(&[(0, One), (10, Zero)]),
        &[
            ("a", Edge::Fall, Zero, 5),
            ("a", Edge::Rise, One, 15),
            ("b", Edge::Fall, Zero, 5),
        ],
        100,
    );
    let (s, p) = z_in_both_engines(&d)?;
    let expected = tr(&[(5, Zero)]);
    ensure(s == expected, || format!("serial z = {s:?}"))?;
    ensure(p == expected, || format!("parallel z = {p:?}"))?;
    ensure(!p.iter().any(|t| (10..=25).contains(&t.time)), || "transition in 10..25".into())?;
    Ok("rise at 20 denied, fall at 15 is a no-op; z = [(5,0)] in both engines".into())
}

fn c8_recursive_glitch() -> Outcome {
    // a goes 1 -> X -> 1 while the schedules are still pending; b's fall then
    // denies all three at once.
    let d = and_design(
        tr(&[(0, One), (1, X), (2, One)]),
        tr(&[(0, One), (3, Zero)]),
        &[
            ("a", Edge::Rise, One, 100),
            ("a", Edge::Fall, X, 100),
            ("b", Edge::Fall, Zero, 10),
        ],
        1_000,
    );
    let (s, p) = z_in_both_engines(&d)?;
    let expected = tr(&[(13, Zero)]);
    ensure(s == expected, || format!("serial z = {s:?}"))?;
    ensure(p == expected, || format!("parallel z = {p:?}"))?;

    // The same sequence fed straight into a scratch buffer.
    let store = CsrpStore::new(1, 16, 4).unwrap();
    let mut sb = ScratchBuffer::new(0, 16);
    sb.begin(WaveformId(0), 1_000);
    for (v, t) in [(One, 100), (X, 101), (One, 102)] {
        sb.append(&store, v, t).unwrap();
    }
    ensure(sb.len() == 3, || format!("{} pending", sb.len()))?;
    sb.append(&store, Zero, 13).unwrap();
    ensure(sb.buffered() == tr(&[(13, Zero)]).as_slice(), || format!("{:?}", sb.buffered()))?;
    Ok("3 pending schedules (incl. an X) denied by one fall; z = [(13,0)] in both engines".into())
}

// --- randomized runs ---------------------------------------------------------

/// Runs with the default expansion sizing. If the store fills up, retries
/// with larger expansion factors, or with worst-case sizing once that is the
/// smaller store.
fn run_sized(design: &Design, config: SimConfig, retries: &AtomicUsize) -> Result<SimResult, String> {
    let run = |c: &SimConfig| match c.engine {
        gatesim::EngineKind::Serial => simulate_serial(design, c),
        gatesim::EngineKind::Parallel => simulate_parallel(design, c),
    };
    let mut factor = DEFAULT_EXPANSION;
    let mut cfg = config.clone();
    loop {
        match run(&cfg) {
            Err(Error::StoreFull { .. }) if cfg.sizing != Sizing::WorstCase => {
                retries.fetch_add(1, Ordering::Relaxed);
                factor *= 4.0;
                let grown = config.clone().with_sizing(Sizing::Expansion(factor));
                let worst = config.clone().with_sizing(Sizing::WorstCase);
                let pages = |c: &SimConfig| capacity_pages(design, c).unwrap_or(usize::MAX);
                cfg = if pages(&worst) <= pages(&grown) { worst } else { grown };
            }
            other => return other.map_err(|e| e.to_string()),
        }
    }
}

fn random_params(rng: &mut ChaCha8Rng, seed: u64) -> GenSpec {
    GenSpec {
        cells: rng.gen_range(10..=500),
        inputs: rng.gen_range(1..=24),
        max_fan_in: rng.gen_range(1..=4),
        max_fan_out: rng.gen_range(2..=10),
        transitions: rng.gen_range(0..=200),
        regime: if rng.gen_bool(0.5) { Regime::Skewed } else { Regime::Uniform },
        duration: rng.gen_range(2_000..=20_000),
        min_delay: 0,
        max_delay: rng.gen_range(1..=60),
        p_zero_delay: rng.gen_range(0.0..0.2),
        p_inf_delay: rng.gen_range(0.0..0.3),
        p_unknown: rng.gen_range(0.0..0.15),
        seed,
    }
}

fn c4_oracle_equivalence(waste: &WasteLog) -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce55);
    let retries = AtomicUsize::new(0);
    let mut computed = 0usize;
    let mut with_inf = 0usize;
    const DESIGNS: u64 = 1_000;
    for i in 0..DESIGNS {
        let params = random_params(&mut rng, i);
        let d = params.generate().map_err(|e| format!("design {i}: {e}"))?;
        with_inf += usize::from(
            d.delays.explicit_entries().len()
                < d.netlist
                    .cells()
                    .iter()
                    .map(|c| c.inputs.len() * c.outputs.len() * 4)
                    .sum::<usize>(),
        );
        let serial = run_sized(&d, SimConfig::serial(), &retries)?;
        waste.record(&serial.store)?;
        for w in [1, 2, 4, 8] {
            let par = run_sized(&d, SimConfig::parallel(w), &retries)?;
            waste.record(&par.store)?;
            if let Some((net, s, p)) = first_divergence(&d, &serial, &par).map_err(|e| e.to_string())? {
                return Err(format!(
                    "design {i} ({params:?}) workers={w}: net {} differs\n  serial   {s:?}\n  parallel {p:?}",
                    d.netlist.net_name(net)
                ));
            }
        }
        computed += serial
            .waveforms()
            .unwrap()
            .iter()
            .enumerate()
            .filter(|(n, _)| d.stimuli.get(NetId(*n as u32)).is_none())
            .map(|(_, w)| w.len())
            .sum::<usize>();
    }
    let took = started.elapsed();
    ensure(took < Duration::from_secs(600), || format!("took {took:?}"))?;
    Ok(format!(
        "{DESIGNS} designs x workers {{1,2,4,8}} identical to serial; {computed} computed transitions; \
         {with_inf} designs with infinite slots; {} sizing retries; {took:.1?}",
        retries.load(Ordering::Relaxed)
    ))
}

fn c5_determinism(waste: &WasteLog) -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xde7e);
    let retries = AtomicUsize::new(0);
    for i in 0..100u64 {
        let params = random_params(&mut rng, 50_000 + i);
        let d = params.generate().map_err(|e| e.to_string())?;
        let mut reference: Option<String> = None;
        for run in 0..20 {
            let r = run_sized(&d, SimConfig::parallel(8), &retries)?;
            waste.record(&r.store)?;
            let text = export_waveforms(&d.netlist, &r.waveforms().unwrap(), ExportFormat::Native);
            match &reference {
                None => reference = Some(text),
                Some(first) => ensure(first == &text, || format!("design {i}: run {run} differs from run 0"))?,
            }
        }
    }
    Ok(format!("100 designs x 20 runs at 8 workers byte-identical; {:.1?}", started.elapsed()))
}

/// Deterministic per-id waveform for the concurrent store check.
fn expected_wave(id: usize) -> Vec<Transition> {
    let mut rng = ChaCha8Rng::seed_from_u64(id as u64);
    let len = rng.gen_range(0..60);
    let mut t = 0i64;
    let mut v = if rng.gen_bool(0.5) { Zero } else { One };
    (0..len)
        .map(|_| {
            t += rng.gen_range(1..5);
            v = match v {
                Zero => One,
                _ => Zero,
            };
            Transition::new(t, v)
        })
        .collect()
}

fn c6_store_integrity(waste: &WasteLog) -> Outcome {
    const WORKERS: usize = 8;
    const PER_WORKER: usize = 100_000;
    let store = Arc::new(CsrpStore::new(1, 4, WORKERS * PER_WORKER).unwrap());
    let pages: Vec<Vec<u32>> = std::thread::scope(|s| {
        let hs: Vec<_> = (0..WORKERS)
            .map(|_| {
                let store = &store;
                s.spawn(move || (0..PER_WORKER).map(|_| store.alloc_page().unwrap()).collect::<Vec<u32>>())
            })
            .collect();
        hs.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut all: Vec<u32> = pages.into_iter().flatten().collect();
    all.sort_unstable();
    let expected: Vec<u32> = (0..(WORKERS * PER_WORKER) as u32).collect();
    ensure(all == expected, || "allocated pages are not exactly 0..800000".into())?;
    ensure(store.alloc_page().is_err(), || "allocation past capacity succeeded".into())?;

    // Concurrent write, finalize, and read of 10^4 waveforms.
    const WAVES: usize = 10_000;
    const PAGE: usize = 8;
    let expected: Vec<Vec<Transition>> = (0..WAVES).map(expected_wave).collect();
    let pages_needed: usize = expected.iter().map(|w| w.len().div_ceil(PAGE - 1).max(1)).sum();
    let store = CsrpStore::new(WAVES, PAGE, pages_needed).unwrap();
    let mismatches = AtomicUsize::new(0);
    let reads = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for w in 0..WORKERS {
            let (store, expected) = (&store, &expected);
            s.spawn(move || {
                let mut sb = ScratchBuffer::new(w, PAGE);
                for id in (w..WAVES).step_by(WORKERS) {
                    sb.begin(WaveformId(id as u32), i64::MAX);
                    for t in &expected[id] {
                        sb.append(store, t.value, t.time).unwrap();
                    }
                    sb.finalize(store).unwrap();
                }
            });
        }
        for r in 0..4 {
            let (store, expected, mismatches, reads) = (&store, &expected, &mismatches, &reads);
            s.spawn(move || {
                let mut pending: Vec<usize> = (0..WAVES).filter(|i| i % 4 == r).collect();
                while !pending.is_empty() {
                    pending.retain(|&id| {
                        if !store.is_known(WaveformId(id as u32)) {
                            return true;
                        }
                        if store.read_waveform(WaveformId(id as u32)).unwrap() != expected[id] {
                            mismatches.fetch_add(1, Ordering::Relaxed);
                        }
                        reads.fetch_add(1, Ordering::Relaxed);
                        false
                    });
                    std::thread::yield_now();
                }
            });
        }
    });
    ensure(mismatches.load(Ordering::Relaxed) == 0, || {
        format!("{} waveforms read back wrong", mismatches.load(Ordering::Relaxed))
    })?;
    ensure(reads.load(Ordering::Relaxed) == WAVES, || "not every waveform was read".into())?;
    ensure(store.pages_used() == pages_needed, || {
        format!("used {} pages, expected {pages_needed}", store.pages_used())
    })?;
    waste.record(&store)?;
    Ok(format!(
        "{} unique pages from {WORKERS} workers; {WAVES} waveforms read back exactly while being written",
        WORKERS * PER_WORKER
    ))
}

fn c7_waste_bound(waste: &WasteLog) -> Outcome {
    let runs = waste.runs.load(Ordering::Relaxed);
    let violations = waste.violations.load(Ordering::Relaxed);
    ensure(runs > 0, || "no runs recorded".into())?;
    ensure(violations == 0, || format!("{violations} of {runs} runs exceed the bound"))?;
    Ok(format!(
        "{runs} runs, 0 violations, worst waste/bound = {:.4}",
        waste.worst_ratio_ppm.load(Ordering::Relaxed) as f64 / 1e6
    ))
}

// --- scheduling order --------------------------------------------------------

/// The nine-task DAG. Every task is an AND of its predecessor's output (or a
/// constant-0 net for first-layer tasks) with a private stimulus whose length
/// sets the task's cost; the AND output settles at 0 so successors stay cheap.
fn nine_task_dag(unit: usize) -> (Design, Vec<&'static str>) {
    let names = vec!["A", "B", "C", "D", "E", "F", "G", "H", "I"];
    let cost = [20, 5, 5, 5, 20, 5, 5, 5, 20];
    let preds: [Option<usize>; 9] = [None, None, None, Some(0), Some(1), Some(2), Some(3), Some(4), Some(5)];
    let duration = (20 * unit) as i64 + 10;

    let mut b = NetlistBuilder::new();
    b.add_template(CellTemplate::single_gate("AND2", GateKind::And, 2).unwrap())
        .unwrap();
    let zero = b.net("zero");
    b.stimulus(zero);
    let mut private = Vec::new();
    for n in &names {
        let p = b.net(&format!("s{n}"));
        b.stimulus(p);
        private.push(p);
    }
    for (i, n) in names.iter().enumerate() {
        let pred = match preds[i] {
            Some(p) => format!("o{}", names[p]),
            None => "zero".into(),
        };
        b.cell(n, "AND2", &[&pred, &format!("s{n}")], &[&format!("o{n}")])
            .unwrap();
    }
    let netlist = b.build(duration).unwrap();
    let entries: Vec<DelayEntry> = (0..9)
        .flat_map(|c| {
            (0..2).flat_map(move |pin| {
                [(Edge::Rise, One), (Edge::Fall, Zero), (Edge::Rise, X), (Edge::Fall, X)].map(|(edge, value)| {
                    DelayEntry {
                        cell: CellId(c),
                        in_pin: pin,
                        out_pin: 0,
                        edge,
                        value,
                        delay: 1,
                    }
                })
            })
        })
        .collect();
    let delays = DelayTable::build(&netlist, &entries).unwrap();
    let mut stimuli = Stimuli::default();
    stimuli.waves.insert(zero, tr(&[(0, Zero)]));
    for (i, &p) in private.iter().enumerate() {
        let len = cost[i] * unit;
        stimuli.waves.insert(
            p,
            (0..len)
                .map(|k| Transition::new(k as i64, if k % 2 == 0 { One } else { Zero }))
                .collect(),
        );
    }
    (Design::new(netlist, delays, stimuli).unwrap(), names)
}

fn c9_scheduling_order() -> Outcome {
    let (d, names) = nine_task_dag(50_000);
    let cfg = SimConfig::parallel(3).with_trace(true).with_sizing(Sizing::Expansion(1.5));
    let r = simulate_parallel(&d, &cfg).map_err(|e| e.to_string())?;
    let by_cell: BTreeMap<usize, (u64, u64, usize)> = r
        .stats
        .trace
        .iter()
        .map(|t| (t.cell, (t.start_seq, t.end_seq, t.worker)))
        .collect();
    ensure(by_cell.len() == 9, || "trace is missing cells".into())?;
    let idx = |n: &str| names.iter().position(|&m| m == n).unwrap();
    let (a, c, f) = (by_cell[&idx("A")], by_cell[&idx("C")], by_cell[&idx("F")]);
    ensure(c.1 < f.0, || "F started before C finished".into())?;
    ensure(f.0 < a.1, || {
        format!("F started at seq {} but A finished at seq {}", f.0, a.1)
    })?;
    // Same outputs as the reference.
    let s = simulate_serial(&d, &SimConfig::serial().with_sizing(Sizing::Expansion(1.5))).map_err(|e| e.to_string())?;
    ensure(first_divergence(&d, &s, &r).unwrap().is_none(), || "differs from serial".into())?;
    Ok(format!(
        "start(F)=seq {} < finish(A)=seq {} (A on worker {}, F on worker {})",
        f.0, a.1, a.2, f.2
    ))
}

// --- desk-scale speedup ------------------------------------------------------

fn c10_speedup() -> Outcome {
    let started = Instant::now();
    let d = GenSpec {
        cells: 5_000,
        inputs: 256,
        max_fan_in: 4,
        max_fan_out: 6,
        transitions: 20_000,
        regime: Regime::Skewed,
        duration: 1_000_000,
        min_delay: 1,
        max_delay: 50,
        p_zero_delay: 0.0,
        p_inf_delay: 0.02,
        p_unknown: 0.02,
        seed: 10,
    }
    .generate()
    .map_err(|e| e.to_string())?;
    let w = wcv(&d.stimuli.lengths()).unwrap();
    ensure(w > 1.0, || format!("generated WCV {w:.3} is not high"))?;
    let retries = AtomicUsize::new(0);
    let serial = run_sized(&d, SimConfig::serial(), &retries)?;
    let par = run_sized(&d, SimConfig::parallel(8), &retries)?;
    ensure(first_divergence(&d, &serial, &par).unwrap().is_none(), || "outputs differ".into())?;
    let (ts, tp) = (serial.stats.wall, par.stats.wall);
    let s = speedup(ts, tp);
    let ratios: Vec<f64> = par.stats.workers.iter().map(|w| w.busy_ratio()).collect();
    ensure(ratios.len() == 8 && ratios.iter().all(|r| (0.0..=1.0).contains(r)), || {
        format!("bad busy ratios {ratios:?}")
    })?;
    let took = started.elapsed();
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let detail = format!(
        "WCV {w:.2}; serial {ts:.2?}, parallel(8) {tp:.2?}, speedup {s:.2} on {cores} core(s); busy ratios [{}]",
        ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", ")
    );
    ensure(s > 1.0, || format!("no speedup: {detail}"))?;
    Ok(detail)
}

fn c11_wcv_and_mean() -> Outcome {
    let a = wcv(&[5, 5, 5, 5]).unwrap();
    let b = wcv(&[1, 3]).unwrap();
    let g = geometric_mean(&[2.0, 8.0]).unwrap();
    ensure(a == 0.0, || format!("wcv[5,5,5,5] = {a}"))?;
    ensure(b == 0.5, || format!("wcv[1,3] = {b}"))?;
    ensure(g == 4.0, || format!("geomean{{2,8}} = {g}"))?;
    ensure(speedup(Duration::from_secs(10), Duration::from_secs(2)) == 5.0, || "10/2 != 5".into())?;
    Ok("wcv 0.0 and 0.5, geometric mean 4.0, exact".into())
}

fn main() {
    let waste = WasteLog::default();
    let criteria: Vec<Criterion> = vec![
        ("truth tables", Box::new(c1_truth_tables)),
        ("simultaneous falls", Box::new(c2_simultaneous_falls)),
        ("glitch denied and replaced", Box::new(c3_glitch_denied)),
        ("oracle equivalence", Box::new(|| c4_oracle_equivalence(&waste))),
        ("determinism", Box::new(|| c5_determinism(&waste))),
        ("store integrity under load", Box::new(|| c6_store_integrity(&waste))),
        ("waste bound", Box::new(|| c7_waste_bound(&waste))),
        ("recursive glitch", Box::new(c8_recursive_glitch)),
        ("scheduling order", Box::new(c9_scheduling_order)),
        ("desk-scale speedup", Box::new(c10_speedup)),
        ("wcv and geometric mean", Box::new(c11_wcv_and_mean)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|p| Err(format!("panicked: {p:?}")));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({secs:.2}s) {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({secs:.2}s) {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
