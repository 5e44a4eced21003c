use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use gatesim::engine::stats::{geometric_mean, DesignSummary, RunReport};
use gatesim::engine::{first_divergence, simulate, simulate_parallel, simulate_serial, SimConfig, Sizing};
use gatesim::gen::{GenSpec, Regime};
use gatesim::io::{self, ExportFormat};
use gatesim::{Design, EngineKind, Error};

const EXIT_INPUT: u8 = 1;
const EXIT_STORE_FULL: u8 = 2;
const EXIT_BACKTRACE: u8 = 3;
const EXIT_MISMATCH: u8 = 4;
const EXIT_INTERNAL: u8 = 5;
const EXIT_USAGE: u8 = 64;

const NETLIST_FILE: &str = "design.net";
const DELAY_FILE: &str = "design.dly";
const STIMULUS_FILE: &str = "design.stim";

#[derive(Parser)]
#[command(name = "gatesim", version, about = "Timing-aware 4-value gate-level logic simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a design and write every net's waveform.
    Sim(SimArgs),
    /// Run the serial reference and the parallel engine and diff the results.
    Verify(VerifyArgs),
    /// Write a random design.
    Gen(GenArgs),
    /// Print design statistics, and optionally run both engines.
    Stats(StatsArgs),
}

#[derive(Args)]
struct DesignArgs {
    /// Directory holding design.net, design.dly and design.stim.
    #[arg(long, short = 'd')]
    design: Option<PathBuf>,
    /// Netlist file (overrides --design).
    #[arg(long)]
    netlist: Option<PathBuf>,
    /// Delay table file.
    #[arg(long)]
    delays: Option<PathBuf>,
    /// Stimulus file.
    #[arg(long)]
    stimulus: Option<PathBuf>,
}

#[derive(Args)]
struct EngineArgs {
    #[arg(long, default_value_t = 0, help = "Worker count (0 = host parallelism)")]
    workers: usize,
    /// Slots per store page, including the link slot.
    #[arg(long, default_value_t = gatesim::waveform::DEFAULT_PAGE_LEN)]
    page_len: usize,
    /// Store sizing: a factor on the given transition count, or `worst-case`.
    #[arg(long, default_value = "4")]
    expansion: String,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    design: DesignArgs,
    #[command(flatten)]
    engine_args: EngineArgs,
    /// `parallel` or `serial`.
    #[arg(long, default_value = "parallel")]
    engine: String,
    /// Waveform output file (stdout if absent).
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    /// `native` or `vcd`.
    #[arg(long, default_value = "native")]
    format: String,
    /// Write the key=value report here instead of stderr.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    design: DesignArgs,
    #[command(flatten)]
    engine_args: EngineArgs,
    /// Comma-separated worker counts to check.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    workers_list: Vec<usize>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 100)]
    cells: usize,
    #[arg(long, default_value_t = 8)]
    inputs: usize,
    #[arg(long, default_value_t = 4)]
    fan_in: usize,
    #[arg(long, default_value_t = 8)]
    fan_out: usize,
    /// Longest stimulus, in transitions.
    #[arg(long, default_value_t = 50)]
    transitions: usize,
    /// `uniform` or `skewed` stimulus lengths.
    #[arg(long, default_value = "uniform")]
    regime: String,
    /// Simulation horizon in ps.
    #[arg(long, default_value_t = 10_000)]
    duration: i64,
    /// Smallest finite delay in ps.
    #[arg(long, default_value_t = 1)]
    min_delay: i64,
    /// Largest finite delay in ps.
    #[arg(long, default_value_t = 40)]
    max_delay: i64,
    /// Probability that a delay slot is 0.
    #[arg(long, default_value_t = 0.02)]
    p_zero_delay: f64,
    /// Probability that a delay slot is infinite.
    #[arg(long, default_value_t = 0.02)]
    p_inf_delay: f64,
    /// Probability that a stimulus transition goes to X or Z.
    #[arg(long, default_value_t = 0.05)]
    p_unknown: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; created if missing.
    #[arg(long, short = 'o')]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    design: DesignArgs,
    #[command(flatten)]
    engine_args: EngineArgs,
    /// Run serial and parallel this many times each and report speedups.
    #[arg(long, default_value_t = 0)]
    runs: usize,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure { code, msg: msg.into() }
    }

    fn input(msg: impl Into<String>) -> Self {
        Failure::new(EXIT_INPUT, msg)
    }
}

fn code_for(e: &Error) -> u8 {
    match e {
        Error::StoreFull { .. } => EXIT_STORE_FULL,
        Error::GlitchBacktraceOverflow { .. } => EXIT_BACKTRACE,
        Error::Deadlock { .. } | Error::AlreadyKnown(_) | Error::WaveformUnknown(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

fn sim_failure(e: Error) -> Failure {
    let mut msg = e.to_string();
    if let Error::StoreFull { .. } = e {
        msg.push_str(" (pass --expansion with a larger factor, or --expansion worst-case)");
    }
    Failure::new(code_for(&e), msg)
}

type CliResult<T = ()> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: gatesim::Result<T>) -> CliResult<T> {
    r.map_err(|e| Failure::new(code_for(&e), format!("{}: {e}", path.display())))
}

impl DesignArgs {
    fn paths(&self) -> CliResult<(PathBuf, PathBuf, PathBuf)> {
        let pick = |explicit: &Option<PathBuf>, file: &str, flag: &str| match (explicit, &self.design) {
            (Some(p), _) => Ok(p.clone()),
            (None, Some(dir)) => Ok(dir.join(file)),
            (None, None) => Err(Failure::new(EXIT_USAGE, format!("missing --{flag} (or --design DIR)"))),
        };
        Ok((
            pick(&self.netlist, NETLIST_FILE, "netlist")?,
            pick(&self.delays, DELAY_FILE, "delays")?,
            pick(&self.stimulus, STIMULUS_FILE, "stimulus")?,
        ))
    }

    fn load(&self) -> CliResult<Design> {
        let (n, d, s) = self.paths()?;
        let source = in_file(&n, io::parse_netlist(&read(&n)?))?;
        let stimulus = in_file(&s, io::parse_stimulus(&read(&s)?))?;
        let (netlist, stimuli) = io::bind(&source, &stimulus)
            .map_err(|e| Failure::input(format!("{} + {}: {e}", n.display(), s.display())))?;
        let delays = in_file(&d, io::parse_delays(&read(&d)?, &netlist))?;
        Design::new(netlist, delays, stimuli).map_err(|e| Failure::input(e.to_string()))
    }
}

impl EngineArgs {
    fn config(&self, engine: EngineKind) -> CliResult<SimConfig> {
        let sizing = if self.expansion == "worst-case" {
            Sizing::WorstCase
        } else {
            let f: f64 = self
                .expansion
                .parse()
                .map_err(|_| Failure::new(EXIT_USAGE, format!("bad --expansion `{}`", self.expansion)))?;
            Sizing::Expansion(f)
        };
        let mut cfg = match engine {
            EngineKind::Serial => SimConfig::serial(),
            EngineKind::Parallel => SimConfig::default(),
        };
        if self.workers > 0 && engine == EngineKind::Parallel {
            cfg.workers = self.workers;
        }
        Ok(cfg.with_page_len(self.page_len).with_sizing(sizing))
    }
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(format!("stdout: {e}"))),
    }
}

fn cmd_sim(a: SimArgs) -> CliResult {
    let engine: EngineKind = a.engine.parse().map_err(|e: Error| Failure::new(EXIT_USAGE, e.to_string()))?;
    let format: ExportFormat = a.format.parse().map_err(|e: Error| Failure::new(EXIT_USAGE, e.to_string()))?;
    let cfg = a.engine_args.config(engine)?;
    let design = a.design.load()?;
    let result = simulate(&design, &cfg).map_err(sim_failure)?;
    let waves = result.waveforms().map_err(sim_failure)?;
    write_out(a.out.as_deref(), &io::export_waveforms(&design.netlist, &waves, format))?;
    let report = RunReport::new(&design, &result, None).map_err(sim_failure)?.to_string();
    match &a.stats {
        Some(p) => fs::write(p, report).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            eprint!("{report}");
            Ok(())
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> CliResult {
    let design = a.design.load()?;
    let serial = simulate_serial(&design, &a.engine_args.config(EngineKind::Serial)?).map_err(sim_failure)?;
    for &w in &a.workers_list {
        if w == 0 {
            return Err(Failure::new(EXIT_USAGE, "worker counts must be at least 1"));
        }
        let mut cfg = a.engine_args.config(EngineKind::Parallel)?;
        cfg.workers = w;
        let par = simulate_parallel(&design, &cfg).map_err(sim_failure)?;
        if let Some((net, s, p)) = first_divergence(&design, &serial, &par).map_err(sim_failure)? {
            let show = |ts: &[gatesim::Transition]| {
                ts.iter()
                    .map(|t| format!("{} {}", t.time, t.value))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            return Err(Failure::new(
                EXIT_MISMATCH,
                format!(
                    "workers={w}: net {} differs\n  serial:   {}\n  parallel: {}",
                    design.netlist.net_name(net),
                    show(&s),
                    show(&p)
                ),
            ));
        }
        println!("workers={w} match=true");
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> CliResult {
    let regime: Regime = a.regime.parse().map_err(|e: Error| Failure::new(EXIT_USAGE, e.to_string()))?;
    let params = GenSpec {
        cells: a.cells,
        inputs: a.inputs,
        max_fan_in: a.fan_in,
        max_fan_out: a.fan_out,
        transitions: a.transitions,
        regime,
        duration: a.duration,
        min_delay: a.min_delay,
        max_delay: a.max_delay,
        p_zero_delay: a.p_zero_delay,
        p_inf_delay: a.p_inf_delay,
        p_unknown: a.p_unknown,
        seed: a.seed,
    };
    let d = params.generate().map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    fs::create_dir_all(&a.out).map_err(|e| Failure::input(format!("{}: {e}", a.out.display())))?;
    for (file, text) in [
        (NETLIST_FILE, io::emit_netlist(&d.netlist)),
        (DELAY_FILE, io::emit_delays(&d.netlist, &d.delays)),
        (STIMULUS_FILE, io::emit_stimulus(&d.netlist, &d.stimuli)),
    ] {
        write_out(Some(&a.out.join(file)), &text)?;
    }
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> CliResult {
    let design = a.design.load()?;
    if a.runs == 0 {
        print!("{}", DesignSummary::of(&design));
        return Ok(());
    }
    let serial_cfg = a.engine_args.config(EngineKind::Serial)?;
    let par_cfg = a.engine_args.config(EngineKind::Parallel)?;
    let mut speedups = Vec::with_capacity(a.runs);
    let mut last = None;
    for run in 0..a.runs {
        let s = simulate_serial(&design, &serial_cfg).map_err(sim_failure)?;
        let p = simulate_parallel(&design, &par_cfg).map_err(sim_failure)?;
        let report = RunReport::new(&design, &p, Some(s.stats.wall)).map_err(sim_failure)?;
        let sp = report.speedup.unwrap_or(f64::NAN);
        println!("run.{run}.serial_ms={:.3}", ms(s.stats.wall));
        println!("run.{run}.parallel_ms={:.3}", ms(p.stats.wall));
        println!("run.{run}.speedup={sp:.4}");
        speedups.push(sp);
        last = Some(report);
    }
    if let Some(r) = last {
        print!("{r}");
    }
    match geometric_mean(&speedups) {
        Ok(g) => println!("speedup_geomean={g:.4}"),
        Err(_) => println!("speedup_geomean=nan"),
    }
    Ok(())
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let r = match cli.cmd {
        Cmd::Sim(a) => cmd_sim(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Stats(a) => cmd_stats(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
