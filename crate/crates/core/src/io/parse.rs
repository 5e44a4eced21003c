use std::collections::{BTreeMap, HashMap, HashSet};

use crate::delay::{DelayEntry, DelayTable};
use crate::design::{Design, Stimuli};
use crate::error::{Error, Result};
use crate::logic4::{Edge, GateKind, Logic4};
use crate::netlist::{Cell, CellTemplate, Gate, NetId, Netlist, Operand};
use crate::waveform::{validate_transitions, Transition};

/// Non-empty lines with comments stripped, as `(line number, tokens)`.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn at<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    })
}

fn int(line: usize, tok: &str, what: &str) -> Result<i64> {
    tok.parse::<i64>()
        .map_err(|_| Error::parse(line, format!("expected {what}, found `{tok}`")))
}

/// Splits `in a b out z` into the two pin lists.
fn in_out<'a>(line: usize, toks: &[&'a str]) -> Result<(Vec<&'a str>, Vec<&'a str>)> {
    if toks.first() != Some(&"in") {
        return Err(Error::parse(line, "expected `in <pins...> out <pins...>`"));
    }
    let out = toks
        .iter()
        .position(|&t| t == "out")
        .ok_or_else(|| Error::parse(line, "missing `out`"))?;
    Ok((toks[1..out].to_vec(), toks[out + 1..].to_vec()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellDecl {
    pub name: String,
    pub template: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub line: usize,
}

/// A syntactically valid netlist file whose names resolve, not yet bound to
/// stimuli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetlistSource {
    pub templates: Vec<CellTemplate>,
    pub nets: Vec<String>,
    pub cells: Vec<CellDecl>,
}

pub fn parse_netlist(text: &str) -> Result<NetlistSource> {
    let mut templates: Vec<CellTemplate> = Vec::new();
    let mut template_names = HashSet::new();
    let mut nets = Vec::new();
    let mut net_names = HashSet::new();
    let mut cells: Vec<CellDecl> = Vec::new();
    let mut cell_names = HashSet::new();

    let mut it = lines(text);
    while let Some((line, toks)) = it.next() {
        match toks[0] {
            "net" => {
                if toks.len() < 2 {
                    return Err(Error::parse(line, "`net` needs at least one name"));
                }
                for &n in &toks[1..] {
                    if !net_names.insert(n.to_string()) {
                        return Err(Error::parse(line, format!("net `{n}` declared twice")));
                    }
                    nets.push(n.to_string());
                }
            }
            "template" => {
                let t = parse_template(line, &toks, &mut it)?;
                if !template_names.insert(t.name().to_string()) {
                    return Err(Error::parse(line, format!("template `{}` defined twice", t.name())));
                }
                templates.push(t);
            }
            "cell" => {
                if toks.len() < 3 {
                    return Err(Error::parse(line, "expected `cell <name> <template> in ... out ...`"));
                }
                let (ins, outs) = in_out(line, &toks[3..])?;
                let name = toks[1];
                if !cell_names.insert(name.to_string()) {
                    return Err(Error::parse(line, format!("cell `{name}` declared twice")));
                }
                let template = templates
                    .iter()
                    .find(|t| t.name() == toks[2])
                    .ok_or_else(|| Error::parse(line, Error::UnknownTemplate(toks[2].into()).to_string()))?;
                if ins.len() != template.input_pins().len() || outs.len() != template.output_pins().len() {
                    return Err(Error::parse(
                        line,
                        format!(
                            "cell `{name}`: template `{}` has {} input(s) and {} output(s), got {} and {}",
                            template.name(),
                            template.input_pins().len(),
                            template.output_pins().len(),
                            ins.len(),
                            outs.len()
                        ),
                    ));
                }
                for n in ins.iter().chain(&outs) {
                    if !net_names.contains(*n) {
                        return Err(Error::parse(line, Error::UnknownNet(n.to_string()).to_string()));
                    }
                }
                cells.push(CellDecl {
                    name: name.to_string(),
                    template: toks[2].to_string(),
                    inputs: ins.iter().map(|s| s.to_string()).collect(),
                    outputs: outs.iter().map(|s| s.to_string()).collect(),
                    line,
                });
            }
            other => return Err(Error::parse(line, format!("unknown statement `{other}`"))),
        }
    }
    Ok(NetlistSource { templates, nets, cells })
}

fn parse_template<'a>(
    line: usize,
    header: &[&str],
    body: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
) -> Result<CellTemplate> {
    if header.len() < 2 {
        return Err(Error::parse(line, "expected `template <name> in ... out ...`"));
    }
    let name = header[1];
    let (ins, outs) = in_out(line, &header[2..])?;
    let mut names: HashMap<&str, Operand> = ins.iter().enumerate().map(|(i, &p)| (p, Operand::Input(i))).collect();
    let mut gates = Vec::new();
    let mut assigned: Vec<Option<Operand>> = vec![None; outs.len()];

    loop {
        let Some((l, toks)) = body.next() else {
            return Err(Error::parse(line, format!("template `{name}` has no `end`")));
        };
        match toks[0] {
            "end" => break,
            "gate" => {
                if toks.len() < 4 {
                    return Err(Error::parse(l, "expected `gate <name> <kind> <operands...>`"));
                }
                let kind: GateKind = at(l, toks[2].parse())?;
                let operands = toks[3..]
                    .iter()
                    .map(|&o| {
                        names
                            .get(o)
                            .copied()
                            .ok_or_else(|| Error::parse(l, format!("unknown operand `{o}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if names.insert(toks[1], Operand::Gate(gates.len())).is_some() || outs.contains(&toks[1]) {
                    return Err(Error::parse(l, format!("name `{}` already used in template", toks[1])));
                }
                gates.push(Gate::new(kind, operands));
            }
            "assign" => {
                if toks.len() != 3 {
                    return Err(Error::parse(l, "expected `assign <output pin> <operand>`"));
                }
                let pin = outs
                    .iter()
                    .position(|&p| p == toks[1])
                    .ok_or_else(|| Error::parse(l, format!("`{}` is not an output pin", toks[1])))?;
                let op = names
                    .get(toks[2])
                    .copied()
                    .ok_or_else(|| Error::parse(l, format!("unknown operand `{}`", toks[2])))?;
                if assigned[pin].replace(op).is_some() {
                    return Err(Error::parse(l, format!("output `{}` assigned twice", toks[1])));
                }
            }
            other => return Err(Error::parse(l, format!("unknown template statement `{other}`"))),
        }
    }

    let outputs = assigned
        .iter()
        .zip(&outs)
        .map(|(a, p)| a.ok_or_else(|| Error::parse(line, format!("output `{p}` is never assigned"))))
        .collect::<Result<Vec<_>>>()?;
    at(
        line,
        CellTemplate::new(
            name,
            ins.iter().map(|s| s.to_string()).collect(),
            outs.iter().map(|s| s.to_string()).collect(),
            gates,
            outputs,
        ),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveDecl {
    pub net: String,
    pub transitions: Vec<Transition>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StimulusSource {
    pub duration: i64,
    pub waves: Vec<WaveDecl>,
}

impl StimulusSource {
    pub fn get(&self, net: &str) -> Option<&[Transition]> {
        self.waves
            .iter()
            .find(|w| w.net == net)
            .map(|w| w.transitions.as_slice())
    }
}

/// Parses and validates a stimulus file on its own: times strictly increase,
/// values alternate, and everything lies within the duration.
pub fn parse_stimulus(text: &str) -> Result<StimulusSource> {
    let mut duration = None;
    let mut waves: Vec<WaveDecl> = Vec::new();
    let mut seen = HashSet::new();
    for (line, toks) in lines(text) {
        match toks[0] {
            "duration" => {
                if duration.is_some() {
                    return Err(Error::parse(line, "duration given twice"));
                }
                if toks.len() != 2 {
                    return Err(Error::parse(line, "expected `duration <ps>`"));
                }
                let d = int(line, toks[1], "a duration in ps")?;
                if d < 0 {
                    return Err(Error::parse(line, "duration must be non-negative"));
                }
                duration = Some(d);
            }
            "wave" => {
                let Some(d) = duration else {
                    return Err(Error::parse(line, "`duration` must come before the first `wave`"));
                };
                if toks.len() < 2 || toks.len() % 2 != 0 {
                    return Err(Error::parse(line, "expected `wave <net> (<time> <value>)*`"));
                }
                let net = toks[1];
                if !seen.insert(net) {
                    return Err(Error::parse(line, format!("second waveform for net `{net}`")));
                }
                let transitions = toks[2..]
                    .chunks(2)
                    .map(|p| {
                        let time = int(line, p[0], "a time in ps")?;
                        let value = at(line, p[1].parse::<Logic4>())?;
                        Ok(Transition::new(time, value))
                    })
                    .collect::<Result<Vec<_>>>()?;
                at(line, validate_transitions(waves.len(), &transitions, Some(d)))
                    .map_err(|e| match e {
                        Error::Parse { line, msg } => Error::parse(line, format!("net `{net}`: {msg}")),
                        other => other,
                    })?;
                waves.push(WaveDecl {
                    net: net.to_string(),
                    transitions,
                    line,
                });
            }
            other => return Err(Error::parse(line, format!("unknown statement `{other}`"))),
        }
    }
    let duration = duration.ok_or_else(|| Error::parse(1, "missing `duration`"))?;
    Ok(StimulusSource { duration, waves })
}

/// Resolves wave lines against the netlist and builds the validated netlist.
pub fn bind(source: &NetlistSource, stimulus: &StimulusSource) -> Result<(Netlist, Stimuli)> {
    let ids: HashMap<&str, NetId> = source
        .nets
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), NetId(i as u32)))
        .collect();
    let template_ids: HashMap<&str, usize> = source
        .templates
        .iter()
        .enumerate()
        .map(|(i, t)| (t.name(), i))
        .collect();

    let mut cell_driven = HashSet::new();
    let cells: Vec<Cell> = source
        .cells
        .iter()
        .map(|c| {
            for o in &c.outputs {
                cell_driven.insert(o.as_str());
            }
            Cell {
                name: c.name.clone(),
                template: template_ids[c.template.as_str()],
                inputs: c.inputs.iter().map(|n| ids[n.as_str()]).collect(),
                outputs: c.outputs.iter().map(|n| ids[n.as_str()]).collect(),
            }
        })
        .collect();

    let mut waves = BTreeMap::new();
    for w in &stimulus.waves {
        let id = *ids
            .get(w.net.as_str())
            .ok_or_else(|| Error::parse(w.line, Error::UnknownNet(w.net.clone()).to_string()))?;
        if cell_driven.contains(w.net.as_str()) {
            return Err(Error::parse(
                w.line,
                Error::MultipleDrivers { net: w.net.clone() }.to_string(),
            ));
        }
        waves.insert(id, w.transitions.clone());
    }
    let stimulus_nets: Vec<NetId> = waves.keys().copied().collect();
    let netlist = Netlist::build(
        source.templates.clone(),
        source.nets.clone(),
        cells,
        &stimulus_nets,
        stimulus.duration,
    )?;
    Ok((netlist, Stimuli { waves }))
}

/// Parses a delay file against a built netlist.
pub fn parse_delays(text: &str, netlist: &Netlist) -> Result<DelayTable> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (line, toks) in lines(text) {
        if toks[0] != "delay" {
            return Err(Error::parse(line, format!("unknown statement `{}`", toks[0])));
        }
        if toks.len() != 7 {
            return Err(Error::parse(
                line,
                "expected `delay <cell> <in_pin> <out_pin> <rise|fall> <0|1|x> <ps|inf>`",
            ));
        }
        let cell = netlist
            .cell_by_name(toks[1])
            .ok_or_else(|| Error::parse(line, Error::UnknownCell(toks[1].into()).to_string()))?;
        let t = netlist.template_of(cell);
        let unknown_pin = |pin: &str| {
            Error::parse(
                line,
                Error::UnknownPin {
                    cell: toks[1].into(),
                    pin: pin.into(),
                }
                .to_string(),
            )
        };
        let in_pin = t.input_index(toks[2]).ok_or_else(|| unknown_pin(toks[2]))?;
        let out_pin = t.output_index(toks[3]).ok_or_else(|| unknown_pin(toks[3]))?;
        let edge: Edge = at(line, toks[4].parse())?;
        let value: Logic4 = at(line, toks[5].parse())?;
        if value == Logic4::Z {
            return Err(Error::parse(line, Error::BadDelayValue(value).to_string()));
        }
        let delay = if toks[6].eq_ignore_ascii_case("inf") {
            i64::MAX
        } else {
            let d = int(line, toks[6], "a delay in ps or `inf`")?;
            if d < 0 {
                return Err(Error::parse(line, Error::NegativeDelay(d).to_string()));
            }
            d
        };
        if !seen.insert((cell, in_pin, out_pin, edge, value)) {
            return Err(Error::parse(line, "duplicate delay entry"));
        }
        entries.push(DelayEntry {
            cell,
            in_pin,
            out_pin,
            edge,
            value,
            delay,
        });
    }
    DelayTable::build(netlist, &entries)
}

/// Parses all three files into a validated design.
pub fn parse_design(netlist: &str, delays: &str, stimulus: &str) -> Result<Design> {
    let source = parse_netlist(netlist)?;
    let stimulus = parse_stimulus(stimulus)?;
    let (netlist, stimuli) = bind(&source, &stimulus)?;
    let delays = parse_delays(delays, &netlist)?;
    Design::new(netlist, delays, stimuli)
}
