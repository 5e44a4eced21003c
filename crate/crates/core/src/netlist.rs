//! Cell templates, cell instances and the net graph that connects them.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::logic4::{eval_gate_unchecked, GateKind, Logic4};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetId(pub u32);

impl NetId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId(pub u32);

impl CellId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Source of a gate operand or a template output inside a template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operand {
    /// Template input pin, by position.
    Input(usize),
    /// Output of an earlier gate in the template's gate list.
    Gate(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub operands: Vec<Operand>,
}

impl Gate {
    pub fn new(kind: GateKind, operands: Vec<Operand>) -> Self {
        Gate { kind, operands }
    }
}

/// A standard-cell template: a small, backwards-referencing list of primitive
/// gates evaluated with zero internal delay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellTemplate {
    name: String,
    input_pins: Vec<String>,
    output_pins: Vec<String>,
    gates: Vec<Gate>,
    outputs: Vec<Operand>,
}

impl CellTemplate {
    pub fn new(
        name: impl Into<String>,
        input_pins: Vec<String>,
        output_pins: Vec<String>,
        gates: Vec<Gate>,
        outputs: Vec<Operand>,
    ) -> Result<Self> {
        let name = name.into();
        let err = |msg: String| Error::Template {
            template: name.clone(),
            msg,
        };
        if input_pins.is_empty() {
            return Err(err("needs at least one input pin".into()));
        }
        if output_pins.is_empty() {
            return Err(err("needs at least one output pin".into()));
        }
        if outputs.len() != output_pins.len() {
            return Err(err(format!(
                "{} output pins but {} output assignments",
                output_pins.len(),
                outputs.len()
            )));
        }
        let mut seen = HashSet::new();
        for pin in input_pins.iter().chain(&output_pins) {
            if !seen.insert(pin.as_str()) {
                return Err(err(format!("duplicate pin name `{pin}`")));
            }
        }

        let mut used = vec![false; input_pins.len()];
        let check = |op: Operand, limit: usize, used: &mut [bool]| -> Result<()> {
            match op {
                Operand::Input(i) if i < input_pins.len() => {
                    used[i] = true;
                    Ok(())
                }
                Operand::Input(i) => Err(err(format!("input operand {i} out of range"))),
                Operand::Gate(g) if g < limit => Ok(()),
                Operand::Gate(g) => Err(err(format!(
                    "gate operand g{g} does not refer to an earlier gate"
                ))),
            }
        };
        for (gi, gate) in gates.iter().enumerate() {
            if !gate.kind.accepts_arity(gate.operands.len()) {
                return Err(err(format!(
                    "gate g{gi} ({}) cannot take {} operand(s)",
                    gate.kind,
                    gate.operands.len()
                )));
            }
            for &op in &gate.operands {
                check(op, gi, &mut used)?;
            }
        }
        for &op in &outputs {
            check(op, gates.len(), &mut used)?;
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(err(format!("input pin `{}` is never used", input_pins[i])));
        }

        Ok(CellTemplate {
            name,
            input_pins,
            output_pins,
            gates,
            outputs,
        })
    }

    /// One primitive gate with inputs `a`, `b`, `c`, ... and output `z`.
    pub fn single_gate(name: impl Into<String>, kind: GateKind, arity: usize) -> Result<Self> {
        let inputs = (0..arity).map(pin_letter).collect::<Vec<_>>();
        CellTemplate::new(
            name,
            inputs,
            vec!["z".into()],
            vec![Gate::new(kind, (0..arity).map(Operand::Input).collect())],
            vec![Operand::Gate(0)],
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input_pins(&self) -> &[String] {
        &self.input_pins
    }

    pub fn output_pins(&self) -> &[String] {
        &self.output_pins
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[Operand] {
        &self.outputs
    }

    pub fn input_index(&self, pin: &str) -> Option<usize> {
        self.input_pins.iter().position(|p| p == pin)
    }

    pub fn output_index(&self, pin: &str) -> Option<usize> {
        self.output_pins.iter().position(|p| p == pin)
    }

    /// Zero-delay evaluation of all internal gates.
    pub fn eval(&self, inputs: &[Logic4]) -> Result<Vec<Logic4>> {
        if inputs.len() != self.input_pins.len() {
            return Err(Error::Template {
                template: self.name.clone(),
                msg: format!(
                    "expects {} input value(s), got {}",
                    self.input_pins.len(),
                    inputs.len()
                ),
            });
        }
        let mut scratch = TemplateScratch::default();
        let mut out = vec![Logic4::X; self.output_pins.len()];
        self.eval_into(inputs, &mut scratch, &mut out);
        Ok(out)
    }

    /// Allocation-free evaluation for the engines. `inputs` and `out` must
    /// match the pin counts.
    pub(crate) fn eval_into(&self, inputs: &[Logic4], scratch: &mut TemplateScratch, out: &mut [Logic4]) {
        let TemplateScratch { gate_values, operands } = scratch;
        gate_values.clear();
        let fetch = |op: Operand, gv: &[Logic4]| match op {
            Operand::Input(i) => inputs[i],
            Operand::Gate(g) => gv[g],
        };
        for gate in &self.gates {
            operands.clear();
            operands.extend(gate.operands.iter().map(|&op| fetch(op, gate_values)));
            let v = eval_gate_unchecked(gate.kind, operands);
            gate_values.push(v);
        }
        for (slot, &op) in out.iter_mut().zip(&self.outputs) {
            // An output wired straight to an input pin still never shows Z.
            *slot = crate::logic4::normalize_z(fetch(op, gate_values));
        }
    }
}

#[derive(Debug, Default)]
pub(crate) struct TemplateScratch {
    gate_values: Vec<Logic4>,
    operands: Vec<Logic4>,
}

fn pin_letter(i: usize) -> String {
    if i < 25 {
        // skip 'z', reserved for the output
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("i{i}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    Stimulus,
    Cell { cell: CellId, pin: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub name: String,
    pub template: usize,
    pub inputs: Vec<NetId>,
    pub outputs: Vec<NetId>,
}

/// A validated, immutable design. Every net carries exactly one waveform whose
/// id equals the net index; sinks read the driver's waveform directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    templates: Vec<CellTemplate>,
    cells: Vec<Cell>,
    net_names: Vec<String>,
    drivers: Vec<Driver>,
    sinks: Vec<Vec<(CellId, usize)>>,
    duration: i64,
    topo: Vec<CellId>,
}

impl Netlist {
    /// Validates and wires up a design. Nets listed in `stimulus_nets` get a
    /// stimulus driver; all other nets must be driven by exactly one cell
    /// output.
    pub fn build(
        templates: Vec<CellTemplate>,
        net_names: Vec<String>,
        cells: Vec<Cell>,
        stimulus_nets: &[NetId],
        duration: i64,
    ) -> Result<Self> {
        let mut n = Self::build_unchecked(templates, net_names, cells, stimulus_nets, duration)?;
        n.topo = n.check_acyclic()?;
        Ok(n)
    }

    /// Everything but the acyclicity check. Only the engines' deadlock tests
    /// need a cyclic netlist.
    pub(crate) fn build_unchecked(
        templates: Vec<CellTemplate>,
        net_names: Vec<String>,
        cells: Vec<Cell>,
        stimulus_nets: &[NetId],
        duration: i64,
    ) -> Result<Self> {
        if duration < 0 {
            return Err(Error::Invalid(format!("negative duration {duration}")));
        }
        if net_names.len() >= u32::MAX as usize || cells.len() >= u32::MAX as usize {
            return Err(Error::Invalid("design too large".into()));
        }
        let net_count = net_names.len();
        let net_name = |id: NetId| {
            net_names
                .get(id.index())
                .cloned()
                .unwrap_or_else(|| id.to_string())
        };
        let mut drivers: Vec<Option<Driver>> = vec![None; net_count];
        let mut sinks = vec![Vec::new(); net_count];

        for &net in stimulus_nets {
            let slot = drivers
                .get_mut(net.index())
                .ok_or_else(|| Error::UnknownNet(net.to_string()))?;
            if slot.replace(Driver::Stimulus).is_some() {
                return Err(Error::MultipleDrivers { net: net_name(net) });
            }
        }

        for (ci, cell) in cells.iter().enumerate() {
            let tmpl = templates
                .get(cell.template)
                .ok_or_else(|| Error::UnknownTemplate(format!("#{}", cell.template)))?;
            if cell.inputs.len() != tmpl.input_pins.len() || cell.outputs.len() != tmpl.output_pins.len() {
                return Err(Error::PinCount {
                    cell: cell.name.clone(),
                    msg: format!(
                        "template {} has {} input(s) and {} output(s), cell connects {} and {}",
                        tmpl.name,
                        tmpl.input_pins.len(),
                        tmpl.output_pins.len(),
                        cell.inputs.len(),
                        cell.outputs.len()
                    ),
                });
            }
            let id = CellId(ci as u32);
            for (pin, &net) in cell.inputs.iter().enumerate() {
                sinks
                    .get_mut(net.index())
                    .ok_or_else(|| Error::UnknownNet(net.to_string()))?
                    .push((id, pin));
            }
            for (pin, &net) in cell.outputs.iter().enumerate() {
                let slot = drivers
                    .get_mut(net.index())
                    .ok_or_else(|| Error::UnknownNet(net.to_string()))?;
                if slot.replace(Driver::Cell { cell: id, pin }).is_some() {
                    return Err(Error::MultipleDrivers { net: net_name(net) });
                }
            }
        }

        let drivers = drivers
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                d.ok_or_else(|| Error::UndrivenNet {
                    net: net_names[i].clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Netlist {
            templates,
            cells,
            net_names,
            drivers,
            sinks,
            duration,
            topo: Vec::new(),
        })
    }

    /// Kahn's algorithm over the cell dependency graph. On failure the error
    /// carries the cells of one cycle in dependency order.
    pub fn check_acyclic(&self) -> Result<Vec<CellId>> {
        let n = self.cells.len();
        let mut indegree = vec![0usize; n];
        for cell in &self.cells {
            for &out in &cell.outputs {
                for &(sink, _) in &self.sinks[out.index()] {
                    indegree[sink.index()] += 1;
                }
            }
        }
        let mut ready: Vec<usize> = (0..n).filter(|&c| indegree[c] == 0).collect();
        ready.reverse();
        let mut order = Vec::with_capacity(n);
        while let Some(c) = ready.pop() {
            order.push(CellId(c as u32));
            for &out in &self.cells[c].outputs {
                for &(sink, _) in &self.sinks[out.index()] {
                    let d = &mut indegree[sink.index()];
                    *d -= 1;
                    if *d == 0 {
                        ready.push(sink.index());
                    }
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }

        // Every leftover cell has a leftover predecessor; walk backwards until
        // a cell repeats.
        let start = (0..n).find(|&c| indegree[c] > 0).expect("leftover cell");
        let mut path = vec![start];
        let mut pos = HashMap::from([(start, 0usize)]);
        let mut cur = start;
        loop {
            let pred = self.cells[cur]
                .inputs
                .iter()
                .filter_map(|&net| match self.drivers[net.index()] {
                    Driver::Cell { cell, .. } if indegree[cell.index()] > 0 => Some(cell.index()),
                    _ => None,
                })
                .next()
                .expect("leftover cell has a leftover predecessor");
            if let Some(&at) = pos.get(&pred) {
                let mut cycle = path[at..].to_vec();
                cycle.reverse();
                return Err(Error::Cycle(cycle));
            }
            pos.insert(pred, path.len());
            path.push(pred);
            cur = pred;
        }
    }

    pub fn templates(&self) -> &[CellTemplate] {
        &self.templates
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        &self.cells[id.index()]
    }

    pub fn template_of(&self, id: CellId) -> &CellTemplate {
        &self.templates[self.cells[id.index()].template]
    }

    pub fn net_count(&self) -> usize {
        self.net_names.len()
    }

    pub fn net_names(&self) -> &[String] {
        &self.net_names
    }

    pub fn net_name(&self, net: NetId) -> &str {
        &self.net_names[net.index()]
    }

    pub fn net_by_name(&self, name: &str) -> Option<NetId> {
        self.net_names
            .iter()
            .position(|n| n == name)
            .map(|i| NetId(i as u32))
    }

    pub fn cell_by_name(&self, name: &str) -> Option<CellId> {
        self.cells
            .iter()
            .position(|c| c.name == name)
            .map(|i| CellId(i as u32))
    }

    pub fn driver(&self, net: NetId) -> Driver {
        self.drivers[net.index()]
    }

    pub fn sinks(&self, net: NetId) -> &[(CellId, usize)] {
        &self.sinks[net.index()]
    }

    pub fn stimulus_nets(&self) -> impl Iterator<Item = NetId> + '_ {
        self.drivers
            .iter()
            .enumerate()
            .filter(|(_, d)| matches!(d, Driver::Stimulus))
            .map(|(i, _)| NetId(i as u32))
    }

    pub fn duration(&self) -> i64 {
        self.duration
    }

    /// Topological order computed at build time.
    pub fn topo_order(&self) -> &[CellId] {
        &self.topo
    }

    pub fn basic_gate_count(&self) -> usize {
        self.cells
            .iter()
            .map(|c| self.templates[c.template].gates.len())
            .sum()
    }

    pub fn max_outputs(&self) -> usize {
        self.templates.iter().map(|t| t.output_pins.len()).max().unwrap_or(0)
    }
}

/// Incremental construction by name, used by the parsers, the generator and
/// tests.
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    templates: Vec<CellTemplate>,
    template_ids: HashMap<String, usize>,
    net_names: Vec<String>,
    net_ids: HashMap<String, NetId>,
    cells: Vec<Cell>,
    stimulus: Vec<NetId>,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_template(&mut self, t: CellTemplate) -> Result<usize> {
        if self.template_ids.contains_key(t.name()) {
            return Err(Error::Template {
                template: t.name().to_string(),
                msg: "defined twice".into(),
            });
        }
        let id = self.templates.len();
        self.template_ids.insert(t.name().to_string(), id);
        self.templates.push(t);
        Ok(id)
    }

    pub fn template_id(&self, name: &str) -> Option<usize> {
        self.template_ids.get(name).copied()
    }

    /// Declares (or looks up) a net by name.
    pub fn net(&mut self, name: &str) -> NetId {
        if let Some(&id) = self.net_ids.get(name) {
            return id;
        }
        let id = NetId(self.net_names.len() as u32);
        self.net_names.push(name.to_string());
        self.net_ids.insert(name.to_string(), id);
        id
    }

    pub fn has_net(&self, name: &str) -> bool {
        self.net_ids.contains_key(name)
    }

    pub fn lookup_net(&self, name: &str) -> Option<NetId> {
        self.net_ids.get(name).copied()
    }

    pub fn cell(&mut self, name: &str, template: &str, inputs: &[&str], outputs: &[&str]) -> Result<CellId> {
        let template = self
            .template_id(template)
            .ok_or_else(|| Error::UnknownTemplate(template.to_string()))?;
        let inputs = inputs.iter().map(|n| self.net(n)).collect();
        let outputs = outputs.iter().map(|n| self.net(n)).collect();
        Ok(self.cell_ids(name, template, inputs, outputs))
    }

    pub fn cell_ids(&mut self, name: &str, template: usize, inputs: Vec<NetId>, outputs: Vec<NetId>) -> CellId {
        let id = CellId(self.cells.len() as u32);
        self.cells.push(Cell {
            name: name.to_string(),
            template,
            inputs,
            outputs,
        });
        id
    }

    pub fn stimulus(&mut self, net: NetId) {
        self.stimulus.push(net);
    }

    pub fn build(self, duration: i64) -> Result<Netlist> {
        Netlist::build(self.templates, self.net_names, self.cells, &self.stimulus, duration)
    }

    #[cfg(test)]
    pub(crate) fn build_unchecked(self, duration: i64) -> Result<Netlist> {
        Netlist::build_unchecked(self.templates, self.net_names, self.cells, &self.stimulus, duration)
    }
}
