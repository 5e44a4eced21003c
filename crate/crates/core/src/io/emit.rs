use std::fmt::Write as _;
use std::str::FromStr;

use crate::delay::DelayTable;
use crate::design::Stimuli;
use crate::error::{Error, Result};
use crate::logic4::Logic4;
use crate::netlist::{CellTemplate, NetId, Netlist, Operand};
use crate::waveform::Transition;

const NETS_PER_LINE: usize = 16;

/// Gate names as emitted: `g0`, `g1`, ... unless a pin already looks like
/// that, in which case the prefix is lengthened.
fn gate_prefix(t: &CellTemplate) -> String {
    let mut prefix = "g".to_string();
    let clashes = |p: &str| {
        t.input_pins().iter().chain(t.output_pins()).any(|pin| {
            pin.strip_prefix(p)
                .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
        })
    };
    while clashes(&prefix) {
        prefix.push('g');
    }
    prefix
}

fn emit_template(out: &mut String, t: &CellTemplate) {
    let prefix = gate_prefix(t);
    let name = |op: Operand| match op {
        Operand::Input(i) => t.input_pins()[i].clone(),
        Operand::Gate(g) => format!("{prefix}{g}"),
    };
    let _ = writeln!(
        out,
        "template {} in {} out {}",
        t.name(),
        t.input_pins().join(" "),
        t.output_pins().join(" ")
    );
    for (i, g) in t.gates().iter().enumerate() {
        let ops: Vec<String> = g.operands.iter().map(|&o| name(o)).collect();
        let _ = writeln!(out, "  gate {prefix}{i} {} {}", g.kind, ops.join(" "));
    }
    for (pin, &op) in t.output_pins().iter().zip(t.outputs()) {
        let _ = writeln!(out, "  assign {pin} {}", name(op));
    }
    out.push_str("end\n");
}

pub fn emit_netlist(netlist: &Netlist) -> String {
    let mut out = String::new();
    for chunk in netlist.net_names().chunks(NETS_PER_LINE) {
        let _ = writeln!(out, "net {}", chunk.join(" "));
    }
    for t in netlist.templates() {
        emit_template(&mut out, t);
    }
    for c in netlist.cells() {
        let names = |ids: &[NetId]| ids.iter().map(|&n| netlist.net_name(n)).collect::<Vec<_>>().join(" ");
        let _ = writeln!(
            out,
            "cell {} {} in {} out {}",
            c.name,
            netlist.templates()[c.template].name(),
            names(&c.inputs),
            names(&c.outputs)
        );
    }
    out
}

pub fn emit_delays(netlist: &Netlist, delays: &DelayTable) -> String {
    let mut out = String::new();
    for e in delays.explicit_entries() {
        let cell = netlist.cell(e.cell);
        let t = netlist.template_of(e.cell);
        let _ = write!(
            out,
            "delay {} {} {} {} {} ",
            cell.name,
            t.input_pins()[e.in_pin],
            t.output_pins()[e.out_pin],
            e.edge.name(),
            e.value.to_char()
        );
        if e.delay == i64::MAX {
            out.push_str("inf\n");
        } else {
            let _ = writeln!(out, "{}", e.delay);
        }
    }
    out
}

fn wave_line(out: &mut String, name: &str, ts: &[Transition]) {
    out.push_str("wave ");
    out.push_str(name);
    for t in ts {
        let _ = write!(out, " {} {}", t.time, t.value.to_char());
    }
    out.push('\n');
}

pub fn emit_stimulus(netlist: &Netlist, stimuli: &Stimuli) -> String {
    let mut out = format!("duration {}\n", netlist.duration());
    for (&net, ts) in &stimuli.waves {
        wave_line(&mut out, netlist.net_name(net), ts);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    /// Stimulus-file syntax with a `wave` line for every net.
    Native,
    Vcd,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "native" => Ok(ExportFormat::Native),
            "vcd" => Ok(ExportFormat::Vcd),
            _ => Err(Error::Invalid(format!("unknown export format `{s}`"))),
        }
    }
}

/// Renders one waveform per net, indexed by net id.
pub fn export_waveforms(netlist: &Netlist, waves: &[Vec<Transition>], format: ExportFormat) -> String {
    match format {
        ExportFormat::Native => {
            let mut out = format!("duration {}\n", netlist.duration());
            for (i, ts) in waves.iter().enumerate() {
                wave_line(&mut out, netlist.net_name(NetId(i as u32)), ts);
            }
            out
        }
        ExportFormat::Vcd => vcd(netlist, waves),
    }
}

/// Short printable identifier for the `i`th variable.
fn vcd_id(mut i: usize) -> String {
    const FIRST: u8 = b'!';
    const RADIX: usize = (b'~' - b'!' + 1) as usize;
    let mut s = String::new();
    loop {
        s.push((FIRST + (i % RADIX) as u8) as char);
        i /= RADIX;
        if i == 0 {
            break;
        }
        i -= 1;
    }
    s
}

fn vcd_char(v: Logic4) -> char {
    match v {
        Logic4::Zero => '0',
        Logic4::One => '1',
        Logic4::X => 'x',
        Logic4::Z => 'z',
    }
}

fn vcd(netlist: &Netlist, waves: &[Vec<Transition>]) -> String {
    let mut out = String::from("$timescale 1ps $end\n$scope module top $end\n");
    let ids: Vec<String> = (0..waves.len()).map(vcd_id).collect();
    for (i, id) in ids.iter().enumerate() {
        let _ = writeln!(out, "$var wire 1 {id} {} $end", netlist.net_name(NetId(i as u32)));
    }
    out.push_str("$upscope $end\n$enddefinitions $end\n");

    // Every net starts at x; a change at time 0 replaces it in the first section.
    let mut changes: Vec<(i64, usize, Logic4)> = Vec::new();
    let mut initial = vec![Logic4::X; waves.len()];
    for (i, ts) in waves.iter().enumerate() {
        for t in ts {
            if t.time == 0 {
                initial[i] = t.value;
            } else {
                changes.push((t.time, i, t.value));
            }
        }
    }
    changes.sort_by_key(|&(t, i, _)| (t, i));

    out.push_str("#0\n$dumpvars\n");
    for (i, v) in initial.iter().enumerate() {
        let _ = writeln!(out, "{}{}", vcd_char(*v), ids[i]);
    }
    out.push_str("$end\n");
    let mut current = None;
    for (t, i, v) in changes {
        if current != Some(t) {
            let _ = writeln!(out, "#{t}");
            current = Some(t);
        }
        let _ = writeln!(out, "{}{}", vcd_char(v), ids[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn vcd_ids_are_unique_and_printable() {
        let ids: Vec<String> = (0..20_000).map(vcd_id).collect();
        assert_eq!(ids[0], "!");
        assert_eq!(ids[93], "~");
        assert_eq!(ids[94], "!!");
        assert!(ids.iter().all(|s| s.bytes().all(|b| (b'!'..=b'~').contains(&b))));
        assert_eq!(ids.iter().collect::<HashSet<_>>().len(), ids.len());
    }
}
