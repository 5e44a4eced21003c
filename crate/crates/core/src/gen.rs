//! Seeded random designs for testing and benchmarking.

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::delay::{DelayEntry, DelayTable};
use crate::design::{Design, Stimuli};
use crate::error::{Error, Result};
use crate::logic4::{Edge, GateKind, Logic4};
use crate::netlist::{CellId, CellTemplate, Gate, NetId, NetlistBuilder, Operand};
use crate::waveform::Transition;

/// Distribution of stimulus lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Every stimulus has exactly the maximum length.
    Uniform,
    /// Heavy-tailed lengths: a few long stimuli, many short ones.
    Skewed,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Uniform => "uniform",
            Regime::Skewed => "skewed",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Regime::Uniform),
            "skewed" => Ok(Regime::Skewed),
            _ => Err(Error::Invalid(format!("unknown regime `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub cells: usize,
    pub inputs: usize,
    pub max_fan_in: usize,
    /// Soft bound: extra pins avoid nets at the bound but fall back to any
    /// net after a few tries.
    pub max_fan_out: usize,
    /// Longest stimulus, in transitions.
    pub transitions: usize,
    pub regime: Regime,
    pub duration: i64,
    pub min_delay: i64,
    pub max_delay: i64,
    /// Probability that a delay slot is zero.
    pub p_zero_delay: f64,
    /// Probability that a delay slot is left infinite.
    pub p_inf_delay: f64,
    /// Probability that a stimulus transition goes to `X` or `Z`.
    pub p_unknown: f64,
    pub seed: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            cells: 100,
            inputs: 8,
            max_fan_in: 4,
            max_fan_out: 8,
            transitions: 50,
            regime: Regime::Uniform,
            duration: 10_000,
            min_delay: 1,
            max_delay: 40,
            p_zero_delay: 0.02,
            p_inf_delay: 0.02,
            p_unknown: 0.05,
            seed: 0,
        }
    }
}

fn n_ary(name: &str, kind: GateKind, arity: usize) -> CellTemplate {
    CellTemplate::single_gate(name, kind, arity).expect("library template")
}

fn compound(name: &str, ins: &[&str], outs: &[&str], gates: Vec<Gate>, outputs: Vec<Operand>) -> CellTemplate {
    CellTemplate::new(
        name,
        ins.iter().map(|s| s.to_string()).collect(),
        outs.iter().map(|s| s.to_string()).collect(),
        gates,
        outputs,
    )
    .expect("library template")
}

/// The cell library used by the generator.
pub fn library() -> Vec<CellTemplate> {
    use GateKind::*;
    use Operand::{Gate as G, Input as I};
    vec![
        n_ary("BUF", Buf, 1),
        n_ary("INV", Not, 1),
        n_ary("AND2", And, 2),
        n_ary("OR2", Or, 2),
        n_ary("NAND2", Nand, 2),
        n_ary("NOR2", Nor, 2),
        n_ary("XOR2", Xor, 2),
        n_ary("XNOR2", Xnor, 2),
        n_ary("AND3", And, 3),
        n_ary("OR4", Or, 4),
        compound(
            "AOI21",
            &["a", "b", "c"],
            &["z"],
            vec![
                Gate::new(And, vec![I(0), I(1)]),
                Gate::new(Or, vec![G(0), I(2)]),
                Gate::new(Not, vec![G(1)]),
            ],
            vec![G(2)],
        ),
        compound(
            "OAI22",
            &["a", "b", "c", "d"],
            &["z"],
            vec![
                Gate::new(Or, vec![I(0), I(1)]),
                Gate::new(Or, vec![I(2), I(3)]),
                Gate::new(Nand, vec![G(0), G(1)]),
            ],
            vec![G(2)],
        ),
        compound(
            "HA",
            &["a", "b"],
            &["s", "c"],
            vec![Gate::new(Xor, vec![I(0), I(1)]), Gate::new(And, vec![I(0), I(1)])],
            vec![G(0), G(1)],
        ),
    ]
}

impl GenSpec {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Invalid(format!("generator: {m}")));
        if self.inputs == 0 {
            return bad("need at least one input");
        }
        if !(1..=4).contains(&self.max_fan_in) {
            return bad("fan-in bound must be 1..=4");
        }
        if self.max_fan_out == 0 {
            return bad("fan-out bound must be at least 1");
        }
        if self.duration < 0 || (self.transitions as u128) > self.duration as u128 + 1 {
            return bad("duration too short for the requested transitions");
        }
        if self.min_delay < 0 || self.max_delay < self.min_delay {
            return bad("bad delay range");
        }
        for p in [self.p_zero_delay, self.p_inf_delay, self.p_unknown] {
            if !(0.0..=1.0).contains(&p) {
                return bad("probabilities must lie in [0, 1]");
            }
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Design> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut b = NetlistBuilder::new();
        let lib = library();
        let mut usable = Vec::new();
        for t in lib {
            let fits = t.input_pins().len() <= self.max_fan_in;
            let id = b.add_template(t)?;
            if fits {
                usable.push(id);
            }
        }
        let templates: Vec<(usize, usize)> = {
            let probe = library();
            usable
                .iter()
                .map(|&id| (probe[id].input_pins().len(), probe[id].output_pins().len()))
                .collect()
        };

        let mut nets: Vec<NetId> = Vec::new();
        let mut fanout: Vec<usize> = Vec::new();
        // Nets nobody reads yet, oldest first.
        let mut frontier = std::collections::VecDeque::new();
        for i in 0..self.inputs {
            let n = b.net(&format!("i{i}"));
            b.stimulus(n);
            nets.push(n);
            fanout.push(0);
            frontier.push_back(n);
        }

        for c in 0..self.cells {
            let pick = rng.gen_range(0..usable.len());
            let (arity, n_out) = templates[pick];
            let mut ins: Vec<NetId> = Vec::with_capacity(arity);
            while let Some(n) = frontier.pop_front() {
                if fanout[n.index()] == 0 {
                    ins.push(n);
                    break;
                }
            }
            while ins.len() < arity {
                let mut choice = None;
                for _ in 0..8 {
                    let n = nets[rng.gen_range(0..nets.len())];
                    if fanout[n.index()] < self.max_fan_out && !ins.contains(&n) {
                        choice = Some(n);
                        break;
                    }
                }
                ins.push(choice.unwrap_or_else(|| nets[rng.gen_range(0..nets.len())]));
            }
            for n in &ins {
                fanout[n.index()] += 1;
            }
            let outs: Vec<NetId> = (0..n_out)
                .map(|k| {
                    let name = if n_out == 1 { format!("n{c}") } else { format!("n{c}_{k}") };
                    b.net(&name)
                })
                .collect();
            for &o in &outs {
                nets.push(o);
                fanout.push(0);
                frontier.push_back(o);
            }
            b.cell_ids(&format!("u{c}"), usable[pick], ins, outs);
        }

        let netlist = b.build(self.duration)?;

        let mut entries = Vec::new();
        for (ci, cell) in netlist.cells().iter().enumerate() {
            for in_pin in 0..cell.inputs.len() {
                for out_pin in 0..cell.outputs.len() {
                    for edge in [Edge::Rise, Edge::Fall] {
                        for value in [Logic4::Zero, Logic4::One, Logic4::X] {
                            // X slots are mostly left to the default fill.
                            if value == Logic4::X && !rng.gen_bool(0.1) {
                                continue;
                            }
                            let delay = if rng.gen_bool(self.p_inf_delay) {
                                continue;
                            } else if rng.gen_bool(self.p_zero_delay) {
                                0
                            } else {
                                rng.gen_range(self.min_delay..=self.max_delay)
                            };
                            entries.push(DelayEntry {
                                cell: CellId(ci as u32),
                                in_pin,
                                out_pin,
                                edge,
                                value,
                                delay,
                            });
                        }
                    }
                }
            }
        }
        let delays = DelayTable::build(&netlist, &entries)?;

        let mut stimuli = Stimuli::default();
        for net in netlist.stimulus_nets().collect::<Vec<_>>() {
            let len = self.stimulus_len(&mut rng);
            stimuli.waves.insert(net, self.random_wave(&mut rng, len));
        }
        Design::new(netlist, delays, stimuli)
    }

    fn stimulus_len(&self, rng: &mut impl Rng) -> usize {
        match self.regime {
            Regime::Uniform => self.transitions,
            Regime::Skewed => {
                let r: f64 = rng.gen();
                ((self.transitions as f64 * r.powi(6)).ceil() as usize)
                    .max(1)
                    .min(self.transitions)
            }
        }
    }

    fn random_wave(&self, rng: &mut impl Rng, len: usize) -> Vec<Transition> {
        let span = self.duration as u64 + 1;
        let mut times: Vec<i64> = match usize::try_from(span) {
            Ok(span) => index::sample(rng, span, len).into_iter().map(|t| t as i64).collect(),
            Err(_) => {
                let mut set = std::collections::BTreeSet::new();
                while set.len() < len {
                    set.insert(rng.gen_range(0..=self.duration));
                }
                set.into_iter().collect()
            }
        };
        times.sort_unstable();
        let mut prev = Logic4::X;
        times
            .into_iter()
            .map(|time| {
                let value = loop {
                    let v = if rng.gen_bool(self.p_unknown) {
                        *[Logic4::X, Logic4::Z].choose(rng).unwrap()
                    } else {
                        match prev {
                            Logic4::Zero => Logic4::One,
                            Logic4::One => Logic4::Zero,
                            _ => *[Logic4::Zero, Logic4::One].choose(rng).unwrap(),
                        }
                    };
                    if v != prev {
                        break v;
                    }
                };
                prev = value;
                Transition::new(time, value)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_design() {
        let s = GenSpec {
            seed: 7,
            ..GenSpec::default()
        };
        assert_eq!(s.generate().unwrap(), s.generate().unwrap());
        let other = GenSpec { seed: 8, ..s.clone() }.generate().unwrap();
        assert_ne!(s.generate().unwrap(), other);
    }

    #[test]
    fn fan_in_one_single_input_is_a_chain() {
        let d = GenSpec {
            cells: 30,
            inputs: 1,
            max_fan_in: 1,
            ..GenSpec::default()
        }
        .generate()
        .unwrap();
        let n = &d.netlist;
        for (i, c) in n.cells().iter().enumerate() {
            assert_eq!(c.inputs.len(), 1);
            let expected = if i == 0 { NetId(0) } else { n.cells()[i - 1].outputs[0] };
            assert_eq!(c.inputs[0], expected);
        }
    }

    #[test]
    fn bounds_are_respected() {
        let d = GenSpec {
            cells: 400,
            max_fan_in: 3,
            max_fan_out: 3,
            seed: 3,
            ..GenSpec::default()
        }
        .generate()
        .unwrap();
        for c in d.netlist.cells() {
            assert!(c.inputs.len() <= 3);
        }
        for w in d.stimuli.waves.values() {
            assert_eq!(w.len(), 50);
        }
    }
}
