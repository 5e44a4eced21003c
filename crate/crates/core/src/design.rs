use std::collections::BTreeMap;

use crate::delay::DelayTable;
use crate::error::{Error, Result};
use crate::netlist::{NetId, Netlist};
use crate::waveform::{validate_transitions, Transition};

/// Given waveforms, one per stimulus-driven net.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stimuli {
    pub waves: BTreeMap<NetId, Vec<Transition>>,
}

impl Stimuli {
    pub fn get(&self, net: NetId) -> Option<&[Transition]> {
        self.waves.get(&net).map(Vec::as_slice)
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.waves.values().map(Vec::len).collect()
    }

    pub fn total_transitions(&self) -> usize {
        self.waves.values().map(Vec::len).sum()
    }
}

/// A complete simulation input: netlist, delays and stimuli that agree with
/// each other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Design {
    pub netlist: Netlist,
    pub delays: DelayTable,
    pub stimuli: Stimuli,
}

impl Design {
    pub fn new(netlist: Netlist, delays: DelayTable, stimuli: Stimuli) -> Result<Self> {
        if delays.cell_count() != netlist.cells().len() {
            return Err(Error::Invalid(format!(
                "delay table covers {} cells, netlist has {}",
                delays.cell_count(),
                netlist.cells().len()
            )));
        }
        let expected: Vec<NetId> = netlist.stimulus_nets().collect();
        let given: Vec<NetId> = stimuli.waves.keys().copied().collect();
        if expected != given {
            let missing = expected.iter().find(|n| !stimuli.waves.contains_key(n));
            let extra = given.iter().find(|n| !expected.contains(n));
            return Err(match (missing, extra) {
                (_, Some(&n)) => Error::MultipleDrivers {
                    net: netlist.net_name(n).to_string(),
                },
                (Some(&n), _) => Error::UndrivenNet {
                    net: netlist.net_name(n).to_string(),
                },
                _ => unreachable!(),
            });
        }
        for (net, ts) in &stimuli.waves {
            validate_transitions(net.index(), ts, Some(netlist.duration()))?;
        }
        Ok(Design {
            netlist,
            delays,
            stimuli,
        })
    }
}
