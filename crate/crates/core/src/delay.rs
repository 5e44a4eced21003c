//! Pin-to-pin delay lookup indexed by
//! `[cell][input pin][output pin][input edge][output value]`.

use std::fmt;

use crate::error::{Error, Result};
use crate::logic4::{Edge, Logic4};
use crate::netlist::{CellId, Netlist};

/// Delay in picoseconds, or [`Delay::INFINITY`] for "no relation".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Delay(i64);

impl Delay {
    pub const INFINITY: Delay = Delay(i64::MAX);
    pub const ZERO: Delay = Delay(0);

    pub fn ps(ps: i64) -> Result<Self> {
        if ps < 0 {
            Err(Error::NegativeDelay(ps))
        } else if ps == i64::MAX {
            Ok(Delay::INFINITY)
        } else {
            Ok(Delay(ps))
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self != Delay::INFINITY
    }

    #[inline]
    pub fn as_ps(self) -> Option<i64> {
        self.is_finite().then_some(self.0)
    }

    /// `time + self`, saturating to `None` when the delay is infinite or the
    /// sum does not fit.
    #[inline]
    pub fn after(self, time: i64) -> Option<i64> {
        if self.is_finite() {
            time.checked_add(self.0)
        } else {
            None
        }
    }
}

impl fmt::Display for Delay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_ps() {
            Some(ps) => write!(f, "{ps}"),
            None => f.write_str("inf"),
        }
    }
}

/// One annotated delay: input pin `in_pin` changing with `edge` makes output
/// pin `out_pin` move to `value` after `delay`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayEntry {
    pub cell: CellId,
    pub in_pin: usize,
    pub out_pin: usize,
    pub edge: Edge,
    pub value: Logic4,
    pub delay: i64,
}

const EDGES: usize = 2;
const VALUES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayTable {
    /// Start of each cell's block in `delays`.
    offsets: Vec<usize>,
    /// `(inputs, outputs)` per cell.
    dims: Vec<(usize, usize)>,
    delays: Vec<Delay>,
    /// Which slots came from an entry rather than a default or the X fill.
    explicit: Vec<bool>,
}

fn value_slot(v: Logic4) -> Result<usize> {
    match v {
        Logic4::Zero => Ok(0),
        Logic4::One => Ok(1),
        Logic4::X => Ok(2),
        Logic4::Z => Err(Error::BadDelayValue(v)),
    }
}

impl DelayTable {
    /// All slots start at infinity. After the entries are applied, each X slot
    /// that was not given explicitly becomes `min(0 slot, 1 slot)` of the same
    /// coordinates.
    pub fn build(netlist: &Netlist, entries: &[DelayEntry]) -> Result<Self> {
        let mut offsets = Vec::with_capacity(netlist.cells().len());
        let mut dims = Vec::with_capacity(netlist.cells().len());
        let mut total = 0;
        for (i, _) in netlist.cells().iter().enumerate() {
            let t = netlist.template_of(CellId(i as u32));
            let d = (t.input_pins().len(), t.output_pins().len());
            offsets.push(total);
            dims.push(d);
            total += d.0 * d.1 * EDGES * VALUES;
        }
        let mut table = DelayTable {
            offsets,
            dims,
            delays: vec![Delay::INFINITY; total],
            explicit: vec![false; total],
        };

        for e in entries {
            let name = || {
                netlist
                    .cells()
                    .get(e.cell.index())
                    .map(|c| c.name.clone())
                    .unwrap_or_else(|| format!("#{}", e.cell.index()))
            };
            let &(n_in, n_out) = table
                .dims
                .get(e.cell.index())
                .ok_or_else(|| Error::UnknownCell(name()))?;
            if e.in_pin >= n_in {
                return Err(Error::UnknownPin {
                    cell: name(),
                    pin: format!("input #{}", e.in_pin),
                });
            }
            if e.out_pin >= n_out {
                return Err(Error::UnknownPin {
                    cell: name(),
                    pin: format!("output #{}", e.out_pin),
                });
            }
            let delay = Delay::ps(e.delay)?;
            let slot = table.slot(e.cell, e.in_pin, e.out_pin, e.edge, value_slot(e.value)?);
            table.delays[slot] = delay;
            table.explicit[slot] = true;
        }

        for base in (0..total).step_by(VALUES) {
            if !table.explicit[base + 2] {
                table.delays[base + 2] = table.delays[base].min(table.delays[base + 1]);
            }
        }
        Ok(table)
    }

    #[inline]
    fn slot(&self, cell: CellId, in_pin: usize, out_pin: usize, edge: Edge, value: usize) -> usize {
        let (_, n_out) = self.dims[cell.index()];
        self.offsets[cell.index()] + ((in_pin * n_out + out_pin) * EDGES + edge as usize) * VALUES + value
    }

    /// Direct lookup. `value` must be a gate output value (never `Z`).
    #[inline]
    pub fn get(&self, cell: CellId, in_pin: usize, out_pin: usize, edge: Edge, value: Logic4) -> Delay {
        let v = match value {
            Logic4::Zero => 0,
            Logic4::One => 1,
            _ => 2,
        };
        self.delays[self.slot(cell, in_pin, out_pin, edge, v)]
    }

    /// Smallest delay among the inputs that changed at this timestamp.
    #[inline]
    pub fn final_delay(
        &self,
        cell: CellId,
        triggered: &[(usize, Edge)],
        out_pin: usize,
        value: Logic4,
    ) -> Delay {
        triggered
            .iter()
            .map(|&(pin, edge)| self.get(cell, pin, out_pin, edge, value))
            .min()
            .unwrap_or(Delay::INFINITY)
    }

    /// Entries that were given explicitly, in table order.
    pub fn explicit_entries(&self) -> Vec<DelayEntry> {
        let mut out = Vec::new();
        for (ci, &(n_in, n_out)) in self.dims.iter().enumerate() {
            let cell = CellId(ci as u32);
            for in_pin in 0..n_in {
                for out_pin in 0..n_out {
                    for edge in [Edge::Rise, Edge::Fall] {
                        for (vi, value) in [Logic4::Zero, Logic4::One, Logic4::X].into_iter().enumerate() {
                            let s = self.slot(cell, in_pin, out_pin, edge, vi);
                            if self.explicit[s] {
                                out.push(DelayEntry {
                                    cell,
                                    in_pin,
                                    out_pin,
                                    edge,
                                    value,
                                    delay: self.delays[s].as_ps().unwrap_or(i64::MAX),
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn cell_count(&self) -> usize {
        self.dims.len()
    }
}
