//! Line-oriented text formats and waveform export.
//!
//! Three input files describe a design:
//!
//! ```text
//! # netlist
//! net a b z
//! template AND2 in a b out z
//!   gate g0 and a b
//!   assign z g0
//! end
//! cell u0 AND2 in a b out z
//!
//! # delays
//! delay u0 a z rise 1 15
//! delay u0 b z fall 0 5
//!
//! # stimulus
//! duration 100
//! wave a 0 0 5 1
//! wave b 0 1 10 0
//! ```
//!
//! A net is stimulus-driven exactly when the stimulus file has a `wave` line
//! for it. `#` starts a comment. Delay values are picoseconds or `inf`.

mod emit;
mod parse;

pub use emit::{emit_delays, emit_netlist, emit_stimulus, export_waveforms, ExportFormat};
pub use parse::{
    bind, parse_delays, parse_design, parse_netlist, parse_stimulus, CellDecl, NetlistSource, StimulusSource,
    WaveDecl,
};

use crate::error::{Error, Result};

/// Coefficient of variation of waveform lengths: population standard deviation
/// over the mean.
pub fn wcv(lengths: &[usize]) -> Result<f64> {
    if lengths.is_empty() {
        return Err(Error::Invalid("coefficient of variation of an empty list".into()));
    }
    let n = lengths.len() as f64;
    let mean = lengths.iter().map(|&l| l as f64).sum::<f64>() / n;
    if mean == 0.0 {
        return Err(Error::Invalid("coefficient of variation with zero mean".into()));
    }
    let var = lengths
        .iter()
        .map(|&l| {
            let d = l as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    Ok(var.sqrt() / mean)
}
