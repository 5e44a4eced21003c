//! Timing-aware 4-value gate-level logic simulation.
//!
//! Two engines share one set of semantics:
//!
//! * [`engine::simulate_serial`] is a classic event-driven simulator with a
//!   global time-ordered queue. It is the reference.
//! * [`engine::simulate_parallel`] statically assigns cells to workers, and each
//!   worker evaluates a cell as soon as all of its input waveforms are published
//!   in the shared [`waveform::CsrpStore`]. There is exactly one hand-off in and
//!   one hand-off out; workers never wait on topological layers.
//!
//! Waveforms of every net (given and computed) live in the same paged store, so
//! a reader walks the producer's pages directly without copies.

pub mod delay;
pub mod design;
pub mod engine;
pub mod error;
pub mod gen;
pub mod io;
pub mod logic4;
pub mod netlist;
pub mod waveform;

pub use delay::{Delay, DelayEntry, DelayTable};
pub use design::{Design, Stimuli};
pub use engine::{simulate_parallel, simulate_serial, EngineKind, SimConfig, SimResult};
pub use error::{Error, Result};
pub use logic4::{Edge, GateKind, Logic4};
pub use netlist::{CellId, CellTemplate, NetId, Netlist};
pub use waveform::{CsrpStore, Transition, WaveformId};
