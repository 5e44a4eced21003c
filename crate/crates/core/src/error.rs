use thiserror::Error;

use crate::logic4::{GateKind, Logic4};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{kind} gate cannot take {got} input(s)")]
    Arity { kind: GateKind, got: usize },
    #[error("{old} -> {new} is not a transition")]
    NoTransition { old: Logic4, new: Logic4 },
    #[error("invalid logic value character {0:?}")]
    BadLogicChar(char),

    #[error("template `{template}`: {msg}")]
    Template { template: String, msg: String },
    #[error("net {net} has more than one driver")]
    MultipleDrivers { net: String },
    #[error("net {net} has no driver")]
    UndrivenNet { net: String },
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("unknown net `{0}`")]
    UnknownNet(String),
    #[error("cell {cell}: {msg}")]
    PinCount { cell: String, msg: String },
    #[error("combinational cycle through cells {0:?}")]
    Cycle(Vec<usize>),

    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("cell {cell} has no pin `{pin}`")]
    UnknownPin { cell: String, pin: String },
    #[error("negative delay {0} ps")]
    NegativeDelay(i64),
    #[error("delay output value must be 0, 1 or x, got {0}")]
    BadDelayValue(Logic4),

    #[error("invalid store geometry: {0}")]
    StoreArgs(String),
    #[error(
        "waveform store full ({capacity_pages} pages of {page_len} slots); \
         retry with a larger expansion factor (current {expansion})"
    )]
    StoreFull {
        capacity_pages: usize,
        page_len: usize,
        expansion: String,
    },
    #[error(
        "glitch backtrace on waveform {waveform} at {time} ps reaches transitions already \
         flushed (last flushed at {last_flushed} ps); increase the page length"
    )]
    GlitchBacktraceOverflow {
        waveform: usize,
        time: i64,
        last_flushed: i64,
    },
    #[error("waveform {waveform}: transition {index} is not later than its predecessor")]
    NonMonotoneTime { waveform: usize, index: usize },
    #[error("waveform {waveform}: transition {index} repeats the previous value")]
    RepeatedValue { waveform: usize, index: usize },
    #[error("waveform {waveform}: transition {index} lies outside [0, {duration}]")]
    OutOfRange {
        waveform: usize,
        index: usize,
        duration: i64,
    },
    #[error("waveform {0} is already known")]
    AlreadyKnown(usize),
    #[error("waveform {0} is not known yet")]
    WaveformUnknown(usize),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no worker made progress; {remaining} cell(s) can never become ready")]
    Deadlock { remaining: usize },
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
