//! 4-value logic: `0`, `1`, `X` (unknown) and `Z` (high impedance).
//!
//! `Z` is only ever produced by stimuli. Every gate treats it as `X` and no gate
//! output is ever `Z`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Logic4 {
    Zero = 0,
    One = 1,
    X = 2,
    Z = 3,
}

impl Logic4 {
    pub const ALL: [Logic4; 4] = [Logic4::Zero, Logic4::One, Logic4::X, Logic4::Z];

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            '0' => Ok(Logic4::Zero),
            '1' => Ok(Logic4::One),
            'x' | 'X' => Ok(Logic4::X),
            'z' | 'Z' => Ok(Logic4::Z),
            other => Err(Error::BadLogicChar(other)),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Logic4::Zero => '0',
            Logic4::One => '1',
            Logic4::X => 'x',
            Logic4::Z => 'z',
        }
    }

    #[inline]
    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Logic4::Zero),
            1 => Some(Logic4::One),
            2 => Some(Logic4::X),
            3 => Some(Logic4::Z),
            _ => None,
        }
    }

    #[inline]
    pub fn is_definite(self) -> bool {
        matches!(self, Logic4::Zero | Logic4::One)
    }

    /// Position in the order `0 < X < 1` used for edge classification.
    #[inline]
    fn level(self) -> u8 {
        match normalize_z(self) {
            Logic4::Zero => 0,
            Logic4::X => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for Logic4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl FromStr for Logic4 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Logic4::from_char(c),
            _ => Err(Error::Invalid(format!("expected one logic value, got {s:?}"))),
        }
    }
}

#[inline]
pub fn normalize_z(v: Logic4) -> Logic4 {
    if v == Logic4::Z {
        Logic4::X
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Buf,
    Not,
    And,
    Or,
    Xor,
    Nand,
    Nor,
    Xnor,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::Buf,
        GateKind::Not,
        GateKind::And,
        GateKind::Or,
        GateKind::Xor,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Xnor,
    ];

    pub fn is_unary(self) -> bool {
        matches!(self, GateKind::Buf | GateKind::Not)
    }

    pub fn accepts_arity(self, n: usize) -> bool {
        if self.is_unary() {
            n == 1
        } else {
            n >= 2
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Buf => "buf",
            GateKind::Not => "not",
            GateKind::And => "and",
            GateKind::Or => "or",
            GateKind::Xor => "xor",
            GateKind::Nand => "nand",
            GateKind::Nor => "nor",
            GateKind::Xnor => "xnor",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown gate kind `{s}`")))
    }
}

// Rows and columns are indexed by the normalized code (0, 1, X).
const AND_TABLE: [[Logic4; 3]; 3] = {
    use Logic4::*;
    [[Zero, Zero, Zero], [Zero, One, X], [Zero, X, X]]
};
const OR_TABLE: [[Logic4; 3]; 3] = {
    use Logic4::*;
    [[Zero, One, X], [One, One, One], [X, One, X]]
};
const XOR_TABLE: [[Logic4; 3]; 3] = {
    use Logic4::*;
    [[Zero, One, X], [One, Zero, X], [X, X, X]]
};

#[inline]
fn idx(v: Logic4) -> usize {
    normalize_z(v) as usize
}

#[inline]
pub fn and2(a: Logic4, b: Logic4) -> Logic4 {
    AND_TABLE[idx(a)][idx(b)]
}

#[inline]
pub fn or2(a: Logic4, b: Logic4) -> Logic4 {
    OR_TABLE[idx(a)][idx(b)]
}

#[inline]
pub fn xor2(a: Logic4, b: Logic4) -> Logic4 {
    XOR_TABLE[idx(a)][idx(b)]
}

#[inline]
pub fn not1(a: Logic4) -> Logic4 {
    match normalize_z(a) {
        Logic4::Zero => Logic4::One,
        Logic4::One => Logic4::Zero,
        _ => Logic4::X,
    }
}

/// Evaluates one primitive gate. N-ary gates fold the binary operator left to
/// right.
pub fn eval_gate(kind: GateKind, inputs: &[Logic4]) -> Result<Logic4> {
    if !kind.accepts_arity(inputs.len()) {
        return Err(Error::Arity {
            kind,
            got: inputs.len(),
        });
    }
    Ok(eval_gate_unchecked(kind, inputs))
}

#[inline]
pub(crate) fn eval_gate_unchecked(kind: GateKind, inputs: &[Logic4]) -> Logic4 {
    let fold = |op: fn(Logic4, Logic4) -> Logic4| {
        inputs[1..]
            .iter()
            .fold(normalize_z(inputs[0]), |acc, &v| op(acc, v))
    };
    match kind {
        GateKind::Buf => normalize_z(inputs[0]),
        GateKind::Not => not1(inputs[0]),
        GateKind::And => fold(and2),
        GateKind::Or => fold(or2),
        GateKind::Xor => fold(xor2),
        GateKind::Nand => not1(fold(and2)),
        GateKind::Nor => not1(fold(or2)),
        GateKind::Xnor => not1(fold(xor2)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    Rise = 0,
    Fall = 1,
}

impl Edge {
    pub fn name(self) -> &'static str {
        match self {
            Edge::Rise => "rise",
            Edge::Fall => "fall",
        }
    }
}

impl FromStr for Edge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rise" | "posedge" => Ok(Edge::Rise),
            "fall" | "negedge" => Ok(Edge::Fall),
            _ => Err(Error::Invalid(format!("unknown edge `{s}`"))),
        }
    }
}

/// Classifies a transition under the order `0 < X < 1` (so `0 -> X` rises and
/// `X -> 0` falls).
pub fn classify_edge(old: Logic4, new: Logic4) -> Result<Edge> {
    let (a, b) = (old.level(), new.level());
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Ok(Edge::Rise),
        std::cmp::Ordering::Greater => Ok(Edge::Fall),
        std::cmp::Ordering::Equal => Err(Error::NoTransition { old, new }),
    }
}
