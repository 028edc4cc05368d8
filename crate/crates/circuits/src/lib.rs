//! Four small circuits with named input and output bits, seeded random
//! simulation, and the two-trace independence property over their bits.
//!
//! | kind       | inputs                          | outputs                        |
//! |------------|---------------------------------|--------------------------------|
//! | `xor4`     | `lhs_0..3`, `rhs_0..3`          | `out_0..3`                     |
//! | `mux_comb` | `in1_0..3`, `in2_0..3`, `sel`   | `out1_0`, `out1_1`, `out2_0`, `out2_1` |
//! | `mux_seq`  | as `mux_comb`                   | as `mux_comb`                  |
//! | `counter3` | `incr`, `decr`                  | `overflow`                     |
//!
//! Both muxes route `sel ? in1 : in2` through a 2-bit function of the low and
//! high halves and send the result to `out1` when `sel` is set, else to
//! `out2`. In `mux_seq` the function also mixes in a 2-bit register that
//! accumulates its inputs. Registers update after the outputs of a step are
//! computed.

mod sim;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use hypermon_core::formula::{Formula, QuantifiedFormula};

pub use sim::{random_traces, trace_name, CircuitTrace, InputBias, Manifest};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("missing value for input `{0}`")]
    MissingInput(String),
    #[error("`{bit}` is not {role} of {kind}")]
    UnknownBit {
        bit: String,
        role: &'static str,
        kind: CircuitKind,
    },
    #[error("unknown circuit kind `{0}` (expected xor4, mux_comb, mux_seq or counter3)")]
    UnknownKind(String),
    #[error("probability for `{bit}` must lie in [0, 1], got {p}")]
    BadProbability { bit: String, p: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitKind {
    Xor4,
    MuxComb,
    MuxSeq,
    Counter3,
}

impl CircuitKind {
    pub const ALL: [CircuitKind; 4] = [
        CircuitKind::Xor4,
        CircuitKind::MuxComb,
        CircuitKind::MuxSeq,
        CircuitKind::Counter3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CircuitKind::Xor4 => "xor4",
            CircuitKind::MuxComb => "mux_comb",
            CircuitKind::MuxSeq => "mux_seq",
            CircuitKind::Counter3 => "counter3",
        }
    }

    pub fn inputs(self) -> Vec<String> {
        match self {
            CircuitKind::Xor4 => bits("lhs", 4).chain(bits("rhs", 4)).collect(),
            CircuitKind::MuxComb | CircuitKind::MuxSeq => bits("in1", 4)
                .chain(bits("in2", 4))
                .chain(["sel".to_string()])
                .collect(),
            CircuitKind::Counter3 => vec!["incr".into(), "decr".into()],
        }
    }

    pub fn outputs(self) -> Vec<String> {
        match self {
            CircuitKind::Xor4 => bits("out", 4).collect(),
            CircuitKind::MuxComb | CircuitKind::MuxSeq => {
                bits("out1", 2).chain(bits("out2", 2)).collect()
            }
            CircuitKind::Counter3 => vec!["overflow".into()],
        }
    }

    /// Inputs and outputs, in that order.
    pub fn all_bits(self) -> Vec<String> {
        let mut v = self.inputs();
        v.extend(self.outputs());
        v
    }
}

fn bits(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (0..n).map(move |i| format!("{prefix}_{i}"))
}

impl fmt::Display for CircuitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CircuitKind {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CircuitKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CircuitError::UnknownKind(s.to_string()))
    }
}

/// A bit valuation by name.
pub type Valuation = BTreeMap<String, bool>;

/// A circuit with its register contents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircuitModel {
    kind: CircuitKind,
    state: u8,
}

impl CircuitModel {
    /// Registers start at zero.
    pub fn new(kind: CircuitKind) -> Self {
        Self { kind, state: 0 }
    }

    pub fn with_state(kind: CircuitKind, state: u8) -> Self {
        let mask = match kind {
            CircuitKind::MuxSeq => 0b11,
            CircuitKind::Counter3 => 0b111,
            _ => 0,
        };
        Self {
            kind,
            state: state & mask,
        }
    }

    pub fn kind(&self) -> CircuitKind {
        self.kind
    }

    pub fn state(&self) -> u8 {
        self.state
    }

    /// One clock step on named inputs.
    pub fn step(&self, inputs: &Valuation) -> Result<(Valuation, CircuitModel), CircuitError> {
        let names = self.kind.inputs();
        let mut packed = 0u32;
        for (i, name) in names.iter().enumerate() {
            match inputs.get(name) {
                Some(true) => packed |= 1 << i,
                Some(false) => {}
                None => return Err(CircuitError::MissingInput(name.clone())),
            }
        }
        let (out, next) = self.step_packed(packed);
        let outputs = self
            .kind
            .outputs()
            .into_iter()
            .enumerate()
            .map(|(i, name)| (name, out >> i & 1 == 1))
            .collect();
        Ok((outputs, next))
    }

    /// Inputs and outputs packed in [`CircuitKind::inputs`] and
    /// [`CircuitKind::outputs`] order.
    pub fn step_packed(&self, inputs: u32) -> (u32, CircuitModel) {
        let bit = |i: u32| inputs >> i & 1 == 1;
        match self.kind {
            CircuitKind::Xor4 => ((inputs & 0xf) ^ (inputs >> 4 & 0xf), *self),
            CircuitKind::MuxComb | CircuitKind::MuxSeq => {
                let sel = bit(8);
                let combined = if sel { inputs & 0xf } else { inputs >> 4 & 0xf };
                let mixed = (combined & 0b11) ^ (combined >> 2 & 0b11);
                let (f, next) = if self.kind == CircuitKind::MuxSeq {
                    (mixed ^ self.state as u32, self.state ^ mixed as u8)
                } else {
                    (mixed, 0)
                };
                let out = if sel { f } else { f << 2 };
                (out, CircuitModel { state: next, ..*self })
            }
            CircuitKind::Counter3 => {
                let (incr, decr) = (bit(0), bit(1));
                let overflow = self.state == 7 && incr && !decr;
                let next = if incr && !decr {
                    (self.state + 1) & 7
                } else if !incr && decr && self.state > 0 {
                    self.state - 1
                } else {
                    self.state
                };
                (overflow as u32, CircuitModel { state: next, ..*self })
            }
        }
    }
}

/// `∀p.∀q. (⋀_{o ∈ targets} o@p <-> o@q) W (⋁_{x ∈ inputs \ sources} !(x@p <-> x@q))`:
/// the targets agree until the two runs differ on an input outside `sources`.
pub fn independence_property(
    kind: CircuitKind,
    sources: &[String],
    targets: &[String],
) -> Result<QuantifiedFormula, CircuitError> {
    let inputs = kind.inputs();
    let outputs = kind.outputs();
    if let Some(s) = sources.iter().find(|s| !inputs.contains(s)) {
        return Err(CircuitError::UnknownBit {
            bit: s.clone(),
            role: "an input",
            kind,
        });
    }
    if let Some(t) = targets.iter().find(|t| !outputs.contains(t)) {
        return Err(CircuitError::UnknownBit {
            bit: t.clone(),
            role: "an output",
            kind,
        });
    }
    let same = |b: &str| Formula::iff(Formula::atom(b, "p"), Formula::atom(b, "q"));
    let outputs_agree = Formula::conjunction(targets.iter().map(|t| same(t)));
    let inputs_differ = Formula::disjunction(
        inputs
            .iter()
            .filter(|x| !sources.contains(x))
            .map(|x| Formula::not(same(x))),
    );
    Ok(QuantifiedFormula::forall(
        &["p", "q"],
        Formula::weak_until(outputs_agree, inputs_differ),
    ))
}

/// Source and target bits of the standard experiments: `lhs_0 ↛ out_0`
/// style for `xor4`, `in2 ↛ out1` for the muxes, `incr ↛ overflow` for the
/// counter.
pub fn default_flow(kind: CircuitKind) -> (Vec<String>, Vec<String>) {
    match kind {
        CircuitKind::Xor4 => (vec!["lhs_0".into()], vec!["out_0".into()]),
        CircuitKind::MuxComb | CircuitKind::MuxSeq => {
            (bits("in2", 4).collect(), bits("out1", 2).collect())
        }
        CircuitKind::Counter3 => (vec!["incr".into()], vec!["overflow".into()]),
    }
}
