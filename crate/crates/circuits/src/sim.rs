use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use hypermon_core::semantics::{Step, Trace};

use crate::{CircuitError, CircuitKind, CircuitModel, Valuation};

/// Per-input probability of a 1; unlisted inputs are fair coins.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InputBias(pub BTreeMap<String, f64>);

impl InputBias {
    pub fn uniform() -> Self {
        Self::default()
    }

    pub fn with(mut self, bit: &str, p: f64) -> Self {
        self.0.insert(bit.to_string(), p);
        self
    }

    pub fn is_uniform(&self) -> bool {
        self.0.values().all(|&p| p == 0.5)
    }

    fn probabilities(&self, kind: CircuitKind) -> Result<Vec<f64>, CircuitError> {
        let inputs = kind.inputs();
        for (bit, &p) in &self.0 {
            if !inputs.contains(bit) {
                return Err(CircuitError::UnknownBit {
                    bit: bit.clone(),
                    role: "an input",
                    kind,
                });
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(CircuitError::BadProbability { bit: bit.clone(), p });
            }
        }
        Ok(inputs
            .iter()
            .map(|b| self.0.get(b).copied().unwrap_or(0.5))
            .collect())
    }
}

/// A simulated run: packed inputs and outputs per step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitTrace {
    pub kind: CircuitKind,
    pub inputs: Vec<u32>,
    pub outputs: Vec<u32>,
}

impl CircuitTrace {
    /// Runs `kind` from reset on packed inputs.
    pub fn simulate(kind: CircuitKind, inputs: Vec<u32>) -> Self {
        let mut m = CircuitModel::new(kind);
        let outputs = inputs
            .iter()
            .map(|&i| {
                let (o, next) = m.step_packed(i);
                m = next;
                o
            })
            .collect();
        Self {
            kind,
            inputs,
            outputs,
        }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn valuation(&self, step: usize) -> Valuation {
        let mut v = Valuation::new();
        for (i, b) in self.kind.inputs().into_iter().enumerate() {
            v.insert(b, self.inputs[step] >> i & 1 == 1);
        }
        for (i, b) in self.kind.outputs().into_iter().enumerate() {
            v.insert(b, self.outputs[step] >> i & 1 == 1);
        }
        v
    }

    /// The trace whose propositions are the bits set at each step.
    pub fn to_trace(&self, name: impl Into<String>) -> Trace {
        let steps = (0..self.len())
            .map(|i| {
                self.valuation(i)
                    .into_iter()
                    .filter(|(_, on)| *on)
                    .map(|(b, _)| b)
                    .collect::<Step>()
            })
            .collect();
        Trace::new(name, steps)
    }
}

fn trace_seed(seed: u64, index: u64) -> u64 {
    seed ^ (index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// `n` runs of `length` steps with independently drawn inputs. Run `i` uses
/// its own xoshiro256++ stream seeded from `(seed, i)`, so the result does
/// not depend on scheduling.
pub fn random_traces(
    kind: CircuitKind,
    n: usize,
    length: usize,
    seed: u64,
    bias: &InputBias,
) -> Result<Vec<CircuitTrace>, CircuitError> {
    let probs = bias.probabilities(kind)?;
    Ok((0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(trace_seed(seed, i));
            let inputs = (0..length)
                .map(|_| {
                    probs
                        .iter()
                        .enumerate()
                        .filter(|(_, &p)| rng.random_bool(p))
                        .fold(0u32, |m, (b, _)| m | 1 << b)
                })
                .collect();
            CircuitTrace::simulate(kind, inputs)
        })
        .collect())
}

/// Name of run `index` in a corpus of `n`: zero-padded so that name order is
/// generation order.
pub fn trace_name(kind: CircuitKind, index: usize, n: usize) -> String {
    let width = n.saturating_sub(1).to_string().len().max(4);
    format!("{kind}_{index:0width$}")
}

/// Description of a generated corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: CircuitKind,
    pub n: usize,
    pub length: usize,
    pub seed: u64,
    pub generator: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub bias: InputBias,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn new(kind: CircuitKind, n: usize, length: usize, seed: u64, bias: InputBias, files: Vec<String>) -> Self {
        Self {
            kind,
            n,
            length,
            seed,
            generator: "xoshiro256++".into(),
            inputs: kind.inputs(),
            outputs: kind.outputs(),
            bias,
            files,
        }
    }
}
