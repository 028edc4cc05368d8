use std::collections::{BTreeMap, HashMap};

use super::{build_dfa, AutomatonError, Dfa, Letter, Limits, StateId, Word};
use crate::formula::{collect_alphabet, AtomRef, Formula, QuantifiedFormula, TraceVariable};
use crate::semantics::{Trace, TraceAssignment};

/// Automaton for a body with some trace variables still free.
#[derive(Clone, Debug)]
pub struct MonitorTemplate {
    body: Formula,
    dfa: Dfa,
    free: Vec<TraceVariable>,
    bound: BTreeMap<TraceVariable, Trace>,
    limits: Limits,
}

/// Outcome of running a joint word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub accepted: bool,
    /// For rejected words: the shortest prefix length after which no
    /// continuation is accepted, or the word length if every prefix can still
    /// be extended to an accepted word.
    pub rejecting_position: Option<usize>,
}

impl MonitorTemplate {
    /// Compiles `body` over `support`, with `vars` as the free variables.
    pub fn new(
        body: &Formula,
        vars: &[TraceVariable],
        support: &[AtomRef],
        limits: Limits,
    ) -> Result<Self, AutomatonError> {
        if let Some(a) = support.iter().find(|a| !vars.contains(&a.variable)) {
            return Err(AutomatonError::VariableNotFree(a.variable.to_string()));
        }
        let dfa = build_dfa(body, support, limits)?.minimized();
        Ok(Self {
            body: body.clone(),
            dfa,
            free: vars.to_vec(),
            bound: BTreeMap::new(),
            limits,
        })
    }

    /// Template for the body of `qf` over its own alphabet.
    pub fn for_formula(qf: &QuantifiedFormula, limits: Limits) -> Result<Self, AutomatonError> {
        Self::new(&qf.body, &qf.variables(), &collect_alphabet(qf), limits)
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn free_variables(&self) -> &[TraceVariable] {
        &self.free
    }

    pub fn bound(&self) -> &BTreeMap<TraceVariable, Trace> {
        &self.bound
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    /// Letters contributed by `trace` when assigned to `var`, one per step.
    pub fn slot_letters(&self, var: &TraceVariable, trace: &Trace) -> Vec<Letter> {
        let bits: Vec<(u32, &str)> = self
            .dfa
            .support()
            .iter()
            .enumerate()
            .filter(|(_, a)| &a.variable == var)
            .map(|(i, a)| (i as u32, a.proposition.as_str()))
            .collect();
        trace
            .steps()
            .iter()
            .map(|step| {
                bits.iter()
                    .filter(|(_, p)| step.contains(*p))
                    .fold(0, |m, (i, _)| m | 1 << i)
            })
            .collect()
    }

    /// Joint word of an assignment covering exactly the free variables.
    pub fn encode(&self, tuple: &TraceAssignment) -> Result<Word, AutomatonError> {
        let names: Vec<&TraceVariable> = tuple.iter().map(|(v, _)| v).collect();
        if names.len() != self.free.len() || self.free.iter().any(|v| tuple.get(v).is_none()) {
            return Err(AutomatonError::ArityMismatch(format!(
                "expected variables [{}], got [{}]",
                join(self.free.iter()),
                join(names.into_iter())
            )));
        }
        let slots: Vec<Vec<Letter>> = tuple
            .iter()
            .map(|(v, t)| self.slot_letters(v, t))
            .collect();
        let len = slots.iter().map(Vec::len).max().unwrap_or(0);
        Ok((0..len)
            .map(|i| slots.iter().fold(0, |m, s| m | s.get(i).copied().unwrap_or(0)))
            .collect())
    }

    pub fn run_encoded(&self, word: &[Letter]) -> RunOutcome {
        self.run_slots(&[word])
    }

    /// Runs the joint word formed by OR-ing per-slot letter sequences.
    pub fn run_slots(&self, slots: &[&[Letter]]) -> RunOutcome {
        let len = slots.iter().map(|s| s.len()).max().unwrap_or(0);
        let mut q = self.dfa.initial();
        let mut dead_at = None;
        if !self.dfa.is_live(q) {
            dead_at = Some(0);
        }
        for i in 0..len {
            if dead_at.is_some() {
                break;
            }
            let letter = slots
                .iter()
                .fold(0, |m, s| m | s.get(i).copied().unwrap_or(0));
            q = self.dfa.next(q, letter);
            if !self.dfa.is_live(q) {
                dead_at = Some(i + 1);
            }
        }
        if dead_at.is_some() {
            return RunOutcome {
                accepted: false,
                rejecting_position: dead_at,
            };
        }
        let accepted = self.dfa.is_accepting(q);
        RunOutcome {
            accepted,
            rejecting_position: if accepted { None } else { Some(len) },
        }
    }

    pub fn accepts(&self, tuple: &TraceAssignment) -> Result<bool, AutomatonError> {
        Ok(self.run_encoded(&self.encode(tuple)?).accepted)
    }

    /// Fixes `var` to `trace`; the result ranges over the remaining variables.
    pub fn instantiate(&self, trace: &Trace, var: &TraceVariable) -> Result<Self, AutomatonError> {
        if !self.free.contains(var) {
            return Err(AutomatonError::VariableNotFree(var.to_string()));
        }
        let old = &self.dfa;
        let t = self.slot_letters(var, trace);
        let kept: Vec<usize> = (0..old.support().len())
            .filter(|&i| &old.support()[i].variable != var)
            .collect();
        let support: Vec<AtomRef> = kept.iter().map(|&i| old.support()[i].clone()).collect();
        let letters = 1usize << support.len();
        let expand: Vec<Letter> = (0..letters)
            .map(|r| {
                kept.iter()
                    .enumerate()
                    .filter(|(k, _)| r >> k & 1 == 1)
                    .fold(0, |m, (_, &i)| m | 1 << i)
            })
            .collect();

        let n = t.len();
        // accept_from[j][q]: running t[j..] from q ends accepting.
        let mut accept_from = vec![vec![false; old.num_states()]; n + 1];
        for q in 0..old.num_states() as StateId {
            accept_from[n][q as usize] = old.is_accepting(q);
        }
        for j in (0..n).rev() {
            for q in 0..old.num_states() as StateId {
                accept_from[j][q as usize] = accept_from[j + 1][old.next(q, t[j]) as usize];
            }
        }

        let start = (old.initial(), 0usize);
        let mut ids = HashMap::from([(start, 0 as StateId)]);
        let mut pairs = vec![start];
        let mut table = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (q, j) = pairs[i];
            i += 1;
            let extra = t.get(j).copied().unwrap_or(0);
            let j2 = (j + 1).min(n);
            for &e in &expand {
                let r = (old.next(q, e | extra), j2);
                let id = match ids.get(&r) {
                    Some(&id) => id,
                    None => {
                        if pairs.len() >= self.limits.max_states {
                            return Err(AutomatonError::StateLimit {
                                limit: self.limits.max_states,
                            });
                        }
                        let id = pairs.len() as StateId;
                        ids.insert(r, id);
                        pairs.push(r);
                        id
                    }
                };
                table.push(id);
            }
        }
        let accepting = pairs
            .iter()
            .map(|&(q, j)| accept_from[j][q as usize])
            .collect();
        let dfa = Dfa::assemble(support, 0, accepting, table).minimized();
        let mut bound = self.bound.clone();
        bound.insert(var.clone(), trace.clone());
        Ok(Self {
            body: self.body.clone(),
            dfa,
            free: self.free.iter().filter(|v| *v != var).cloned().collect(),
            bound,
            limits: self.limits,
        })
    }
}

fn join<'a>(vars: impl Iterator<Item = &'a TraceVariable>) -> String {
    vars.map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}
