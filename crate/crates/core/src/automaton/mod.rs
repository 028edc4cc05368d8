//! Deterministic finite-word automata over the indexed alphabet.
//!
//! A letter is a set of indexed atoms, encoded as a bitmask over the
//! automaton's ordered support: bit `i` set means `support[i]` holds. Every
//! transition table is total over all `2^|support|` letters.
//!
//! A tuple of traces is read as one joint word whose length is that of the
//! longest trace; a trace that has ended contributes no atoms. Under this
//! reading a template accepts exactly the tuples whose assignment satisfies
//! the body.

mod build;
mod dot;
mod minimize;
mod ops;
mod template;

use std::collections::VecDeque;

use thiserror::Error;

use crate::formula::AtomRef;

pub use build::build_dfa;
pub use dot::to_dot;
pub use ops::{complement, intersection, language_included, Inclusion};
pub use template::{MonitorTemplate, RunOutcome};

/// Bitmask over an automaton's support.
pub type Letter = u32;
pub type Word = Vec<Letter>;
pub type StateId = u32;

/// Hard ceiling on the support size, independent of [`Limits`].
pub const MAX_SUPPORT: usize = 24;

/// Resource guards for automaton construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of states explored by a single construction.
    pub max_states: usize,
    /// Maximum number of indexed atoms in a support (`2^max_atoms` letters).
    pub max_atoms: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_states: 100_000,
            max_atoms: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("automaton construction exceeded the state limit of {limit}")]
    StateLimit { limit: usize },
    #[error("alphabet of {atoms} indexed atoms exceeds the limit of {limit}")]
    AtomLimit { atoms: usize, limit: usize },
    #[error("support mismatch: {0}")]
    SupportMismatch(String),
    #[error("trace variable `{0}` is not free in this template")]
    VariableNotFree(String),
    #[error("tuple does not match the template's free variables: {0}")]
    ArityMismatch(String),
}

impl AutomatonError {
    /// Resource exhaustion, as opposed to a malformed request.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            AutomatonError::StateLimit { .. } | AutomatonError::AtomLimit { .. }
        )
    }
}

/// Complete deterministic automaton over `2^support`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    support: Vec<AtomRef>,
    initial: StateId,
    accepting: Vec<bool>,
    /// `table[state * num_letters + letter]`
    table: Vec<StateId>,
    /// States from which some accepting state is reachable.
    live: Vec<bool>,
}

impl Dfa {
    /// Assembles an automaton from an explicit transition table.
    pub fn from_table(
        support: Vec<AtomRef>,
        initial: StateId,
        accepting: Vec<bool>,
        table: Vec<StateId>,
    ) -> Result<Self, AutomatonError> {
        if support.len() > MAX_SUPPORT {
            return Err(AutomatonError::AtomLimit {
                atoms: support.len(),
                limit: MAX_SUPPORT,
            });
        }
        let n = accepting.len();
        let letters = 1usize << support.len();
        if n == 0 || initial as usize >= n || table.len() != n * letters {
            return Err(AutomatonError::SupportMismatch(format!(
                "table of {} entries does not describe {n} states over {letters} letters",
                table.len()
            )));
        }
        if table.iter().any(|&s| s as usize >= n) {
            return Err(AutomatonError::SupportMismatch(
                "transition to an unknown state".into(),
            ));
        }
        Ok(Self::assemble(support, initial, accepting, table))
    }

    pub(crate) fn assemble(
        support: Vec<AtomRef>,
        initial: StateId,
        accepting: Vec<bool>,
        table: Vec<StateId>,
    ) -> Self {
        let mut dfa = Self {
            support,
            initial,
            accepting,
            table,
            live: Vec::new(),
        };
        dfa.live = dfa.compute_live();
        dfa
    }

    pub fn support(&self) -> &[AtomRef] {
        &self.support
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_letters(&self) -> usize {
        1 << self.support.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_accepting(&self, s: StateId) -> bool {
        self.accepting[s as usize]
    }

    /// Whether some accepting state is reachable from `s`.
    pub fn is_live(&self, s: StateId) -> bool {
        self.live[s as usize]
    }

    #[inline]
    pub fn next(&self, s: StateId, letter: Letter) -> StateId {
        self.table[(s as usize) << self.support.len() | letter as usize]
    }

    pub fn run_from(&self, s: StateId, word: &[Letter]) -> StateId {
        word.iter().fold(s, |q, &l| self.next(q, l))
    }

    pub fn accepts_word(&self, word: &[Letter]) -> bool {
        self.is_accepting(self.run_from(self.initial, word))
    }

    /// Atoms of a letter, in support order.
    pub fn letter_atoms(&self, letter: Letter) -> Vec<&AtomRef> {
        self.support
            .iter()
            .enumerate()
            .filter(|(i, _)| letter >> i & 1 == 1)
            .map(|(_, a)| a)
            .collect()
    }

    /// `{a@p,b@q}` rendering of a letter.
    pub fn format_letter(&self, letter: Letter) -> String {
        let atoms: Vec<String> = self
            .letter_atoms(letter)
            .iter()
            .map(|a| a.to_string())
            .collect();
        format!("{{{}}}", atoms.join(","))
    }

    /// Shortest accepted word, ties broken by the smallest letter first.
    /// `None` iff the language is empty.
    pub fn shortest_accepted(&self) -> Option<Word> {
        let n = self.num_states();
        let mut parent: Vec<Option<(StateId, Letter)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial as usize] = true;
        let path = |parent: &[Option<(StateId, Letter)>], mut s: StateId| {
            let mut word = Vec::new();
            while let Some((p, l)) = parent[s as usize] {
                word.push(l);
                s = p;
            }
            word.reverse();
            word
        };
        if self.is_accepting(self.initial) {
            return Some(Vec::new());
        }
        while let Some(s) = queue.pop_front() {
            for l in 0..self.num_letters() as Letter {
                let t = self.next(s, l);
                if seen[t as usize] {
                    continue;
                }
                seen[t as usize] = true;
                parent[t as usize] = Some((s, l));
                if self.is_accepting(t) {
                    return Some(path(&parent, t));
                }
                queue.push_back(t);
            }
        }
        None
    }

    pub fn is_empty(&self) -> bool {
        !self.is_live(self.initial)
    }

    /// Reachable-part Hopcroft minimization with states renumbered in
    /// breadth-first order; equal languages yield identical automata.
    pub fn minimized(&self) -> Dfa {
        minimize::minimize(self)
    }

    fn compute_live(&self) -> Vec<bool> {
        let n = self.num_states();
        let letters = self.num_letters();
        // Reverse adjacency, one entry per distinct (source, target) pair.
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for s in 0..n {
            let row = &self.table[s * letters..(s + 1) * letters];
            let mut targets: Vec<StateId> = row.to_vec();
            targets.sort_unstable();
            targets.dedup();
            for t in targets {
                preds[t as usize].push(s as StateId);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<StateId> = (0..n as StateId).filter(|&s| live[s as usize]).collect();
        while let Some(t) = stack.pop() {
            for &s in &preds[t as usize] {
                if !live[s as usize] {
                    live[s as usize] = true;
                    stack.push(s);
                }
            }
        }
        live
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_table_rejects_malformed_tables() {
        let support = vec![AtomRef::new("a", "p")];
        assert!(Dfa::from_table(support.clone(), 0, vec![true], vec![0, 0]).is_ok());
        assert!(Dfa::from_table(support.clone(), 0, vec![true], vec![0]).is_err());
        assert!(Dfa::from_table(support.clone(), 1, vec![true], vec![0, 0]).is_err());
        assert!(Dfa::from_table(support, 0, vec![true], vec![0, 3]).is_err());
    }

    #[test]
    fn shortest_word_prefers_small_letters() {
        // Accepts words whose last letter is `{a@p}`.
        let support = vec![AtomRef::new("a", "p")];
        let dfa = Dfa::from_table(support, 0, vec![false, true], vec![0, 1, 0, 1]).unwrap();
        assert_eq!(dfa.shortest_accepted(), Some(vec![1]));
        assert!(!dfa.is_empty());
        assert_eq!(dfa.format_letter(1), "{a@p}");
        assert_eq!(dfa.format_letter(0), "{}");
    }
}
