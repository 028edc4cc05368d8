//! Finite-trace semantics of HyperLTL, executed directly.
//!
//! A trace assignment maps trace variables to finite traces. Suffixes past the
//! end of a trace are the empty trace ε, and atoms never hold on ε. Once every
//! trace of an assignment is exhausted the assignment is a fixed point of
//! shifting, so the unbounded position quantifiers of `U` (and the derived
//! operators) only need to range up to the longest trace.
//!
//! Nothing in here shares code with the automaton construction; this module is
//! the reference the automata are tested against.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{Formula, QuantifiedFormula, Quantifier, TraceVariable};

/// The propositions holding at one position.
pub type Step = BTreeSet<String>;

/// A named finite trace. The empty trace ε is a valid value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Trace {
    name: String,
    steps: Vec<Step>,
}

impl Trace {
    pub fn new(name: impl Into<String>, steps: Vec<Step>) -> Self {
        Self {
            name: name.into(),
            steps,
        }
    }

    /// Builds a trace from per-step proposition lists.
    pub fn from_props(name: impl Into<String>, steps: &[&[&str]]) -> Self {
        Self::new(
            name,
            steps
                .iter()
                .map(|s| s.iter().map(|p| p.to_string()).collect())
                .collect(),
        )
    }

    pub fn empty(name: impl Into<String>) -> Self {
        Self::new(name, Vec::new())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Position `i`, or the empty set past the end (`ε[0] = ∅`).
    pub fn holds(&self, proposition: &str, i: usize) -> bool {
        self.steps.get(i).is_some_and(|s| s.contains(proposition))
    }

    /// Propositions mentioned anywhere in the trace.
    pub fn propositions(&self) -> BTreeSet<String> {
        self.steps.iter().flatten().cloned().collect()
    }

    /// Drops every proposition outside `keep`.
    pub fn project(&self, keep: &BTreeSet<String>) -> Trace {
        Trace::new(
            self.name.clone(),
            self.steps
                .iter()
                .map(|s| s.intersection(keep).cloned().collect())
                .collect(),
        )
    }

    /// Same steps, ignoring names.
    pub fn same_steps(&self, other: &Trace) -> bool {
        self.steps == other.steps
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: [", self.name)?;
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{{")?;
            for (j, p) in s.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                f.write_str(p)?;
            }
            write!(f, "}}")?;
        }
        f.write_str("]")
    }
}

/// `t[i, j]`: ε when `i ≥ |t|`, otherwise positions `i..=min(j, |t|-1)`.
pub fn subsequence(t: &Trace, i: usize, j: usize) -> Trace {
    if i >= t.len() {
        return Trace::empty(t.name.clone());
    }
    let end = j.min(t.len() - 1);
    let steps = if end < i {
        Vec::new()
    } else {
        t.steps[i..=end].to_vec()
    };
    Trace::new(t.name.clone(), steps)
}

/// `t[i, ...]`.
pub fn suffix(t: &Trace, i: usize) -> Trace {
    subsequence(t, i, t.len().saturating_sub(1))
}

/// Partial map from trace variables to traces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraceAssignment(BTreeMap<TraceVariable, Trace>);

impl TraceAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<TraceVariable>, trace: Trace) -> Self {
        self.0.insert(var.into(), trace);
        self
    }

    pub fn insert(&mut self, var: TraceVariable, trace: Trace) {
        self.0.insert(var, trace);
    }

    pub fn get(&self, var: &TraceVariable) -> Option<&Trace> {
        self.0.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TraceVariable, &Trace)> {
        self.0.iter()
    }

    /// Length of the longest assigned trace.
    pub fn horizon(&self) -> usize {
        self.0.values().map(Trace::len).max().unwrap_or(0)
    }
}

impl FromIterator<(TraceVariable, Trace)> for TraceAssignment {
    fn from_iter<I: IntoIterator<Item = (TraceVariable, Trace)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// `Π[i, ...]`: every assigned trace replaced by its `i`-suffix.
pub fn shift_assignment(a: &TraceAssignment, i: usize) -> TraceAssignment {
    a.0.iter()
        .map(|(v, t)| (v.clone(), suffix(t, i)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("trace variable `{0}` has no trace assigned")]
    UncoveredVariable(String),
}

struct Evaluator<'a> {
    env: BTreeMap<&'a TraceVariable, &'a Trace>,
    horizon: usize,
}

impl Evaluator<'_> {
    fn atom(&self, var: &TraceVariable, prop: &str, i: usize) -> bool {
        self.env[var].holds(prop, i)
    }

    /// Last position worth inspecting from `i` on; every later one repeats it.
    fn last(&self, i: usize) -> usize {
        i.max(self.horizon)
    }

    fn eval(&self, f: &Formula, i: usize) -> bool {
        use Formula as F;
        match f {
            F::True => true,
            F::False => false,
            F::Atom(a) => self.atom(&a.variable, &a.proposition, i),
            F::Not(a) => !self.eval(a, i),
            F::Or(a, b) => self.eval(a, i) || self.eval(b, i),
            F::And(a, b) => self.eval(a, i) && self.eval(b, i),
            F::Implies(a, b) => !self.eval(a, i) || self.eval(b, i),
            F::Iff(a, b) => self.eval(a, i) == self.eval(b, i),
            F::Xor(a, b) => self.eval(a, i) != self.eval(b, i),
            F::Next(a) => self.eval(a, i + 1),
            F::Until(a, b) => {
                for k in i..=self.last(i) {
                    if self.eval(b, k) {
                        return true;
                    }
                    if !self.eval(a, k) {
                        return false;
                    }
                }
                false
            }
            F::WeakUntil(a, b) => {
                for k in i..=self.last(i) {
                    if self.eval(b, k) {
                        return true;
                    }
                    if !self.eval(a, k) {
                        return false;
                    }
                }
                // `a` held up to the fixed point, hence forever.
                true
            }
            F::Release(a, b) => {
                for k in i..=self.last(i) {
                    if !self.eval(b, k) {
                        return false;
                    }
                    if self.eval(a, k) {
                        return true;
                    }
                }
                true
            }
            F::Finally(a) => (i..=self.last(i)).any(|k| self.eval(a, k)),
            F::Globally(a) => (i..=self.last(i)).all(|k| self.eval(a, k)),
        }
    }
}

/// `Π ⊨ f` for a quantifier-free body.
pub fn eval_body(a: &TraceAssignment, f: &Formula) -> Result<bool, SemanticsError> {
    let mut env = BTreeMap::new();
    for (v, t) in a.iter() {
        env.insert(v, t);
    }
    for v in f.variables() {
        if !env.contains_key(&v) {
            return Err(SemanticsError::UncoveredVariable(v.name().to_string()));
        }
    }
    Ok(Evaluator {
        env,
        horizon: a.horizon(),
    }
    .eval(f, 0))
}

/// Truth value on the assignment mapping every variable to ε.
pub fn eps_eval(f: &Formula) -> bool {
    use Formula as F;
    match f {
        F::True => true,
        F::False | F::Atom(_) => false,
        F::Not(a) => !eps_eval(a),
        F::Or(a, b) => eps_eval(a) || eps_eval(b),
        F::And(a, b) => eps_eval(a) && eps_eval(b),
        F::Implies(a, b) => !eps_eval(a) || eps_eval(b),
        F::Iff(a, b) => eps_eval(a) == eps_eval(b),
        F::Xor(a, b) => eps_eval(a) != eps_eval(b),
        F::Next(a) | F::Finally(a) | F::Globally(a) => eps_eval(a),
        F::Until(_, b) | F::Release(_, b) => eps_eval(b),
        F::WeakUntil(a, b) => eps_eval(a) || eps_eval(b),
    }
}

/// `T ⊨ qf`, enumerating every quantifier over `traces`.
///
/// Costs `|T|^n` body evaluations; intended for small instances.
pub fn eval_quantified(traces: &[Trace], qf: &QuantifiedFormula) -> bool {
    fn go(
        traces: &[Trace],
        prefix: &[(Quantifier, TraceVariable)],
        body: &Formula,
        assignment: &mut TraceAssignment,
    ) -> bool {
        let Some(((q, v), rest)) = prefix.split_first() else {
            return eval_body(assignment, body).expect("closed formula");
        };
        let mut check = |t: &Trace| {
            assignment.insert(v.clone(), t.clone());
            go(traces, rest, body, assignment)
        };
        match q {
            Quantifier::Forall => traces.iter().all(&mut check),
            Quantifier::Exists => traces.iter().any(&mut check),
        }
    }
    go(traces, &qf.prefix, &qf.body, &mut TraceAssignment::new())
}
