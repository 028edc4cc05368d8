//! Trace dominance and redundancy-free trace stores.
//!
//! A trace is compared with another through the templates obtained by fixing
//! it for one variable at a time. Which inclusion is required for each
//! variable depends on the quantifier shape:
//!
//! | prefix | `t1` dominates `t2` when, for each variable π |
//! |--------|-----------------------------------------------|
//! | ∀ⁿ     | `L(M[t1/π]) ⊆ L(M[t2/π])` |
//! | ∃²     | `L(M[t2/π]) ⊆ L(M[t1/π])` |
//! | ∀∃     | `L(M[t1/π]) ⊆ L(M[t2/π])` for the universal π, `L(M[t2/π']) ⊆ L(M[t1/π'])` for the existential π' |
//!
//! The dominated trace is the one that may be dropped.

use thiserror::Error;

use crate::automaton::{language_included, AutomatonError, MonitorTemplate};
use crate::formula::{QuantifierClass, TraceVariable};
use crate::semantics::Trace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DominanceError {
    #[error("trace analysis does not support the quantifier prefix `{0}`")]
    UnsupportedFragment(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    /// `L(M[t1/π]) ⊆ L(M[t2/π])`
    Forward,
    /// `L(M[t2/π]) ⊆ L(M[t1/π])`
    Backward,
}

/// A trace with its one-variable instantiations precomputed.
#[derive(Clone, Debug)]
pub struct Instantiated {
    trace: Trace,
    per_variable: Vec<MonitorTemplate>,
}

impl Instantiated {
    pub fn trace(&self) -> &Trace {
        &self.trace
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominanceJudgment {
    pub dominator: String,
    pub dominated: String,
    pub fragment: QuantifierClass,
    pub inclusion_checks: usize,
}

/// Dominance checker bound to one template and prefix shape.
#[derive(Clone, Debug)]
pub struct Dominance<'a> {
    template: &'a MonitorTemplate,
    class: QuantifierClass,
    directions: Vec<(TraceVariable, Direction)>,
}

impl<'a> Dominance<'a> {
    pub fn new(template: &'a MonitorTemplate, class: QuantifierClass) -> Result<Self, DominanceError> {
        let vars = template.free_variables();
        let dirs: Vec<Direction> = match class {
            QuantifierClass::ForallN(n) if n == vars.len() => vec![Direction::Forward; n],
            QuantifierClass::ExistsN(2) if vars.len() == 2 => vec![Direction::Backward; 2],
            QuantifierClass::ForallExists if vars.len() == 2 => {
                vec![Direction::Forward, Direction::Backward]
            }
            other => return Err(DominanceError::UnsupportedFragment(other.to_string())),
        };
        Ok(Self {
            template,
            class,
            directions: vars.iter().cloned().zip(dirs).collect(),
        })
    }

    pub fn class(&self) -> &QuantifierClass {
        &self.class
    }

    pub fn prepare(&self, trace: &Trace) -> Result<Instantiated, DominanceError> {
        let per_variable = self
            .directions
            .iter()
            .map(|(v, _)| self.template.instantiate(trace, v))
            .collect::<Result<_, _>>()?;
        Ok(Instantiated {
            trace: trace.clone(),
            per_variable,
        })
    }

    /// Whether `t1` dominates `t2`, with the number of inclusion checks run.
    /// Stops at the first failing inclusion.
    pub fn check(
        &self,
        t1: &Instantiated,
        t2: &Instantiated,
    ) -> Result<(bool, usize), DominanceError> {
        if t1.trace.same_steps(&t2.trace) {
            return Ok((true, 0));
        }
        let mut checks = 0;
        for (i, (_, dir)) in self.directions.iter().enumerate() {
            let (a, b) = (t1.per_variable[i].dfa(), t2.per_variable[i].dfa());
            let (small, big) = match dir {
                Direction::Forward => (a, b),
                Direction::Backward => (b, a),
            };
            checks += 1;
            if !language_included(small, big)?.included {
                return Ok((false, checks));
            }
        }
        Ok((true, checks))
    }

    pub fn judge(
        &self,
        t1: &Instantiated,
        t2: &Instantiated,
    ) -> Result<Option<DominanceJudgment>, DominanceError> {
        let (holds, inclusion_checks) = self.check(t1, t2)?;
        Ok(holds.then(|| DominanceJudgment {
            dominator: t1.trace.name().to_string(),
            dominated: t2.trace.name().to_string(),
            fragment: self.class.clone(),
            inclusion_checks,
        }))
    }
}

/// Whether `t1` dominates `t2` for a template built from a prefix of shape
/// `class`.
pub fn dominates(
    template: &MonitorTemplate,
    class: &QuantifierClass,
    t1: &Trace,
    t2: &Trace,
) -> Result<bool, DominanceError> {
    let d = Dominance::new(template, class.clone())?;
    Ok(d.check(&d.prepare(t1)?, &d.prepare(t2)?)?.0)
}

/// Stored traces in insertion order, plus a record of every trace that was
/// discarded as redundant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraceStore {
    traces: Vec<Trace>,
    /// `(dropped, dominator)` trace names.
    dropped: Vec<(String, String)>,
}

impl TraceStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_traces(traces: Vec<Trace>) -> Self {
        Self {
            traces,
            dropped: Vec::new(),
        }
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.traces.iter().map(Trace::name).collect()
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.traces.iter().any(|t| t.name() == name)
    }

    pub fn dropped(&self) -> &[(String, String)] {
        &self.dropped
    }

    pub fn push(&mut self, trace: Trace) {
        self.traces.push(trace);
    }

    pub fn record_drop(&mut self, dropped: &str, dominator: &str) {
        self.dropped.push((dropped.to_string(), dominator.to_string()));
    }

    /// Removes the traces at `indices` (ascending).
    pub fn remove_indices(&mut self, indices: &[usize]) {
        let mut k = 0;
        let mut i = 0;
        self.traces.retain(|_| {
            let drop = indices.get(k) == Some(&i);
            if drop {
                k += 1;
            }
            i += 1;
            !drop
        });
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimizeOutcome {
    pub store: TraceStore,
    /// False if the fresh trace was discarded.
    pub fresh_kept: bool,
    pub inclusion_checks: usize,
}

/// One round of redundancy elimination: the fresh trace is discarded if a
/// stored trace dominates it; otherwise every stored trace it dominates is
/// removed and it is appended.
pub fn minimize_store(
    template: &MonitorTemplate,
    class: &QuantifierClass,
    store: &TraceStore,
    fresh: &Trace,
) -> Result<MinimizeOutcome, DominanceError> {
    let d = Dominance::new(template, class.clone())?;
    let fresh_i = d.prepare(fresh)?;
    let stored: Vec<Instantiated> = store
        .traces()
        .iter()
        .map(|t| d.prepare(t))
        .collect::<Result<_, _>>()?;
    let mut out = store.clone();
    let mut checks = 0;
    for s in &stored {
        let (holds, c) = d.check(s, &fresh_i)?;
        checks += c;
        if holds {
            out.record_drop(fresh.name(), s.trace().name());
            return Ok(MinimizeOutcome {
                store: out,
                fresh_kept: false,
                inclusion_checks: checks,
            });
        }
    }
    let mut removed = Vec::new();
    for (i, s) in stored.iter().enumerate() {
        let (holds, c) = d.check(&fresh_i, s)?;
        checks += c;
        if holds {
            removed.push(i);
            out.record_drop(s.trace().name(), fresh.name());
        }
    }
    out.remove_indices(&removed);
    out.push(fresh.clone());
    Ok(MinimizeOutcome {
        store: out,
        fresh_kept: true,
        inclusion_checks: checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Limits;
    use crate::formula::parse_formula;

    fn setup(text: &str) -> (MonitorTemplate, QuantifierClass) {
        let qf = parse_formula(text).unwrap();
        (
            MonitorTemplate::for_formula(&qf, Limits::default()).unwrap(),
            qf.class(),
        )
    }

    #[test]
    fn reflexive_in_every_fragment() {
        let t = Trace::from_props("t", &[&["a"], &[]]);
        for text in [
            "forall p. forall q. G (a@p <-> a@q)",
            "exists p. exists q. G (a@p <-> a@q)",
            "forall p. exists q. G (a@p <-> a@q)",
        ] {
            let (m, c) = setup(text);
            assert!(dominates(&m, &c, &t, &t.clone().with_name("u")).unwrap());
        }
    }

    #[test]
    fn eq_patterns_do_not_dominate_each_other() {
        let (m, c) = setup("forall p. forall q. G (a@p <-> a@q)");
        let t = Trace::from_props("t", &[&["a"]]);
        let u = Trace::from_props("u", &[&[]]);
        assert!(!dominates(&m, &c, &t, &u).unwrap());
        assert!(!dominates(&m, &c, &u, &t).unwrap());
    }

    #[test]
    fn unsupported_prefixes_error() {
        let (m, c) = setup("exists p. exists q. exists r. a@p & a@q & a@r");
        let t = Trace::empty("t");
        assert!(matches!(
            dominates(&m, &c, &t, &t),
            Err(DominanceError::UnsupportedFragment(_))
        ));
    }

    #[test]
    fn true_body_keeps_the_first_trace() {
        let (m, c) = setup("forall p. forall q. true");
        let mut store = TraceStore::new();
        for (i, steps) in [vec![vec!["a"]], vec![vec![]], vec![vec!["b"], vec![]], vec![]]
            .into_iter()
            .enumerate()
        {
            let steps: Vec<&[&str]> = steps.iter().map(|s| s.as_slice()).collect();
            let t = Trace::from_props(format!("t{i}"), &steps);
            store = minimize_store(&m, &c, &store, &t).unwrap().store;
        }
        assert_eq!(store.names(), vec!["t0"]);
        assert_eq!(store.dropped().len(), 3);
    }

    #[test]
    fn distinct_eq_patterns_are_all_kept() {
        let (m, c) = setup("forall p. forall q. G (a@p <-> a@q)");
        let mut store = TraceStore::new();
        let patterns: [&[&[&str]]; 4] = [&[&["a"]], &[&[]], &[&[], &["a"]], &[&["a"], &["a"]]];
        for (i, p) in patterns.iter().enumerate() {
            let out = minimize_store(&m, &c, &store, &Trace::from_props(format!("t{i}"), p)).unwrap();
            assert!(out.fresh_kept);
            store = out.store;
        }
        assert_eq!(store.len(), 4);
        let dup = Trace::from_props("dup", &[&[], &["a"]]);
        let out = minimize_store(&m, &c, &store, &dup).unwrap();
        assert!(!out.fresh_kept);
        assert_eq!(out.store.dropped(), &[("dup".to_string(), "t2".to_string())]);
    }
}
