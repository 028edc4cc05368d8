//! Monitoring sessions over a growing set of traces.
//!
//! For a universal prefix `∀π₁…∀πₙ` each incoming trace is checked by running
//! the template on every tuple of stored traces that involves it. Optional
//! reductions come from the specification analysis (symmetry, reflexivity,
//! transitivity) and from dominance between traces. Other prefixes are
//! evaluated directly against the stored set after every trace.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::automaton::{AutomatonError, Letter, Limits, MonitorTemplate};
use crate::formula::{propositions, QuantifiedFormula, QuantifierClass, TraceVariable};
use crate::semantics::{eval_quantified, Trace};
use crate::spec_analysis::{analyze, SpecAnalysisResult};
use crate::trace_analysis::{Dominance, DominanceError, Instantiated};

pub use crate::trace_analysis::TraceStore;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Dominance(#[from] DominanceError),
    #[error("a trace named `{0}` was already processed")]
    DuplicateTrace(String),
}

impl EngineError {
    pub fn is_resource(&self) -> bool {
        match self {
            EngineError::Automaton(e) | EngineError::Dominance(DominanceError::Automaton(e)) => {
                e.is_resource()
            }
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SessionOptions {
    pub trace_analysis: bool,
    pub spec_analysis: bool,
    pub parallel: bool,
    pub continue_after_violation: bool,
    pub limits: Limits,
}

impl Default for SessionOptions {
    fn default() -> Self {
        Self {
            trace_analysis: true,
            spec_analysis: true,
            parallel: false,
            continue_after_violation: false,
            limits: Limits::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterExample {
    /// Trace name per prefix variable.
    pub tuple: Vec<(TraceVariable, String)>,
    /// Length of the shortest prefix of the joint word with no accepted
    /// continuation.
    pub rejecting_position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// No violation so far.
    Clean,
    Violation(CounterExample),
    /// Truth value on the traces seen so far, for prefixes that are not
    /// purely universal. May change with later traces.
    Current(bool),
}

impl Verdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violation(_) | Verdict::Current(false))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MonitorStats {
    pub traces_seen: usize,
    pub traces_stored: usize,
    pub instances_run: u64,
    pub inclusion_checks: u64,
    pub wall_time: Duration,
}

/// Reductions in effect for the next trace.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ActiveOptimizations {
    pub trace_analysis: bool,
    pub symmetric: bool,
    pub reflexive: bool,
    pub transitive: bool,
}

struct Entry {
    /// Letters of the trace in each variable position.
    slots: Vec<Vec<Letter>>,
    inst: Option<Instantiated>,
}

pub struct Session {
    qf: QuantifiedFormula,
    class: QuantifierClass,
    options: SessionOptions,
    template: Option<MonitorTemplate>,
    analysis: Option<SpecAnalysisResult>,
    active: ActiveOptimizations,
    props: BTreeSet<String>,
    store: TraceStore,
    entries: Vec<Entry>,
    seen: HashSet<String>,
    stats: MonitorStats,
    verdict: Verdict,
    violations: Vec<CounterExample>,
    warnings: Vec<String>,
}

impl Session {
    pub fn new(qf: QuantifiedFormula, options: SessionOptions) -> Result<Self, EngineError> {
        let class = qf.class();
        let universal = matches!(class, QuantifierClass::ForallN(_));
        let dominance_fragment = matches!(
            class,
            QuantifierClass::ForallN(_) | QuantifierClass::ExistsN(2) | QuantifierClass::ForallExists
        );
        let template = if universal || (options.trace_analysis && dominance_fragment) {
            Some(MonitorTemplate::for_formula(&qf, options.limits)?)
        } else {
            None
        };
        let analysis = (options.spec_analysis && universal).then(|| analyze(&qf, options.limits));
        let n = qf.prefix.len();
        let mut active = ActiveOptimizations {
            trace_analysis: options.trace_analysis && dominance_fragment,
            ..Default::default()
        };
        if let Some(a) = &analysis {
            active.symmetric = a.symmetric();
            active.reflexive = a.reflexive();
            active.transitive = a.transitive() && a.symmetric() && a.reflexive() && n == 2;
        }
        Ok(Self {
            props: propositions(&qf.body),
            qf,
            class,
            options,
            template,
            analysis,
            active,
            store: TraceStore::new(),
            entries: Vec::new(),
            seen: HashSet::new(),
            stats: MonitorStats::default(),
            verdict: Verdict::Clean,
            violations: Vec::new(),
            warnings: Vec::new(),
        })
    }

    pub fn formula(&self) -> &QuantifiedFormula {
        &self.qf
    }

    pub fn class(&self) -> &QuantifierClass {
        &self.class
    }

    pub fn options(&self) -> &SessionOptions {
        &self.options
    }

    pub fn template(&self) -> Option<&MonitorTemplate> {
        self.template.as_ref()
    }

    pub fn spec_analysis(&self) -> Option<&SpecAnalysisResult> {
        self.analysis.as_ref()
    }

    pub fn active(&self) -> ActiveOptimizations {
        self.active
    }

    pub fn store(&self) -> &TraceStore {
        &self.store
    }

    pub fn stats(&self) -> MonitorStats {
        MonitorStats {
            traces_stored: self.store.len(),
            ..self.stats
        }
    }

    /// Overall verdict: the first violation, or the latest value.
    pub fn verdict(&self) -> &Verdict {
        &self.verdict
    }

    /// Every violation found, in order (more than one only when continuing
    /// after violations).
    pub fn violations(&self) -> &[CounterExample] {
        &self.violations
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn process_trace(&mut self, trace: Trace) -> Result<Verdict, EngineError> {
        let start = Instant::now();
        let result = self.process(trace);
        self.stats.wall_time += start.elapsed();
        result
    }

    fn process(&mut self, trace: Trace) -> Result<Verdict, EngineError> {
        if !self.seen.insert(trace.name().to_string()) {
            return Err(EngineError::DuplicateTrace(trace.name().to_string()));
        }
        self.stats.traces_seen += 1;
        if matches!(self.verdict, Verdict::Violation(_)) && !self.options.continue_after_violation {
            return Ok(self.verdict.clone());
        }
        let extra: Vec<String> = trace
            .propositions()
            .difference(&self.props)
            .cloned()
            .collect();
        let trace = if extra.is_empty() {
            trace
        } else {
            self.warnings.push(format!(
                "trace `{}`: ignoring propositions not in the formula: {}",
                trace.name(),
                extra.join(", ")
            ));
            trace.project(&self.props)
        };
        match self.class {
            QuantifierClass::ForallN(_) => self.process_universal(trace),
            _ => self.process_oracle(trace),
        }
    }

    fn entry(&self, trace: &Trace, dominance: Option<&Dominance>) -> Result<Entry, EngineError> {
        let template = self.template.as_ref().expect("template");
        Ok(Entry {
            slots: self
                .qf
                .variables()
                .iter()
                .map(|v| template.slot_letters(v, trace))
                .collect(),
            inst: dominance.map(|d| d.prepare(trace)).transpose()?,
        })
    }

    fn tuples(&self, k: usize) -> Vec<usize> {
        let n = self.qf.prefix.len();
        let mut out = Vec::new();
        if self.active.transitive {
            if k > 0 {
                out.extend([0, k]);
            }
            // With no stored trace the only tuple is the reflexive one.
            return out;
        }
        let mut cur = Vec::with_capacity(n);
        enumerate_tuples(n, k, self.active.symmetric, &mut cur, false, &mut out);
        if self.active.reflexive {
            let mut filtered = Vec::with_capacity(out.len());
            for t in out.chunks(n) {
                if !t.iter().all(|&i| i == k) {
                    filtered.extend_from_slice(t);
                }
            }
            out = filtered;
        }
        out
    }

    fn process_universal(&mut self, trace: Trace) -> Result<Verdict, EngineError> {
        let template = self.template.clone().expect("template");
        let dominance = if self.active.trace_analysis {
            Some(Dominance::new(&template, self.class.clone())?)
        } else {
            None
        };
        let entry = self.entry(&trace, dominance.as_ref())?;

        if let Some(d) = &dominance {
            let fresh = entry.inst.as_ref().expect("prepared");
            let (hit, checks) = first_dominator(d, &self.entries, fresh, self.options.parallel)?;
            self.stats.inclusion_checks += checks;
            if let Some(i) = hit {
                let by = self.store.traces()[i].name().to_string();
                self.store.record_drop(trace.name(), &by);
                return Ok(Verdict::Clean);
            }
        }

        let n = self.qf.prefix.len();
        let k = self.entries.len();
        let tuples = self.tuples(k);
        let count = tuples.len() / n;
        let slots_of = |t: &[usize]| -> Vec<&[Letter]> {
            t.iter()
                .enumerate()
                .map(|(pos, &i)| {
                    let e = if i == k { &entry } else { &self.entries[i] };
                    e.slots[pos].as_slice()
                })
                .collect()
        };
        let rejected = |t: &[usize]| !template.run_slots(&slots_of(t)).accepted;
        let first = if self.options.parallel {
            tuples.par_chunks(n).position_first(rejected)
        } else {
            tuples.chunks(n).position(rejected)
        };
        self.stats.instances_run += first.map_or(count, |i| i + 1) as u64;

        if let Some(i) = first {
            let tuple = &tuples[i * n..(i + 1) * n];
            let run = template.run_slots(&slots_of(tuple));
            let names: Vec<(TraceVariable, String)> = self
                .qf
                .variables()
                .into_iter()
                .zip(tuple.iter().map(|&j| {
                    if j == k {
                        trace.name().to_string()
                    } else {
                        self.store.traces()[j].name().to_string()
                    }
                }))
                .collect();
            let ce = CounterExample {
                tuple: names,
                rejecting_position: run.rejecting_position.unwrap_or(0),
            };
            self.violations.push(ce.clone());
            if !matches!(self.verdict, Verdict::Violation(_)) {
                self.verdict = Verdict::Violation(ce.clone());
            }
            if self.options.continue_after_violation {
                // The store is no longer a model; the reductions that rely
                // on that are switched off.
                self.active.trace_analysis = false;
                self.active.transitive = false;
                self.entries.push(Entry {
                    inst: None,
                    ..entry
                });
                self.store.push(trace);
            }
            return Ok(Verdict::Violation(ce));
        }

        if let Some(d) = &dominance {
            let fresh = entry.inst.as_ref().expect("prepared");
            let (removed, checks) = dominated_by(d, &self.entries, fresh, self.options.parallel)?;
            self.stats.inclusion_checks += checks;
            self.remove(&removed, trace.name());
        }
        self.entries.push(entry);
        self.store.push(trace);
        Ok(Verdict::Clean)
    }

    fn remove(&mut self, removed: &[usize], dominator: &str) {
        for &i in removed {
            let name = self.store.traces()[i].name().to_string();
            self.store.record_drop(&name, dominator);
        }
        self.store.remove_indices(removed);
        let mut i = 0;
        self.entries.retain(|_| {
            let keep = !removed.contains(&i);
            i += 1;
            keep
        });
    }

    fn process_oracle(&mut self, trace: Trace) -> Result<Verdict, EngineError> {
        if self.active.trace_analysis {
            let template = self.template.clone().expect("template");
            let d = Dominance::new(&template, self.class.clone())?;
            let inst = d.prepare(&trace)?;
            let parallel = self.options.parallel;
            let (hit, checks) = first_dominator(&d, &self.entries, &inst, parallel)?;
            self.stats.inclusion_checks += checks;
            match hit {
                Some(i) => {
                    let by = self.store.traces()[i].name().to_string();
                    self.store.record_drop(trace.name(), &by);
                }
                None => {
                    let (removed, checks) = dominated_by(&d, &self.entries, &inst, parallel)?;
                    self.stats.inclusion_checks += checks;
                    self.remove(&removed, trace.name());
                    self.entries.push(Entry {
                        slots: Vec::new(),
                        inst: Some(inst),
                    });
                    self.store.push(trace);
                }
            }
        } else {
            self.store.push(trace);
        }
        self.stats.instances_run += 1;
        let holds = eval_quantified(self.store.traces(), &self.qf);
        self.verdict = Verdict::Current(holds);
        Ok(self.verdict.clone())
    }
}

/// Index of the first entry dominating `fresh`, and the inclusion checks
/// spent up to it.
fn first_dominator(
    d: &Dominance,
    entries: &[Entry],
    fresh: &Instantiated,
    parallel: bool,
) -> Result<(Option<usize>, u64), DominanceError> {
    let check = |e: &Entry| d.check(e.inst.as_ref().expect("prepared"), fresh);
    let results: Vec<(bool, usize)> = if parallel {
        entries.par_iter().map(check).collect::<Result<_, _>>()?
    } else {
        let mut out = Vec::new();
        for e in entries {
            let r = check(e)?;
            out.push(r);
            if r.0 {
                break;
            }
        }
        out
    };
    let hit = results.iter().position(|r| r.0);
    let upto = hit.map_or(results.len(), |i| i + 1);
    Ok((hit, results[..upto].iter().map(|r| r.1 as u64).sum()))
}

/// Indices of the entries dominated by `fresh`, and the checks spent.
fn dominated_by(
    d: &Dominance,
    entries: &[Entry],
    fresh: &Instantiated,
    parallel: bool,
) -> Result<(Vec<usize>, u64), DominanceError> {
    let check = |e: &Entry| d.check(fresh, e.inst.as_ref().expect("prepared"));
    let results: Vec<(bool, usize)> = if parallel {
        entries.par_iter().map(check).collect::<Result<_, _>>()?
    } else {
        entries.iter().map(check).collect::<Result<_, _>>()?
    };
    let hits = results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.0)
        .map(|(i, _)| i)
        .collect();
    Ok((hits, results.iter().map(|r| r.1 as u64).sum()))
}

/// Appends, in lexicographic order, the index tuples over `0..=k` of length
/// `n` that contain `k`; with `sorted`, only non-decreasing tuples.
fn enumerate_tuples(n: usize, k: usize, sorted: bool, cur: &mut Vec<usize>, has_k: bool, out: &mut Vec<usize>) {
    if cur.len() == n {
        if has_k {
            out.extend_from_slice(cur);
        }
        return;
    }
    let last = cur.len() + 1 == n;
    let lo = if sorted { cur.last().copied().unwrap_or(0) } else { 0 };
    let lo = if last && (sorted || !has_k) { k } else { lo };
    for v in lo..=k {
        cur.push(v);
        enumerate_tuples(n, k, sorted, cur, has_k || v == k, out);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn session(text: &str, options: SessionOptions) -> Session {
        Session::new(parse_formula(text).unwrap(), options).unwrap()
    }

    const EQ: &str = "forall p. forall q. G (a@p <-> a@q)";

    fn tuples(n: usize, k: usize, sorted: bool) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        enumerate_tuples(n, k, sorted, &mut Vec::new(), false, &mut out);
        out.chunks(n).map(|c| c.to_vec()).collect()
    }

    #[test]
    fn tuple_enumeration() {
        assert_eq!(
            tuples(2, 2, false),
            vec![vec![0, 2], vec![1, 2], vec![2, 0], vec![2, 1], vec![2, 2]]
        );
        assert_eq!(tuples(2, 2, true), vec![vec![0, 2], vec![1, 2], vec![2, 2]]);
        assert_eq!(tuples(3, 1, false).len(), 8 - 1);
        assert_eq!(tuples(2, 0, false), vec![vec![0, 0]]);
    }

    #[test]
    fn eq_violation_names_both_traces() {
        let mut s = session(EQ, SessionOptions::default());
        assert_eq!(
            s.process_trace(Trace::from_props("t1", &[&["a"]])).unwrap(),
            Verdict::Clean
        );
        let v = s.process_trace(Trace::from_props("t2", &[&[]])).unwrap();
        let Verdict::Violation(ce) = v else {
            panic!("expected a violation")
        };
        let names: Vec<&str> = ce.tuple.iter().map(|(_, n)| n.as_str()).collect();
        assert_eq!(names, vec!["t1", "t2"]);
        assert_eq!(ce.rejecting_position, 1);
        // Sticky.
        let again = s.process_trace(Trace::from_props("t3", &[&["a"]])).unwrap();
        assert_eq!(&again, s.verdict());
        assert_eq!(s.store().len(), 1);
    }

    #[test]
    fn reflexive_skip_runs_no_instance_for_a_lone_trace() {
        let mut s = session(
            "forall p. forall q. (i@p <-> i@q) -> G (o@p <-> o@q)",
            SessionOptions::default(),
        );
        let t = Trace::from_props("t", &[&["i"], &["o"]]);
        assert_eq!(s.process_trace(t.clone()).unwrap(), Verdict::Clean);
        assert_eq!(s.stats().instances_run, 0);
        assert_eq!(s.process_trace(t.with_name("u")).unwrap(), Verdict::Clean);
        // The copy is dominated and discarded before any tuple is run.
        assert_eq!(s.stats().instances_run, 0);
        assert_eq!(s.store().len(), 1);
    }

    #[test]
    fn instance_count_without_reductions() {
        let opts = SessionOptions {
            trace_analysis: false,
            spec_analysis: false,
            ..Default::default()
        };
        let mut s = session(EQ, opts);
        for i in 0..4 {
            s.process_trace(Trace::from_props(format!("t{i}"), &[&["a"]])).unwrap();
        }
        // Ordered pairs with repetition: 4².
        assert_eq!(s.stats().instances_run, 16);
        let mut s = session(EQ, SessionOptions { trace_analysis: false, ..Default::default() });
        assert!(s.active().transitive);
        for i in 0..4 {
            s.process_trace(Trace::from_props(format!("t{i}"), &[&["a"]])).unwrap();
        }
        assert_eq!(s.stats().instances_run, 3);
    }

    #[test]
    fn duplicates_and_extra_propositions() {
        let mut s = session(EQ, SessionOptions::default());
        s.process_trace(Trace::from_props("t", &[&["a", "z"]])).unwrap();
        assert_eq!(s.warnings().len(), 1);
        assert_eq!(s.store().traces()[0], Trace::from_props("t", &[&["a"]]));
        assert_eq!(
            s.process_trace(Trace::empty("t")),
            Err(EngineError::DuplicateTrace("t".into()))
        );
    }

    #[test]
    fn oracle_mode_reports_current_truth() {
        let mut s = session("forall p. exists q. a@p <-> !a@q", SessionOptions::default());
        assert_eq!(
            s.process_trace(Trace::from_props("t1", &[&["a"]])).unwrap(),
            Verdict::Current(false)
        );
        assert_eq!(
            s.process_trace(Trace::from_props("t2", &[&[]])).unwrap(),
            Verdict::Current(true)
        );
    }

    #[test]
    fn continue_after_violation_keeps_collecting() {
        let opts = SessionOptions {
            continue_after_violation: true,
            ..Default::default()
        };
        let mut s = session(EQ, opts);
        s.process_trace(Trace::from_props("t1", &[&["a"]])).unwrap();
        assert!(s.process_trace(Trace::from_props("t2", &[&[]])).unwrap().is_violation());
        assert!(s.process_trace(Trace::from_props("t3", &[&[], &["a"]])).unwrap().is_violation());
        assert_eq!(s.violations().len(), 2);
        assert_eq!(s.store().len(), 3);
        assert!(!s.active().trace_analysis && !s.active().transitive);
    }
}
