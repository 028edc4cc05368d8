//! Machine-readable reports. Field names are part of the output format.

use std::fmt::{self, Write};
use std::time::Duration;

use hypermon_core::engine::{CounterExample, Session, Verdict};
use hypermon_core::semantics::Trace;
use hypermon_core::spec_analysis::{CheckOutcome, SpecAnalysisResult, Witness};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    /// Universal prefix, no violating tuple found.
    Clean,
    /// Universal prefix, a violating tuple was found.
    Violation,
    /// Other prefix, formula true on the whole corpus.
    Satisfied,
    /// Other prefix, formula false on the whole corpus.
    Unsatisfied,
}

impl VerdictKind {
    pub fn exit_code(self) -> i32 {
        match self {
            VerdictKind::Clean | VerdictKind::Satisfied => 0,
            VerdictKind::Violation | VerdictKind::Unsatisfied => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub variable: String,
    pub trace: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterExampleReport {
    pub traces: Vec<Binding>,
    pub rejecting_position: usize,
}

impl From<&CounterExample> for CounterExampleReport {
    fn from(c: &CounterExample) -> Self {
        Self {
            traces: c
                .tuple
                .iter()
                .map(|(v, t)| Binding {
                    variable: v.name().to_string(),
                    trace: t.clone(),
                })
                .collect(),
            rejecting_position: c.rejecting_position,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    pub traces_seen: usize,
    pub traces_stored: usize,
    pub instances_run: u64,
    pub inclusion_checks: u64,
    pub wall_time_us: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub trace_analysis: bool,
    pub symmetric: bool,
    pub reflexive: bool,
    pub transitive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedTrace {
    pub trace: String,
    pub dominated_by: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionReport {
    pub formula: String,
    pub prefix: String,
    pub verdict: VerdictKind,
    /// The first violation, if any.
    pub counterexample: Option<CounterExampleReport>,
    /// Every violation found; more than one only when monitoring continued.
    pub violations: Vec<CounterExampleReport>,
    pub stats: StatsReport,
    pub optimizations: OptimizationReport,
    pub spec_analysis: Option<AnalysisReport>,
    pub dropped: Vec<DroppedTrace>,
    pub warnings: Vec<String>,
}

fn micros(d: Duration) -> u64 {
    d.as_micros().try_into().unwrap_or(u64::MAX)
}

impl SessionReport {
    pub fn from_session(session: &Session) -> Self {
        let violations: Vec<CounterExampleReport> =
            session.violations().iter().map(Into::into).collect();
        let verdict = match session.verdict() {
            Verdict::Clean => VerdictKind::Clean,
            Verdict::Violation(_) => VerdictKind::Violation,
            Verdict::Current(true) => VerdictKind::Satisfied,
            Verdict::Current(false) => VerdictKind::Unsatisfied,
        };
        let stats = session.stats();
        let active = session.active();
        Self {
            formula: session.formula().to_string(),
            prefix: session.class().to_string(),
            verdict,
            counterexample: violations.first().cloned(),
            violations,
            stats: StatsReport {
                traces_seen: stats.traces_seen,
                traces_stored: stats.traces_stored,
                instances_run: stats.instances_run,
                inclusion_checks: stats.inclusion_checks,
                wall_time_us: micros(stats.wall_time),
            },
            optimizations: OptimizationReport {
                trace_analysis: active.trace_analysis,
                symmetric: active.symmetric,
                reflexive: active.reflexive,
                transitive: active.transitive,
            },
            spec_analysis: session
                .spec_analysis()
                .map(|a| AnalysisReport::new(&session.formula().to_string(), a)),
            dropped: session
                .store()
                .dropped()
                .iter()
                .map(|(t, d)| DroppedTrace {
                    trace: t.clone(),
                    dominated_by: d.clone(),
                })
                .collect(),
            warnings: session.warnings().to_vec(),
        }
    }
}

impl fmt::Display for SessionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "formula: {}", self.formula)?;
        writeln!(f, "verdict: {}", verdict_word(self.verdict))?;
        for (i, c) in self.violations.iter().enumerate() {
            let tuple: Vec<String> = c
                .traces
                .iter()
                .map(|b| format!("{} = {}", b.variable, b.trace))
                .collect();
            let label = if i == 0 { "counterexample" } else { "violation" };
            writeln!(
                f,
                "{label}: {} (rejected after {} steps)",
                tuple.join(", "),
                c.rejecting_position
            )?;
        }
        let s = &self.stats;
        writeln!(f, "traces seen: {}", s.traces_seen)?;
        writeln!(f, "traces stored: {}", s.traces_stored)?;
        writeln!(f, "instances: {}", s.instances_run)?;
        writeln!(f, "inclusion checks: {}", s.inclusion_checks)?;
        writeln!(f, "time: {:.3}s", s.wall_time_us as f64 / 1e6)?;
        let o = &self.optimizations;
        let mut on = Vec::new();
        for (flag, name) in [
            (o.trace_analysis, "trace-analysis"),
            (o.symmetric, "symmetric"),
            (o.reflexive, "reflexive"),
            (o.transitive, "transitive"),
        ] {
            if flag {
                on.push(name);
            }
        }
        writeln!(
            f,
            "optimizations: {}",
            if on.is_empty() { "none".to_string() } else { on.join(", ") }
        )?;
        if !self.dropped.is_empty() {
            writeln!(f, "dropped as redundant: {}", self.dropped.len())?;
        }
        Ok(())
    }
}

fn verdict_word(v: VerdictKind) -> &'static str {
    match v {
        VerdictKind::Clean => "clean",
        VerdictKind::Violation => "violation",
        VerdictKind::Satisfied => "satisfied",
        VerdictKind::Unsatisfied => "unsatisfied",
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessTrace {
    pub variable: String,
    /// Propositions that hold, one list per step.
    pub steps: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub holds: bool,
    pub elapsed_us: u64,
    pub skipped: Option<String>,
    pub witness: Option<Vec<WitnessTrace>>,
}

fn witness_report(w: &Witness) -> Vec<WitnessTrace> {
    w.iter()
        .map(|(v, t)| WitnessTrace {
            variable: v.name().to_string(),
            steps: steps_of(t),
        })
        .collect()
}

impl From<&CheckOutcome> for CheckReport {
    fn from(c: &CheckOutcome) -> Self {
        Self {
            holds: c.holds,
            elapsed_us: micros(c.elapsed),
            skipped: c.skipped.clone(),
            witness: c.witness.as_ref().map(witness_report),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub formula: String,
    pub symmetric: CheckReport,
    pub transitive: CheckReport,
    pub reflexive: CheckReport,
}

impl AnalysisReport {
    pub fn new(formula: &str, r: &SpecAnalysisResult) -> Self {
        Self {
            formula: formula.to_string(),
            symmetric: (&r.symmetry).into(),
            transitive: (&r.transitivity).into(),
            reflexive: (&r.reflexivity).into(),
        }
    }
}

fn render_steps(steps: &[Vec<String>]) -> String {
    if steps.is_empty() {
        return "(empty)".to_string();
    }
    let mut out = String::new();
    for (i, s) in steps.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{{{}}}", s.join(",")).unwrap();
    }
    out
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "formula: {}", self.formula)?;
        for (name, c) in [
            ("symmetric", &self.symmetric),
            ("transitive", &self.transitive),
            ("reflexive", &self.reflexive),
        ] {
            let mark = if c.holds { "yes" } else { "no" };
            write!(f, "{name:<11} {mark:<4} {:.3}s", c.elapsed_us as f64 / 1e6)?;
            if let Some(reason) = &c.skipped {
                write!(f, "  (not checked: {reason})")?;
            }
            writeln!(f)?;
            for w in c.witness.iter().flatten() {
                writeln!(f, "    {}: {}", w.variable, render_steps(&w.steps))?;
            }
        }
        Ok(())
    }
}

/// Steps of a trace as proposition lists.
pub fn steps_of(t: &Trace) -> Vec<Vec<String>> {
    t.steps().iter().map(|s| s.iter().cloned().collect()).collect()
}
