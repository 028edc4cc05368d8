//! Symmetry, transitivity and reflexivity of a universally quantified body,
//! each decided as emptiness of an automaton for the violating scenarios.
//!
//! * symmetric: `ψ ^ ψ[π↔π']` has no model, for every adjacent pair of
//!   prefix variables;
//! * reflexive: `!ψ[π₁,…,πₙ ↦ π₁]` has no model;
//! * transitive (two variables): `ψ(π,π') & ψ(π',ρ) & !ψ(π,ρ)` has no
//!   model, with `ρ` a fresh variable.
//!
//! A model, when one exists, is decoded into one trace per variable.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automaton::{build_dfa, AutomatonError, Dfa, Limits};
use crate::formula::{
    rename_variables, swap_map, AtomRef, Formula, QuantifiedFormula, QuantifierClass,
    TraceVariable,
};
use crate::semantics::{Step, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecAnalysisError {
    #[error("{check} needs {needed}, got prefix `{prefix}`")]
    Fragment {
        check: &'static str,
        needed: &'static str,
        prefix: String,
    },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// One trace per variable, decoded from an accepted joint word.
pub type Witness = Vec<(TraceVariable, Trace)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub holds: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub elapsed: Duration,
    /// Why the check was not run or did not finish; `holds` is false then.
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecAnalysisResult {
    pub symmetry: CheckOutcome,
    pub transitivity: CheckOutcome,
    pub reflexivity: CheckOutcome,
}

impl SpecAnalysisResult {
    pub fn symmetric(&self) -> bool {
        self.symmetry.holds
    }

    pub fn transitive(&self) -> bool {
        self.transitivity.holds
    }

    pub fn reflexive(&self) -> bool {
        self.reflexivity.holds
    }
}

fn support_of(f: &Formula) -> Vec<AtomRef> {
    f.atoms().into_iter().collect()
}

fn decode(dfa: &Dfa, word: &[u32], vars: &[TraceVariable]) -> Witness {
    vars.iter()
        .map(|v| {
            let steps = word
                .iter()
                .map(|&l| {
                    dfa.letter_atoms(l)
                        .into_iter()
                        .filter(|a| &a.variable == v)
                        .map(|a| a.proposition.clone())
                        .collect::<Step>()
                })
                .collect();
            (v.clone(), Trace::new(v.name(), steps))
        })
        .collect()
}

/// Decides unsatisfiability of `f`, returning a model over `vars` otherwise.
fn unsatisfiable(
    f: &Formula,
    vars: &[TraceVariable],
    limits: Limits,
) -> Result<CheckResult, AutomatonError> {
    let dfa = build_dfa(f, &support_of(f), limits)?;
    Ok(match dfa.shortest_accepted() {
        None => CheckResult {
            holds: true,
            witness: None,
        },
        Some(word) => CheckResult {
            holds: false,
            witness: Some(decode(&dfa, &word, vars)),
        },
    })
}

fn single_block(qf: &QuantifiedFormula) -> bool {
    qf.prefix.windows(2).all(|w| w[0].0 == w[1].0)
}

fn fragment(check: &'static str, needed: &'static str, qf: &QuantifiedFormula) -> SpecAnalysisError {
    SpecAnalysisError::Fragment {
        check,
        needed,
        prefix: qf.class().to_string(),
    }
}

pub fn check_symmetry(qf: &QuantifiedFormula, limits: Limits) -> Result<CheckResult, SpecAnalysisError> {
    let vars = qf.variables();
    if vars.len() < 2 || !single_block(qf) {
        return Err(fragment("symmetry", "one quantifier block of at least two variables", qf));
    }
    for pair in vars.windows(2) {
        let swapped = rename_variables(&qf.body, &swap_map(&pair[0], &pair[1]));
        let chi = Formula::xor(qf.body.clone(), swapped);
        let r = unsatisfiable(&chi, &vars, limits)?;
        if !r.holds {
            return Ok(r);
        }
    }
    Ok(CheckResult {
        holds: true,
        witness: None,
    })
}

pub fn check_reflexivity(qf: &QuantifiedFormula, limits: Limits) -> Result<CheckResult, SpecAnalysisError> {
    let vars = qf.variables();
    if vars.is_empty() || !single_block(qf) {
        return Err(fragment("reflexivity", "one quantifier block", qf));
    }
    let first = vars[0].clone();
    let map: BTreeMap<_, _> = vars.iter().map(|v| (v.clone(), first.clone())).collect();
    let identified = rename_variables(&qf.body, &map);
    let mut r = unsatisfiable(&Formula::not(identified), std::slice::from_ref(&first), limits)?;
    // Every variable gets the same trace.
    if let Some(w) = r.witness.take() {
        let t = w[0].1.clone();
        r.witness = Some(vars.iter().map(|v| (v.clone(), t.clone())).collect());
    }
    Ok(r)
}

fn fresh_variable(taken: &[TraceVariable]) -> TraceVariable {
    (0..)
        .map(|i| {
            TraceVariable::new(if i == 0 {
                "r".to_string()
            } else {
                format!("r{i}")
            })
        })
        .find(|v| !taken.contains(v))
        .expect("unbounded supply")
}

pub fn check_transitivity(qf: &QuantifiedFormula, limits: Limits) -> Result<CheckResult, SpecAnalysisError> {
    let vars = qf.variables();
    if vars.len() != 2 || !single_block(qf) {
        return Err(fragment("transitivity", "one quantifier block of two variables", qf));
    }
    let (p, q) = (vars[0].clone(), vars[1].clone());
    let r = fresh_variable(&vars);
    let shifted = BTreeMap::from([(p.clone(), q.clone()), (q.clone(), r.clone())]);
    let outer = BTreeMap::from([(q.clone(), r.clone())]);
    let f = Formula::conjunction([
        qf.body.clone(),
        rename_variables(&qf.body, &shifted),
        Formula::not(rename_variables(&qf.body, &outer)),
    ]);
    Ok(unsatisfiable(&f, &[p, q, r], limits)?)
}

fn timed(
    applicable: Result<(), String>,
    run: impl FnOnce() -> Result<CheckResult, SpecAnalysisError>,
) -> CheckOutcome {
    let start = Instant::now();
    let (holds, witness, skipped) = match applicable.map(|()| run()) {
        Err(reason) => (false, None, Some(reason)),
        Ok(Ok(r)) => (r.holds, r.witness, None),
        Ok(Err(e)) => (false, None, Some(e.to_string())),
    };
    CheckOutcome {
        holds,
        witness,
        elapsed: start.elapsed(),
        skipped,
    }
}

/// Runs all three checks for a universal prefix. Checks that do not apply or
/// exceed `limits` report false.
pub fn analyze(qf: &QuantifiedFormula, limits: Limits) -> SpecAnalysisResult {
    let n = match qf.class() {
        QuantifierClass::ForallN(n) if n >= 2 => Ok(n),
        QuantifierClass::ForallN(_) => Err("needs at least two variables".to_string()),
        other => Err(format!("needs a universal prefix, got `{other}`")),
    };
    let pairs = n.clone().map(|_| ());
    SpecAnalysisResult {
        symmetry: timed(pairs.clone(), || check_symmetry(qf, limits)),
        transitivity: timed(
            n.clone().and_then(|n| {
                if n == 2 {
                    Ok(())
                } else {
                    Err("defined for two variables only".to_string())
                }
            }),
            || check_transitivity(qf, limits),
        ),
        reflexivity: timed(pairs, || check_reflexivity(qf, limits)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::semantics::{eval_body, TraceAssignment};

    fn qf(text: &str) -> QuantifiedFormula {
        parse_formula(text).unwrap()
    }

    fn assignment(w: &Witness) -> TraceAssignment {
        w.iter().cloned().collect()
    }

    #[test]
    fn eq_has_all_three() {
        let r = analyze(&qf("forall p. forall q. G (a@p <-> a@q)"), Limits::default());
        assert!(r.symmetric() && r.transitive() && r.reflexive());
    }

    #[test]
    fn one_way_implication_is_not_symmetric() {
        let f = qf("forall p. forall q. G (a@p -> a@q)");
        let r = check_symmetry(&f, Limits::default()).unwrap();
        assert!(!r.holds);
        let w = assignment(r.witness.as_ref().unwrap());
        let swapped: TraceAssignment = TraceAssignment::new()
            .with("p", w.get(&TraceVariable::new("q")).unwrap().clone())
            .with("q", w.get(&TraceVariable::new("p")).unwrap().clone());
        assert_ne!(eval_body(&w, &f.body).unwrap(), eval_body(&swapped, &f.body).unwrap());
    }

    #[test]
    fn never_equal_is_not_reflexive() {
        let f = qf("forall p. forall q. G !(a@p <-> a@q)");
        let r = check_reflexivity(&f, Limits::default()).unwrap();
        assert!(!r.holds);
        let w = assignment(r.witness.as_ref().unwrap());
        assert!(!eval_body(&w, &f.body).unwrap());
    }

    #[test]
    fn transitivity_witness_is_a_broken_chain() {
        let f = qf("forall p. forall q. (i@p <-> i@q) -> G (o@p <-> o@q)");
        let r = check_transitivity(&f, Limits::default()).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        let get = |k: usize| w[k].1.clone();
        let pair = |a: Trace, b: Trace| TraceAssignment::new().with("p", a).with("q", b);
        assert!(eval_body(&pair(get(0), get(1)), &f.body).unwrap());
        assert!(eval_body(&pair(get(1), get(2)), &f.body).unwrap());
        assert!(!eval_body(&pair(get(0), get(2)), &f.body).unwrap());
    }

    #[test]
    fn single_variable_reports_nothing() {
        let r = analyze(&qf("forall p. a@p"), Limits::default());
        assert!(!r.symmetric() && !r.transitive() && !r.reflexive());
        assert!(r.reflexivity.skipped.is_some());
    }

    #[test]
    fn fragments_are_checked() {
        assert!(check_symmetry(&qf("forall p. a@p"), Limits::default()).is_err());
        assert!(check_transitivity(
            &qf("forall p. forall q. forall r. a@p"),
            Limits::default()
        )
        .is_err());
        assert!(check_symmetry(&qf("forall p. exists q. a@p"), Limits::default()).is_err());
    }

    #[test]
    fn fresh_variable_avoids_prefix_names() {
        let f = qf("forall q. forall r. G (a@q <-> a@r)");
        assert!(check_transitivity(&f, Limits::default()).unwrap().holds);
        assert_eq!(
            fresh_variable(&[TraceVariable::new("r"), TraceVariable::new("r1")]),
            TraceVariable::new("r2")
        );
    }
}
