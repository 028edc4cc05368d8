mod common;

use proptest::prelude::*;

use common::{all_traces, body_over};
use hypermon_core::automaton::Limits;
use hypermon_core::formula::{parse_formula, QuantifiedFormula};
use hypermon_core::semantics::{eval_body, Trace, TraceAssignment};
use hypermon_core::spec_analysis::{
    analyze, check_reflexivity, check_symmetry, check_transitivity, Witness,
};

fn pair(t: &Trace, u: &Trace) -> TraceAssignment {
    TraceAssignment::new().with("p", t.clone()).with("q", u.clone())
}

fn witness(w: &Witness) -> TraceAssignment {
    w.iter().cloned().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn symmetry_flag_is_sound(b in body_over(&["a", "b"], &["p", "q"], 3)) {
        let qf = QuantifiedFormula::forall(&["p", "q"], b.clone());
        let r = check_symmetry(&qf, Limits::default()).unwrap();
        if r.holds {
            let traces = all_traces(&["a", "b"], 3);
            for t in &traces {
                for u in &traces {
                    prop_assert_eq!(
                        eval_body(&pair(t, u), &b).unwrap(),
                        eval_body(&pair(u, t), &b).unwrap()
                    );
                }
            }
        } else {
            let w = witness(r.witness.as_ref().unwrap());
            let (t, u) = (&r.witness.as_ref().unwrap()[0].1, &r.witness.as_ref().unwrap()[1].1);
            prop_assert_ne!(eval_body(&w, &b).unwrap(), eval_body(&pair(u, t), &b).unwrap());
        }
    }

    #[test]
    fn reflexivity_flag_is_sound(b in body_over(&["a", "b"], &["p", "q"], 3)) {
        let qf = QuantifiedFormula::forall(&["p", "q"], b.clone());
        let r = check_reflexivity(&qf, Limits::default()).unwrap();
        if r.holds {
            for t in all_traces(&["a", "b"], 4) {
                prop_assert!(eval_body(&pair(&t, &t), &b).unwrap());
            }
        } else {
            let w = witness(r.witness.as_ref().unwrap());
            prop_assert!(!eval_body(&w, &b).unwrap());
        }
    }

    #[test]
    fn transitivity_flag_is_sound(b in body_over(&["a", "b"], &["p", "q"], 3)) {
        let qf = QuantifiedFormula::forall(&["p", "q"], b.clone());
        let r = check_transitivity(&qf, Limits::default()).unwrap();
        if r.holds {
            let traces = all_traces(&["a", "b"], 2);
            for t in &traces {
                for u in &traces {
                    if !eval_body(&pair(t, u), &b).unwrap() {
                        continue;
                    }
                    for v in &traces {
                        if eval_body(&pair(u, v), &b).unwrap() {
                            prop_assert!(eval_body(&pair(t, v), &b).unwrap());
                        }
                    }
                }
            }
        } else {
            let w = r.witness.unwrap();
            let (t, u, v) = (&w[0].1, &w[1].1, &w[2].1);
            prop_assert!(eval_body(&pair(t, u), &b).unwrap());
            prop_assert!(eval_body(&pair(u, v), &b).unwrap());
            prop_assert!(!eval_body(&pair(t, v), &b).unwrap());
        }
    }
}

#[test]
fn three_variable_symmetry_uses_every_transposition() {
    let sym = parse_formula("forall p. forall q. forall r. G (a@p <-> a@q) | G (a@q <-> a@r) | G (a@p <-> a@r)")
        .unwrap();
    assert!(check_symmetry(&sym, Limits::default()).unwrap().holds);
    // Symmetric in p,q but not in q,r.
    let asym = parse_formula("forall p. forall q. forall r. G (a@p <-> a@q) & F a@r").unwrap();
    assert!(!check_symmetry(&asym, Limits::default()).unwrap().holds);
}

#[test]
fn resource_limits_degrade_to_false() {
    let f = parse_formula("forall p. forall q. G (a@p <-> a@q)").unwrap();
    let tight = Limits { max_states: 100, max_atoms: 2 };
    let r = analyze(&f, tight);
    // Symmetry and reflexivity fit in two atoms; transitivity needs three.
    assert!(r.symmetric() && r.reflexive());
    assert!(!r.transitive());
    assert!(r.transitivity.skipped.as_deref().unwrap().contains("limit"));
}
