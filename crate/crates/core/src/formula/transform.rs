use std::collections::BTreeMap;

use super::{AtomRef, Formula, TraceVariable};

/// True if `f` uses only the core constructors atom, true, not, or, next, until.
pub fn is_core(f: &Formula) -> bool {
    use Formula::*;
    match f {
        True | Atom(_) => true,
        Not(a) | Next(a) => is_core(a),
        Or(a, b) | Until(a, b) => is_core(a) && is_core(b),
        _ => false,
    }
}

/// Rewrites every derived operator into atom/true/not/or/next/until.
pub fn desugar(f: &Formula) -> Formula {
    use Formula as F;
    let not = F::not;
    let or = F::or;
    let and = |a: F, b: F| not(or(not(a), not(b)));
    let implies = |a: F, b: F| or(not(a), b);
    let globally = |a: F| not(F::until(F::True, not(a)));
    match f {
        F::True => F::True,
        F::False => not(F::True),
        F::Atom(a) => F::Atom(a.clone()),
        F::Not(a) => not(desugar(a)),
        F::Or(a, b) => or(desugar(a), desugar(b)),
        F::Next(a) => F::next(desugar(a)),
        F::Until(a, b) => F::until(desugar(a), desugar(b)),
        F::And(a, b) => and(desugar(a), desugar(b)),
        F::Implies(a, b) => implies(desugar(a), desugar(b)),
        F::Iff(a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            and(implies(a.clone(), b.clone()), implies(b, a))
        }
        F::Xor(a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            not(and(implies(a.clone(), b.clone()), implies(b, a)))
        }
        F::Finally(a) => F::until(F::True, desugar(a)),
        F::Globally(a) => globally(desugar(a)),
        F::WeakUntil(a, b) => {
            let a = desugar(a);
            or(F::until(a.clone(), desugar(b)), globally(a))
        }
        F::Release(a, b) => not(F::until(not(desugar(a)), not(desugar(b)))),
    }
}

fn is_true(f: &Formula) -> bool {
    matches!(f, Formula::True)
}

fn is_false(f: &Formula) -> bool {
    match f {
        Formula::False => true,
        Formula::Not(a) => is_true(a),
        _ => false,
    }
}

fn ordered(a: Formula, b: Formula) -> (Box<Formula>, Box<Formula>) {
    if a <= b {
        (Box::new(a), Box::new(b))
    } else {
        (Box::new(b), Box::new(a))
    }
}

/// Local rewriting: double negation, idempotence and unit laws of `|` and
/// `&`, and a canonical argument order for commutative operators.
///
/// Idempotent, and preserves core-ness (falsity stays `!true` when the input
/// is core).
pub fn simplify(f: &Formula) -> Formula {
    use Formula as F;
    match f {
        F::True | F::False | F::Atom(_) => f.clone(),
        F::Not(a) => match simplify(a) {
            F::Not(inner) => *inner,
            F::False => F::True,
            other => F::not(other),
        },
        F::Or(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            if is_true(&a) || is_true(&b) {
                F::True
            } else if is_false(&a) {
                b
            } else if is_false(&b) || a == b {
                a
            } else {
                let (a, b) = ordered(a, b);
                F::Or(a, b)
            }
        }
        F::And(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            if is_false(&a) {
                a
            } else if is_false(&b) || is_true(&a) {
                b
            } else if is_true(&b) || a == b {
                a
            } else {
                let (a, b) = ordered(a, b);
                F::And(a, b)
            }
        }
        F::Iff(a, b) => {
            let (a, b) = ordered(simplify(a), simplify(b));
            F::Iff(a, b)
        }
        F::Xor(a, b) => {
            let (a, b) = ordered(simplify(a), simplify(b));
            F::Xor(a, b)
        }
        F::Implies(a, b) => F::implies(simplify(a), simplify(b)),
        F::Next(a) => F::next(simplify(a)),
        F::Globally(a) => F::globally(simplify(a)),
        F::Finally(a) => F::finally(simplify(a)),
        F::Until(a, b) => F::until(simplify(a), simplify(b)),
        F::WeakUntil(a, b) => F::weak_until(simplify(a), simplify(b)),
        F::Release(a, b) => F::release(simplify(a), simplify(b)),
    }
}

/// Replaces the variable of every atom according to `map`. Variables absent
/// from the map are left unchanged.
pub fn rename_variables(f: &Formula, map: &BTreeMap<TraceVariable, TraceVariable>) -> Formula {
    use Formula as F;
    let r = |g: &Formula| Box::new(rename_variables(g, map));
    match f {
        F::True => F::True,
        F::False => F::False,
        F::Atom(a) => F::Atom(AtomRef {
            proposition: a.proposition.clone(),
            variable: map.get(&a.variable).unwrap_or(&a.variable).clone(),
        }),
        F::Not(a) => F::Not(r(a)),
        F::Next(a) => F::Next(r(a)),
        F::Globally(a) => F::Globally(r(a)),
        F::Finally(a) => F::Finally(r(a)),
        F::Or(a, b) => F::Or(r(a), r(b)),
        F::And(a, b) => F::And(r(a), r(b)),
        F::Implies(a, b) => F::Implies(r(a), r(b)),
        F::Iff(a, b) => F::Iff(r(a), r(b)),
        F::Xor(a, b) => F::Xor(r(a), r(b)),
        F::Until(a, b) => F::Until(r(a), r(b)),
        F::WeakUntil(a, b) => F::WeakUntil(r(a), r(b)),
        F::Release(a, b) => F::Release(r(a), r(b)),
    }
}

/// The map exchanging `a` and `b`.
pub fn swap_map(a: &TraceVariable, b: &TraceVariable) -> BTreeMap<TraceVariable, TraceVariable> {
    BTreeMap::from([(a.clone(), b.clone()), (b.clone(), a.clone())])
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;

    fn body(text: &str) -> Formula {
        parse_formula(text).unwrap().body
    }

    #[test]
    fn desugar_globally() {
        let g = body("forall p. G a@p");
        assert_eq!(
            desugar(&g),
            Formula::not(Formula::until(
                Formula::True,
                Formula::not(Formula::atom("a", "p"))
            ))
        );
    }

    #[test]
    fn desugar_weak_until() {
        let w = body("forall p. forall q. a@p W b@q");
        let expected = Formula::or(
            Formula::until(Formula::atom("a", "p"), Formula::atom("b", "q")),
            Formula::not(Formula::until(
                Formula::True,
                Formula::not(Formula::atom("a", "p")),
            )),
        );
        assert_eq!(desugar(&w), expected);
    }

    #[test]
    fn desugar_is_identity_on_core() {
        let a = Formula::atom("a", "p");
        assert_eq!(desugar(&a), a);
        let f = body("forall p. X (a@p | !true) U a@p");
        assert!(is_core(&f));
        assert_eq!(desugar(&f), f);
    }

    #[test]
    fn desugar_output_is_core() {
        let f = body("forall p. forall q. (a@p W b@q) & (a@p R F b@q) ^ (false -> G a@q)");
        assert!(!is_core(&f));
        assert!(is_core(&desugar(&f)));
    }

    #[test]
    fn rename_swap_and_identify() {
        let (p, q) = (TraceVariable::new("p"), TraceVariable::new("q"));
        let f = body("forall p. forall q. G (a@p -> a@q)");
        let swapped = rename_variables(&f, &swap_map(&p, &q));
        assert_eq!(swapped, body("forall p. forall q. G (a@q -> a@p)"));
        assert_eq!(rename_variables(&swapped, &swap_map(&p, &q)), f);

        let eq = body("forall p. forall q. G (a@p <-> a@q)");
        let identified = rename_variables(&eq, &BTreeMap::from([(q.clone(), p.clone())]));
        assert_eq!(identified, body("forall p. G (a@p <-> a@p)"));
        assert_eq!(rename_variables(&eq, &BTreeMap::new()), eq);
    }

    #[test]
    fn simplify_rules() {
        let a = Formula::atom("a", "p");
        let b = Formula::atom("b", "p");
        assert_eq!(simplify(&Formula::not(Formula::not(a.clone()))), a);
        assert_eq!(simplify(&Formula::or(a.clone(), a.clone())), a);
        assert_eq!(simplify(&Formula::or(a.clone(), Formula::True)), Formula::True);
        assert_eq!(
            simplify(&Formula::or(Formula::not(Formula::True), a.clone())),
            a
        );
        assert_eq!(
            simplify(&Formula::or(b.clone(), a.clone())),
            Formula::or(a.clone(), b.clone())
        );
    }
}
