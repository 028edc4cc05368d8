use std::collections::{HashMap, VecDeque};

use super::{AutomatonError, Dfa, Letter, StateId, Word};

type Pair = (StateId, StateId);

/// Result of an inclusion check `L(a) ⊆ L(b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inclusion {
    pub included: bool,
    /// Shortest word in `L(a) \ L(b)`, smallest letters first.
    pub counterexample: Option<Word>,
}

fn same_support(a: &Dfa, b: &Dfa) -> Result<(), AutomatonError> {
    if a.support() != b.support() {
        return Err(AutomatonError::SupportMismatch(format!(
            "{} atoms against {} atoms",
            a.support().len(),
            b.support().len()
        )));
    }
    Ok(())
}

/// Decides `L(a) ⊆ L(b)` by a breadth-first search of the product for a
/// pair where `a` accepts and `b` rejects.
pub fn language_included(a: &Dfa, b: &Dfa) -> Result<Inclusion, AutomatonError> {
    same_support(a, b)?;
    // Canonical minimal automata: equal tables mean equal languages.
    if a == b {
        return Ok(Inclusion {
            included: true,
            counterexample: None,
        });
    }
    let bad = |p: (StateId, StateId)| a.is_accepting(p.0) && !b.is_accepting(p.1);
    let start = (a.initial(), b.initial());
    let mut parent: HashMap<Pair, Option<(Pair, Letter)>> =
        HashMap::from([(start, None)]);
    let path = |parent: &HashMap<_, Option<(Pair, Letter)>>, mut p| {
        let mut word = Vec::new();
        while let Some(&Some((q, l))) = parent.get(&p) {
            word.push(l);
            p = q;
        }
        word.reverse();
        word
    };
    if bad(start) {
        return Ok(Inclusion {
            included: false,
            counterexample: Some(Vec::new()),
        });
    }
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        // Nothing accepted by `a` from here: no counterexample below.
        if !a.is_live(p.0) {
            continue;
        }
        for l in 0..a.num_letters() as Letter {
            let q = (a.next(p.0, l), b.next(p.1, l));
            if parent.contains_key(&q) {
                continue;
            }
            parent.insert(q, Some((p, l)));
            if bad(q) {
                return Ok(Inclusion {
                    included: false,
                    counterexample: Some(path(&parent, q)),
                });
            }
            queue.push_back(q);
        }
    }
    Ok(Inclusion {
        included: true,
        counterexample: None,
    })
}

pub fn complement(dfa: &Dfa) -> Dfa {
    let accepting = (0..dfa.num_states() as StateId)
        .map(|s| !dfa.is_accepting(s))
        .collect();
    Dfa::assemble(
        dfa.support().to_vec(),
        dfa.initial(),
        accepting,
        dfa.table.clone(),
    )
}

/// Reachable product automaton accepting `L(a) ∩ L(b)`, minimized.
pub fn intersection(a: &Dfa, b: &Dfa) -> Result<Dfa, AutomatonError> {
    same_support(a, b)?;
    let letters = a.num_letters();
    let start = (a.initial(), b.initial());
    let mut ids = HashMap::from([(start, 0 as StateId)]);
    let mut pairs = vec![start];
    let mut table = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        i += 1;
        for l in 0..letters as Letter {
            let r = (a.next(p, l), b.next(q, l));
            let id = *ids.entry(r).or_insert_with(|| {
                pairs.push(r);
                (pairs.len() - 1) as StateId
            });
            table.push(id);
        }
    }
    let accepting = pairs
        .iter()
        .map(|&(p, q)| a.is_accepting(p) && b.is_accepting(q))
        .collect();
    Ok(Dfa::assemble(a.support().to_vec(), 0, accepting, table).minimized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{build_dfa, Limits};
    use crate::formula::{collect_alphabet, parse_formula, AtomRef};

    fn compile(text: &str, support: &[AtomRef]) -> Dfa {
        let qf = parse_formula(text).unwrap();
        build_dfa(&qf.body, support, Limits::default())
            .unwrap()
            .minimized()
    }

    #[test]
    fn inclusion_with_counterexample() {
        let support = collect_alphabet(&parse_formula("forall p. a@p & b@p").unwrap());
        let both = compile("forall p. a@p & b@p", &support);
        let one = compile("forall p. a@p | !a@p & b@p", &support);
        assert!(language_included(&both, &one).unwrap().included);
        let r = language_included(&one, &both).unwrap();
        assert!(!r.included);
        // Letters: bit 0 = a@p, bit 1 = b@p. Smallest letter in one \ both is {a@p}.
        assert_eq!(r.counterexample, Some(vec![1]));
    }

    #[test]
    fn complement_and_intersection_are_empty_together() {
        let support = vec![AtomRef::new("a", "p")];
        let f = compile("forall p. F a@p", &support);
        let empty = intersection(&f, &complement(&f)).unwrap();
        assert!(empty.is_empty());
        assert!(!complement(&f).is_empty());
    }

    #[test]
    fn mismatched_supports_error() {
        let x = compile("forall p. a@p", &[AtomRef::new("a", "p")]);
        let y = compile("forall p. b@p", &[AtomRef::new("b", "p")]);
        assert!(matches!(
            language_included(&x, &y),
            Err(AutomatonError::SupportMismatch(_))
        ));
    }
}
