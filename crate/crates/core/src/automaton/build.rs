//! Formula progression into a deterministic automaton.
//!
//! The body is put in negation normal form over `U`, `R` and `X` (`X` is
//! self-dual because the suffix of an exhausted assignment is again exhausted).
//! A state is the residual obligation left after reading a prefix, stored as
//! a minimal disjunctive normal form over temporal obligations and literals.
//! Minimal DNFs of monotone functions are unique, so the state space is finite
//! and each state is a canonical residual.
//!
//! Progression on a letter σ:
//!
//! ```text
//! prog(l, σ)      = true iff σ satisfies the literal l
//! prog(X φ, σ)    = φ
//! prog(φ U ψ, σ)  = prog(ψ, σ) ∨ (prog(φ, σ) ∧ φ U ψ)
//! prog(φ R ψ, σ)  = prog(ψ, σ) ∧ (prog(φ, σ) ∨ φ R ψ)
//! ```
//!
//! and a state accepts when its residual holds on the exhausted assignment.

use std::collections::HashMap;

use super::{AutomatonError, Dfa, Letter, Limits, StateId, MAX_SUPPORT};
use crate::formula::{desugar, AtomRef, Formula};

type NodeId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(u32, bool),
    Next(NodeId),
    Until(NodeId, NodeId),
    Release(NodeId, NodeId),
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
}

/// Sorted obligations, read conjunctively.
type Clause = Vec<NodeId>;
/// Sorted, subsumption-free clauses, read disjunctively.
type Dnf = Vec<Clause>;

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
    eps: Vec<Option<bool>>,
    mask: Vec<Option<Letter>>,
}

impl Arena {
    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        self.eps.push(None);
        self.mask.push(None);
        id
    }

    fn junction(&mut self, conj: bool, items: Vec<NodeId>) -> NodeId {
        let (unit, zero) = if conj {
            (Node::True, Node::False)
        } else {
            (Node::False, Node::True)
        };
        let mut flat = Vec::new();
        for id in items {
            match &self.nodes[id as usize] {
                n if *n == unit => {}
                n if *n == zero => return self.intern(zero),
                Node::And(xs) if conj => flat.extend(xs.iter().copied()),
                Node::Or(xs) if !conj => flat.extend(xs.iter().copied()),
                _ => flat.push(id),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        match flat.len() {
            0 => self.intern(unit),
            1 => flat[0],
            _ if conj => self.intern(Node::And(flat)),
            _ => self.intern(Node::Or(flat)),
        }
    }

    fn nnf(
        &mut self,
        f: &Formula,
        negated: bool,
        bits: &HashMap<&AtomRef, u32>,
    ) -> Result<NodeId, AutomatonError> {
        Ok(match f {
            Formula::True => self.intern(if negated { Node::False } else { Node::True }),
            Formula::Atom(a) => {
                let bit = *bits.get(a).ok_or_else(|| {
                    AutomatonError::SupportMismatch(format!("atom {a} is not in the support"))
                })?;
                self.intern(Node::Lit(bit, !negated))
            }
            Formula::Not(a) => self.nnf(a, !negated, bits)?,
            Formula::Or(a, b) => {
                let (a, b) = (self.nnf(a, negated, bits)?, self.nnf(b, negated, bits)?);
                self.junction(negated, vec![a, b])
            }
            Formula::Next(a) => {
                let a = self.nnf(a, negated, bits)?;
                self.intern(Node::Next(a))
            }
            Formula::Until(a, b) => {
                let (a, b) = (self.nnf(a, negated, bits)?, self.nnf(b, negated, bits)?);
                self.intern(if negated {
                    Node::Release(a, b)
                } else {
                    Node::Until(a, b)
                })
            }
            other => unreachable!("not a core formula: {other}"),
        })
    }

    fn eps(&mut self, id: NodeId) -> bool {
        if let Some(v) = self.eps[id as usize] {
            return v;
        }
        let v = match self.nodes[id as usize].clone() {
            Node::True => true,
            Node::False => false,
            Node::Lit(_, positive) => !positive,
            Node::Next(a) => self.eps(a),
            Node::Until(_, b) | Node::Release(_, b) => self.eps(b),
            Node::And(xs) => xs.into_iter().all(|x| self.eps(x)),
            Node::Or(xs) => xs.into_iter().any(|x| self.eps(x)),
        };
        self.eps[id as usize] = Some(v);
        v
    }

    /// Bits read at the current position.
    fn mask(&mut self, id: NodeId) -> Letter {
        if let Some(v) = self.mask[id as usize] {
            return v;
        }
        let v = match self.nodes[id as usize].clone() {
            Node::True | Node::False | Node::Next(_) => 0,
            Node::Lit(bit, _) => 1 << bit,
            Node::Until(a, b) | Node::Release(a, b) => self.mask(a) | self.mask(b),
            Node::And(xs) | Node::Or(xs) => xs.into_iter().fold(0, |m, x| m | self.mask(x)),
        };
        self.mask[id as usize] = Some(v);
        v
    }

    fn complementary(&self, clause: &Clause) -> bool {
        clause.iter().any(|&x| match self.nodes[x as usize] {
            Node::Lit(bit, true) => clause
                .iter()
                .any(|&y| self.nodes[y as usize] == Node::Lit(bit, false)),
            _ => false,
        })
    }

    fn normalize(&self, mut dnf: Dnf) -> Dnf {
        dnf.retain(|c| !self.complementary(c));
        for c in &mut dnf {
            c.sort_unstable();
            c.dedup();
        }
        dnf.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        dnf.dedup();
        let mut kept: Dnf = Vec::with_capacity(dnf.len());
        for c in dnf {
            if !kept.iter().any(|k| is_subset(k, &c)) {
                kept.push(c);
            }
        }
        kept.sort();
        kept
    }

    fn dnf_or(&self, mut a: Dnf, b: Dnf) -> Dnf {
        a.extend(b);
        self.normalize(a)
    }

    fn dnf_and(&self, a: &Dnf, b: &Dnf) -> Dnf {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in a {
            for y in b {
                let mut c = x.clone();
                c.extend_from_slice(y);
                out.push(c);
            }
        }
        self.normalize(out)
    }

    fn to_dnf(&self, id: NodeId) -> Dnf {
        match &self.nodes[id as usize] {
            Node::True => vec![vec![]],
            Node::False => vec![],
            Node::Lit(..) | Node::Next(_) | Node::Until(..) | Node::Release(..) => vec![vec![id]],
            Node::And(xs) => xs
                .iter()
                .fold(vec![vec![]], |acc, &x| self.dnf_and(&acc, &self.to_dnf(x))),
            Node::Or(xs) => xs
                .iter()
                .fold(vec![], |acc, &x| self.dnf_or(acc, self.to_dnf(x))),
        }
    }

    fn prog(&self, id: NodeId, letter: Letter, cache: &mut HashMap<NodeId, Dnf>) -> Dnf {
        if let Some(d) = cache.get(&id) {
            return d.clone();
        }
        let d = match &self.nodes[id as usize] {
            Node::True => vec![vec![]],
            Node::False => vec![],
            &Node::Lit(bit, positive) => {
                if (letter >> bit & 1 == 1) == positive {
                    vec![vec![]]
                } else {
                    vec![]
                }
            }
            &Node::Next(a) => self.to_dnf(a),
            &Node::Until(a, b) => {
                let now = self.prog(b, letter, cache);
                let hold = self.prog(a, letter, cache);
                let later = self.dnf_and(&hold, &vec![vec![id]]);
                self.dnf_or(now, later)
            }
            &Node::Release(a, b) => {
                let now = self.prog(b, letter, cache);
                let release = self.prog(a, letter, cache);
                let keep = self.dnf_or(release, vec![vec![id]]);
                self.dnf_and(&now, &keep)
            }
            Node::And(xs) => {
                let xs = xs.clone();
                let mut acc: Dnf = vec![vec![]];
                for x in xs {
                    let d = self.prog(x, letter, cache);
                    acc = self.dnf_and(&acc, &d);
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
            Node::Or(xs) => {
                let xs = xs.clone();
                let mut acc: Dnf = vec![];
                for x in xs {
                    let d = self.prog(x, letter, cache);
                    acc = self.dnf_or(acc, d);
                }
                acc
            }
        };
        cache.insert(id, d.clone());
        d
    }

    fn successor(&self, state: &Dnf, letter: Letter) -> Dnf {
        let mut cache = HashMap::new();
        let mut acc: Dnf = vec![];
        for clause in state {
            let mut conj: Dnf = vec![vec![]];
            for &o in clause {
                let d = self.prog(o, letter, &mut cache);
                conj = self.dnf_and(&conj, &d);
                if conj.is_empty() {
                    break;
                }
            }
            acc.extend(conj);
        }
        self.normalize(acc)
    }
}

fn is_subset(small: &[NodeId], big: &[NodeId]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

/// Compiles a quantifier-free body into a complete automaton over `support`
/// (before minimization). Derived operators are desugared first.
pub fn build_dfa(
    body: &Formula,
    support: &[AtomRef],
    limits: Limits,
) -> Result<Dfa, AutomatonError> {
    let limit = limits.max_atoms.min(MAX_SUPPORT);
    if support.len() > limit {
        return Err(AutomatonError::AtomLimit {
            atoms: support.len(),
            limit,
        });
    }
    let bits: HashMap<&AtomRef, u32> = support
        .iter()
        .enumerate()
        .map(|(i, a)| (a, i as u32))
        .collect();
    if bits.len() != support.len() {
        return Err(AutomatonError::SupportMismatch(
            "support lists an atom twice".into(),
        ));
    }
    let mut arena = Arena::default();
    let root = arena.nnf(&desugar(body), false, &bits)?;

    let letters = 1usize << support.len();
    let full: Letter = (letters - 1) as Letter;
    let mut states: Vec<Dnf> = vec![arena.to_dnf(root)];
    let mut ids: HashMap<Dnf, StateId> = HashMap::from([(states[0].clone(), 0)]);
    let mut table: Vec<StateId> = Vec::new();
    let mut accepting = Vec::new();

    let mut next = 0;
    while next < states.len() {
        let state = states[next].clone();
        next += 1;
        let accepts = state
            .iter()
            .any(|c| c.iter().all(|&o| arena.eps(o)));
        accepting.push(accepts);
        let mask = state
            .iter()
            .flatten()
            .fold(0, |m, &o| m | arena.mask(o))
            & full;

        // Successors only depend on the bits in `mask`; walk its submasks.
        let mut by_submask: HashMap<Letter, StateId> = HashMap::new();
        let mut sub: Letter = 0;
        loop {
            let succ = arena.successor(&state, sub);
            let id = match ids.get(&succ) {
                Some(&id) => id,
                None => {
                    if states.len() >= limits.max_states {
                        return Err(AutomatonError::StateLimit {
                            limit: limits.max_states,
                        });
                    }
                    let id = states.len() as StateId;
                    ids.insert(succ.clone(), id);
                    states.push(succ);
                    id
                }
            };
            by_submask.insert(sub, id);
            if sub == mask {
                break;
            }
            sub = (sub.wrapping_sub(mask)) & mask;
        }
        if mask == full {
            table.extend((0..letters as Letter).map(|l| by_submask[&l]));
        } else {
            table.extend((0..letters as Letter).map(|l| by_submask[&(l & mask)]));
        }
    }
    Ok(Dfa::assemble(support.to_vec(), 0, accepting, table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn compile(text: &str) -> Dfa {
        let qf = parse_formula(text).unwrap();
        let support = crate::formula::collect_alphabet(&qf);
        build_dfa(&qf.body, &support, Limits::default()).unwrap()
    }

    #[test]
    fn single_atom_has_three_states() {
        let dfa = compile("forall p. a@p").minimized();
        assert_eq!(dfa.num_states(), 3);
        assert!(!dfa.accepts_word(&[]));
        assert!(dfa.accepts_word(&[1]));
        assert!(!dfa.accepts_word(&[0]));
    }

    #[test]
    fn globally_has_empty_language() {
        let dfa = compile("forall p. G a@p");
        assert!(dfa.is_empty());
        assert_eq!(dfa.shortest_accepted(), None);
    }

    #[test]
    fn true_accepts_empty_word() {
        let dfa = compile("forall p. true");
        assert_eq!(dfa.shortest_accepted(), Some(vec![]));
        assert_eq!(dfa.minimized().num_states(), 1);
    }

    #[test]
    fn atom_outside_support_is_rejected() {
        let qf = parse_formula("forall p. a@p & b@p").unwrap();
        let err = build_dfa(&qf.body, &[AtomRef::new("a", "p")], Limits::default()).unwrap_err();
        assert!(matches!(err, AutomatonError::SupportMismatch(_)));
    }

    #[test]
    fn limits_are_enforced() {
        let qf = parse_formula("forall p. a@p & b@p").unwrap();
        let support = crate::formula::collect_alphabet(&qf);
        let tight = Limits {
            max_states: 100,
            max_atoms: 1,
        };
        assert!(matches!(
            build_dfa(&qf.body, &support, tight),
            Err(AutomatonError::AtomLimit { .. })
        ));
        let qf = parse_formula("forall p. X X X X a@p").unwrap();
        let support = crate::formula::collect_alphabet(&qf);
        let tight = Limits {
            max_states: 3,
            max_atoms: 16,
        };
        assert_eq!(
            build_dfa(&qf.body, &support, tight),
            Err(AutomatonError::StateLimit { limit: 3 })
        );
    }
}
