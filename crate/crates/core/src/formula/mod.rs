//! HyperLTL syntax: trace variables, indexed atoms, quantifier-free bodies and
//! quantified formulas.
//!
//! The concrete syntax writes an atom `a` on trace variable `p` as `a@p`. The
//! body grammar, from loosest to tightest binding:
//!
//! ```text
//! body  := iff
//! iff   := xor ("<->" xor)*
//! xor   := impl ("^" impl)*
//! impl  := or ("->" impl)?
//! or    := and ("|" and)*
//! and   := unary ("&" unary)*
//! unary := "!" unary | "X" unary | "G" unary | "F" unary
//!        | atomOrParen (("U" | "W" | "R") unary)?
//! ```

mod parser;
mod print;
mod transform;

use std::collections::BTreeSet;
use std::fmt;

pub use parser::{parse_formula, FormulaError};
pub use transform::{desugar, is_core, rename_variables, simplify, swap_map};

/// A trace variable bound by a quantifier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceVariable(String);

impl TraceVariable {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TraceVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TraceVariable {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

/// Proposition `proposition` observed on the trace bound to `variable`.
///
/// Ordered by proposition first, then variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomRef {
    pub proposition: String,
    pub variable: TraceVariable,
}

impl AtomRef {
    pub fn new(proposition: impl Into<String>, variable: impl Into<TraceVariable>) -> Self {
        Self {
            proposition: proposition.into(),
            variable: variable.into(),
        }
    }
}

impl fmt::Display for AtomRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.proposition, self.variable)
    }
}

/// Quantifier-free body.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(AtomRef),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    WeakUntil(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Globally(Box<Formula>),
    Finally(Box<Formula>),
}

impl Formula {
    pub fn atom(proposition: &str, variable: &str) -> Self {
        Self::Atom(AtomRef::new(proposition, variable))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Self::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Self::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Self::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Self::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Self::Iff(Box::new(a), Box::new(b))
    }

    pub fn xor(a: Formula, b: Formula) -> Self {
        Self::Xor(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Self::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Self::Until(Box::new(a), Box::new(b))
    }

    pub fn weak_until(a: Formula, b: Formula) -> Self {
        Self::WeakUntil(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Self::Release(Box::new(a), Box::new(b))
    }

    pub fn globally(f: Formula) -> Self {
        Self::Globally(Box::new(f))
    }

    pub fn finally(f: Formula) -> Self {
        Self::Finally(Box::new(f))
    }

    /// Conjunction of all items, `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Disjunction of all items, `false` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            True | False | Atom(_) => vec![],
            Not(a) | Next(a) | Globally(a) | Finally(a) => vec![a],
            Or(a, b)
            | And(a, b)
            | Implies(a, b)
            | Iff(a, b)
            | Xor(a, b)
            | Until(a, b)
            | WeakUntil(a, b)
            | Release(a, b) => vec![a, b],
        }
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn atoms(&self) -> BTreeSet<AtomRef> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<AtomRef>) {
        if let Formula::Atom(a) = self {
            out.insert(a.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    pub fn variables(&self) -> BTreeSet<TraceVariable> {
        self.atoms().into_iter().map(|a| a.variable).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        })
    }
}

/// A closed HyperLTL formula: quantifier prefix plus body.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuantifiedFormula {
    pub prefix: Vec<(Quantifier, TraceVariable)>,
    pub body: Formula,
}

impl QuantifiedFormula {
    pub fn new(prefix: Vec<(Quantifier, TraceVariable)>, body: Formula) -> Self {
        Self { prefix, body }
    }

    /// `forall v1. ... forall vn. body`
    pub fn forall(vars: &[&str], body: Formula) -> Self {
        Self::new(
            vars.iter()
                .map(|v| (Quantifier::Forall, TraceVariable::new(*v)))
                .collect(),
            body,
        )
    }

    /// `exists v1. ... exists vn. body`
    pub fn exists(vars: &[&str], body: Formula) -> Self {
        Self::new(
            vars.iter()
                .map(|v| (Quantifier::Exists, TraceVariable::new(*v)))
                .collect(),
            body,
        )
    }

    pub fn variables(&self) -> Vec<TraceVariable> {
        self.prefix.iter().map(|(_, v)| v.clone()).collect()
    }

    pub fn class(&self) -> QuantifierClass {
        classify_prefix(self)
    }
}

/// Prefix shapes the engine distinguishes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QuantifierClass {
    ForallN(usize),
    ExistsN(usize),
    ForallExists,
    /// Any other prefix; carries its shape, e.g. `EA` or `AEA`.
    Other(String),
}

impl QuantifierClass {
    pub fn is_universal(&self) -> bool {
        matches!(self, QuantifierClass::ForallN(_))
    }
}

impl fmt::Display for QuantifierClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantifierClass::ForallN(n) => write!(f, "forall^{n}"),
            QuantifierClass::ExistsN(n) => write!(f, "exists^{n}"),
            QuantifierClass::ForallExists => f.write_str("forall-exists"),
            QuantifierClass::Other(shape) if shape.is_empty() => f.write_str("quantifier-free"),
            QuantifierClass::Other(shape) => write!(f, "other({shape})"),
        }
    }
}

pub fn classify_prefix(qf: &QuantifiedFormula) -> QuantifierClass {
    let n = qf.prefix.len();
    let foralls = qf
        .prefix
        .iter()
        .filter(|(q, _)| *q == Quantifier::Forall)
        .count();
    match (n, foralls) {
        (0, _) => QuantifierClass::Other(String::new()),
        (n, f) if f == n => QuantifierClass::ForallN(n),
        (n, 0) => QuantifierClass::ExistsN(n),
        (2, 1) if qf.prefix[0].0 == Quantifier::Forall => QuantifierClass::ForallExists,
        _ => QuantifierClass::Other(
            qf.prefix
                .iter()
                .map(|(q, _)| match q {
                    Quantifier::Forall => 'A',
                    Quantifier::Exists => 'E',
                })
                .collect(),
        ),
    }
}

/// Indexed atoms occurring in the body, ordered by proposition then variable.
pub fn collect_alphabet(qf: &QuantifiedFormula) -> Vec<AtomRef> {
    qf.body.atoms().into_iter().collect()
}

/// Propositions occurring in the body, regardless of variable.
pub fn propositions(f: &Formula) -> BTreeSet<String> {
    f.atoms().into_iter().map(|a| a.proposition).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        let body = Formula::True;
        assert_eq!(
            QuantifiedFormula::forall(&["p", "q"], body.clone()).class(),
            QuantifierClass::ForallN(2)
        );
        assert_eq!(
            QuantifiedFormula::exists(&["p", "q"], body.clone()).class(),
            QuantifierClass::ExistsN(2)
        );
        let fe = QuantifiedFormula::new(
            vec![
                (Quantifier::Forall, "p".into()),
                (Quantifier::Exists, "q".into()),
            ],
            body.clone(),
        );
        assert_eq!(fe.class(), QuantifierClass::ForallExists);
        let ef = QuantifiedFormula::new(
            vec![
                (Quantifier::Exists, "p".into()),
                (Quantifier::Forall, "q".into()),
            ],
            body,
        );
        assert_eq!(ef.class(), QuantifierClass::Other("EA".into()));
    }

    #[test]
    fn alphabet_is_sorted_and_deduplicated() {
        let qf = parse_formula("forall p. forall q. G (a@p <-> a@q)").unwrap();
        assert_eq!(
            collect_alphabet(&qf),
            vec![AtomRef::new("a", "p"), AtomRef::new("a", "q")]
        );
        let qf = parse_formula("forall p. true").unwrap();
        assert!(collect_alphabet(&qf).is_empty());
        let qf =
            parse_formula("forall p. forall q. (o@p <-> o@q) W !(i@p <-> i@q)").unwrap();
        assert_eq!(
            collect_alphabet(&qf),
            vec![
                AtomRef::new("i", "p"),
                AtomRef::new("i", "q"),
                AtomRef::new("o", "p"),
                AtomRef::new("o", "q"),
            ]
        );
    }
}
