use std::fmt;

use super::{Formula, QuantifiedFormula};

// Binding strength, loosest first. Mirrors the parser's grammar levels.
const IFF: u8 = 1;
const XOR: u8 = 2;
const IMPLIES: u8 = 3;
const OR: u8 = 4;
const AND: u8 = 5;
const UNARY: u8 = 6;
const ATOM: u8 = 7;

fn level(f: &Formula) -> u8 {
    use Formula::*;
    match f {
        True | False | Atom(_) => ATOM,
        Not(_) | Next(_) | Globally(_) | Finally(_) | Until(..) | WeakUntil(..) | Release(..) => {
            UNARY
        }
        And(..) => AND,
        Or(..) => OR,
        Implies(..) => IMPLIES,
        Xor(..) => XOR,
        Iff(..) => IFF,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(f) < min {
        out.write_str("(")?;
        write_at(f, IFF, out)?;
        return out.write_str(")");
    }
    let binary = |out: &mut fmt::Formatter<'_>, a, b, op: &str, la, lb| -> fmt::Result {
        write_at(a, la, out)?;
        write!(out, " {op} ")?;
        write_at(b, lb, out)
    };
    match f {
        Formula::True => out.write_str("true"),
        Formula::False => out.write_str("false"),
        Formula::Atom(a) => write!(out, "{a}"),
        Formula::Not(a) => {
            out.write_str("!")?;
            write_at(a, UNARY, out)
        }
        Formula::Next(a) => {
            out.write_str("X ")?;
            write_at(a, UNARY, out)
        }
        Formula::Globally(a) => {
            out.write_str("G ")?;
            write_at(a, UNARY, out)
        }
        Formula::Finally(a) => {
            out.write_str("F ")?;
            write_at(a, UNARY, out)
        }
        Formula::Until(a, b) => binary(out, a, b, "U", ATOM, UNARY),
        Formula::WeakUntil(a, b) => binary(out, a, b, "W", ATOM, UNARY),
        Formula::Release(a, b) => binary(out, a, b, "R", ATOM, UNARY),
        Formula::And(a, b) => binary(out, a, b, "&", AND, UNARY),
        Formula::Or(a, b) => binary(out, a, b, "|", OR, AND),
        Formula::Implies(a, b) => binary(out, a, b, "->", OR, IMPLIES),
        Formula::Xor(a, b) => binary(out, a, b, "^", XOR, IMPLIES),
        Formula::Iff(a, b) => binary(out, a, b, "<->", IFF, XOR),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, IFF, f)
    }
}

impl fmt::Display for QuantifiedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, v) in &self.prefix {
            write!(f, "{q} {v}. ")?;
        }
        write!(f, "{}", self.body)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;

    #[test]
    fn minimal_parentheses() {
        let qf = parse_formula("forall p. forall q. G (a@p <-> a@q)").unwrap();
        assert_eq!(qf.to_string(), "forall p. forall q. G (a@p <-> a@q)");
        let qf = parse_formula("forall p. (!a@p) U b@p").unwrap();
        assert_eq!(qf.to_string(), "forall p. (!a@p) U b@p");
        let qf = parse_formula("forall p. !a@p U b@p").unwrap();
        assert_eq!(qf.to_string(), "forall p. !a@p U b@p");
        let qf = parse_formula("forall p. (a@p -> b@p) -> c@p").unwrap();
        assert_eq!(qf.to_string(), "forall p. (a@p -> b@p) -> c@p");
    }
}
