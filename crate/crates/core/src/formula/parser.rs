use std::collections::BTreeSet;

use thiserror::Error;

use super::{AtomRef, Formula, QuantifiedFormula, Quantifier, TraceVariable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: trace variable `{variable}` is not bound by the quantifier prefix")]
    UnboundVariable {
        variable: String,
        line: usize,
        column: usize,
    },
    #[error("{line}:{column}: trace variable `{variable}` is bound twice")]
    DuplicateBinder {
        variable: String,
        line: usize,
        column: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    At,
    Dot,
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Xor,
    True,
    False,
    Forall,
    Exists,
    Next,
    Globally,
    Finally,
    Until,
    WeakUntil,
    Release,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::At => "@",
            Tok::Dot => ".",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Not => "!",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Implies => "->",
            Tok::Iff => "<->",
            Tok::Xor => "^",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::Next => "X",
            Tok::Globally => "G",
            Tok::Finally => "F",
            Tok::Until => "U",
            Tok::WeakUntil => "W",
            Tok::Release => "R",
            Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, FormulaError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let mut push = |tok: Tok| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            })
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                column = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                column += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '@' => push(Tok::At),
            '.' => push(Tok::Dot),
            '(' => push(Tok::LParen),
            ')' => push(Tok::RParen),
            '!' => push(Tok::Not),
            '&' => push(Tok::And),
            '|' => push(Tok::Or),
            '^' => push(Tok::Xor),
            '-' if chars.get(i + 1) == Some(&'>') => {
                push(Tok::Implies);
                i += 2;
                column += 2;
                continue;
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(Tok::Iff);
                i += 3;
                column += 3;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                column += i - start;
                push(match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "X" => Tok::Next,
                    "G" => Tok::Globally,
                    "F" => Tok::Finally,
                    "U" => Tok::Until,
                    "W" => Tok::WeakUntil,
                    "R" => Tok::Release,
                    _ => Tok::Ident(word),
                });
                continue;
            }
            other => {
                return Err(FormulaError::Syntax {
                    line,
                    column,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
        column += 1;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    bound: BTreeSet<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> FormulaError {
        let (line, column) = self.here();
        FormulaError::Syntax {
            line,
            column,
            message,
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Spanned, FormulaError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.error(format!(
                "expected `{}`, found {}",
                tok.text(),
                self.peek().describe()
            )))
        }
    }

    fn ident(&mut self, what: &str) -> Result<Spanned, FormulaError> {
        match self.peek() {
            Tok::Ident(_) => Ok(self.bump()),
            other => Err(self.error(format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn formula(&mut self) -> Result<QuantifiedFormula, FormulaError> {
        let mut prefix = Vec::new();
        loop {
            let q = match self.peek() {
                Tok::Forall => Quantifier::Forall,
                Tok::Exists => Quantifier::Exists,
                _ => break,
            };
            self.bump();
            let var = self.ident("trace variable")?;
            let Tok::Ident(name) = var.tok else {
                unreachable!()
            };
            if !self.bound.insert(name.clone()) {
                return Err(FormulaError::DuplicateBinder {
                    variable: name,
                    line: var.line,
                    column: var.column,
                });
            }
            self.expect(Tok::Dot)?;
            prefix.push((q, TraceVariable::new(name)));
        }
        let body = self.iff()?;
        if *self.peek() != Tok::Eof {
            return Err(self.error(format!("unexpected {}", self.peek().describe())));
        }
        Ok(QuantifiedFormula { prefix, body })
    }

    fn iff(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.xor()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            lhs = Formula::iff(lhs, self.xor()?);
        }
        Ok(lhs)
    }

    fn xor(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Xor {
            self.bump();
            lhs = Formula::xor(lhs, self.implies()?);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            return Ok(Formula::implies(lhs, self.implies()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        let wrap: fn(Formula) -> Formula = match self.peek() {
            Tok::Not => Formula::not,
            Tok::Next => Formula::next,
            Tok::Globally => Formula::globally,
            Tok::Finally => Formula::finally,
            _ => {
                let lhs = self.atom_or_paren()?;
                let binary: fn(Formula, Formula) -> Formula = match self.peek() {
                    Tok::Until => Formula::until,
                    Tok::WeakUntil => Formula::weak_until,
                    Tok::Release => Formula::release,
                    _ => return Ok(lhs),
                };
                self.bump();
                return Ok(binary(lhs, self.unary()?));
            }
        };
        self.bump();
        Ok(wrap(self.unary()?))
    }

    fn atom_or_paren(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(prop) => {
                self.bump();
                self.expect(Tok::At)?;
                let var = self.ident("trace variable after `@`")?;
                let Tok::Ident(name) = var.tok else {
                    unreachable!()
                };
                if !self.bound.contains(&name) {
                    return Err(FormulaError::UnboundVariable {
                        variable: name,
                        line: var.line,
                        column: var.column,
                    });
                }
                Ok(Formula::Atom(AtomRef::new(prop, name.as_str())))
            }
            other => Err(self.error(format!("expected a formula, found {}", other.describe()))),
        }
    }
}

/// Parses a closed quantified formula; `#` starts a comment running to the end
/// of the line.
pub fn parse_formula(text: &str) -> Result<QuantifiedFormula, FormulaError> {
    let toks = lex(text)?;
    Parser {
        toks,
        pos: 0,
        bound: BTreeSet::new(),
    }
    .formula()
}
