//! Recursive-descent parser for the formula text syntax.
//!
//! ```text
//! formula  := disj ( "->" formula )?
//! disj     := conj ( "|" conj )*
//! conj     := unary ( "&" unary )*
//! unary    := "-" unary | ("exists" | "forall") var+ "(" formula ")" | primary
//! primary  := "False" | "(" formula ")" | atom
//! atom     := ident "(" term ( "," term )? ")" ( "=" term )? | term "=" term
//! term     := ident | ident "(" term ")"
//! ```
//!
//! Identifiers are `[a-z][a-z0-9_]*`, `#` starts a comment running to end of line.

use thiserror::Error;

use super::{Atom, Formula, Term, Variable};
use crate::config::EngineConfig;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: expected {expected}, found {found}")]
    Syntax { pos: usize, expected: String, found: String },
    #[error("offset {pos}: `{name}` is not a variable name (use x<N> for entities, y<N> for events)")]
    Sort { pos: usize, name: String },
    #[error("offset {pos}: unbound variable `{name}`")]
    UnboundVariable { pos: usize, name: String },
    #[error("offset {pos}: variable `{name}` is already bound in this scope")]
    Rebound { pos: usize, name: String },
    #[error("offset {pos}: `{name}` is not a semantic role")]
    UnknownRole { pos: usize, name: String },
    #[error("offset {pos}: functional terms nest at most once")]
    NestedFunctional { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Exists,
    Forall,
    False,
    LParen,
    RParen,
    Comma,
    Amp,
    Bar,
    Arrow,
    Minus,
    Equals,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Exists => "`exists`".into(),
            Tok::Forall => "`forall`".into(),
            Tok::False => "`False`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Equals => "`=`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            b',' => {
                out.push((Tok::Comma, i));
                i += 1;
            }
            b'&' => {
                out.push((Tok::Amp, i));
                i += 1;
            }
            b'|' => {
                out.push((Tok::Bar, i));
                i += 1;
            }
            b'=' => {
                out.push((Tok::Equals, i));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    out.push((Tok::Minus, i));
                    i += 1;
                }
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "exists" => Tok::Exists,
                    "forall" => Tok::Forall,
                    "False" => Tok::False,
                    w if w.bytes().all(|b| !b.is_ascii_uppercase()) && c.is_ascii_lowercase() => {
                        Tok::Ident(w.to_string())
                    }
                    w => {
                        return Err(ParseError::Syntax {
                            pos: start,
                            expected: "identifier `[a-z][a-z0-9_]*`".into(),
                            found: format!("`{w}`"),
                        })
                    }
                };
                out.push((tok, start));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(ParseError::Syntax {
                    pos: i,
                    expected: "a token".into(),
                    found: format!("`{ch}`"),
                });
            }
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'c> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    config: &'c EngineConfig,
    scope: Vec<Variable>,
    allow_free: bool,
}

impl<'c> Parser<'c> {
    fn new(text: &str, config: &'c EngineConfig, allow_free: bool) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(text)?, pos: 0, config, scope: Vec::new(), allow_free })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.offset(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Exists | Tok::Forall => self.quantified(),
            _ => self.primary(),
        }
    }

    fn quantified(&mut self) -> Result<Formula, ParseError> {
        let universal = self.bump() == Tok::Forall;
        let mut vars = Vec::new();
        while let Tok::Ident(name) = self.peek().clone() {
            let pos = self.offset();
            let v = Variable::from_name(&name).ok_or(ParseError::Sort { pos, name: name.clone() })?;
            if self.scope.contains(&v) || vars.contains(&v) {
                return Err(ParseError::Rebound { pos, name });
            }
            vars.push(v);
            self.bump();
        }
        if vars.is_empty() {
            return Err(self.error("a variable"));
        }
        self.expect(Tok::LParen, "`(` opening the quantifier body")?;
        self.scope.extend(vars.iter().copied());
        let body = self.formula()?;
        self.scope.truncate(self.scope.len() - vars.len());
        self.expect(Tok::RParen, "`)`")?;
        Ok(if universal {
            Formula::forall_many(vars, body)
        } else {
            Formula::exists_many(vars, body)
        })
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(_) => Ok(Formula::Atom(self.atom()?)),
            _ => Err(self.error("a formula")),
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let pos = self.offset();
        let name = match self.peek().clone() {
            Tok::Ident(n) => n,
            _ => return Err(self.error("a predicate or term")),
        };
        if *self.peek_at(1) != Tok::LParen {
            // `t = u` with a plain term on the left.
            let lhs = self.term()?;
            self.expect(Tok::Equals, "`=` or `(`")?;
            let rhs = self.term()?;
            return Ok(Atom::Eq(lhs, rhs));
        }
        self.bump();
        self.bump();
        let first = self.term()?;
        let second = if *self.peek() == Tok::Comma {
            self.bump();
            Some(self.term()?)
        } else {
            None
        };
        self.expect(Tok::RParen, "`)` or `,`")?;
        if *self.peek() == Tok::Equals {
            // `role(t) = u`
            if second.is_some() {
                return Err(self.error("`&`, `|`, `->` or `)`"));
            }
            let lhs = self.functional(name, first, pos)?;
            self.bump();
            let rhs = self.term()?;
            return Ok(Atom::Eq(lhs, rhs));
        }
        Ok(match second {
            None => Atom::Unary { pred: name, arg: first },
            Some(right) => Atom::Binary { pred: name, left: first, right },
        })
    }

    fn functional(&self, role: String, arg: Term, pos: usize) -> Result<Term, ParseError> {
        if !self.config.is_role(&role) {
            return Err(ParseError::UnknownRole { pos, name: role });
        }
        if arg.is_functional() {
            return Err(ParseError::NestedFunctional { pos });
        }
        Ok(Term::Func(role, Box::new(arg)))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let pos = self.offset();
        let name = match self.peek().clone() {
            Tok::Ident(n) => n,
            _ => return Err(self.error("a term")),
        };
        self.bump();
        if *self.peek() == Tok::LParen {
            self.bump();
            let arg = self.term()?;
            self.expect(Tok::RParen, "`)`")?;
            return self.functional(name, arg, pos);
        }
        match Variable::from_name(&name) {
            Some(v) => {
                if !self.allow_free && !self.scope.contains(&v) {
                    return Err(ParseError::UnboundVariable { pos, name });
                }
                Ok(Term::Var(v))
            }
            None => Ok(Term::Const(name)),
        }
    }
}

/// Parses a closed formula: every variable must be bound by a quantifier.
pub fn parse_formula(text: &str, config: &EngineConfig) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, config, false)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a single atom whose variables may be free.
pub fn parse_atom(text: &str, config: &EngineConfig) -> Result<Atom, ParseError> {
    let mut p = Parser::new(text, config, true)?;
    let a = p.atom()?;
    p.finish()?;
    Ok(a)
}

pub fn parse_term(text: &str, config: &EngineConfig) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, config, true)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}
