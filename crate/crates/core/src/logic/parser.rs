//! Recursive-descent parser for terms and formulas.
//!
//! ```text
//! term    := "0" | "1" | ident | "~" term | term "/\" term | term "\/" term | "(" term ")"
//! formula := "mu(" term ")" | "d(" term "," term ")" | rational
//!          | formula "-." formula | formula "+." formula | formula "/2"
//!          | "|" formula "-" formula "|" | "min(" formulas ")" | "max(" formulas ")"
//!          | ("sup" | "inf") ident "." formula | builtin "(" term ")" | "(" formula ")"
//! ```

use num_traits::{One, Signed};

use super::ast::{Builtin, Formula, Term};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(String),
    LParen,
    RParen,
    Comma,
    Pipe,
    Minus,
    Monus,
    Plus,
    Half,
    Meet,
    Join,
    Tilde,
    Dot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Num(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Monus => "`-.`".into(),
            Tok::Plus => "`+.`".into(),
            Tok::Half => "`/2`".into(),
            Tok::Meet => "`/\\`".into(),
            Tok::Join => "`\\/`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let next = chars.get(i + 1).copied();
        let tok = match c {
            _ if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '|' => Tok::Pipe,
            '~' => Tok::Tilde,
            '.' => Tok::Dot,
            '-' if next == Some('.') => {
                i += 1;
                Tok::Monus
            }
            '-' => Tok::Minus,
            '+' if next == Some('.') => {
                i += 1;
                Tok::Plus
            }
            '/' if next == Some('\\') => {
                i += 1;
                Tok::Meet
            }
            '/' if next == Some('2') && !chars.get(i + 2).is_some_and(char::is_ascii_digit) => {
                i += 1;
                Tok::Half
            }
            '\\' if next == Some('/') => {
                i += 1;
                Tok::Join
            }
            _ if c.is_ascii_digit() => {
                let digits = |i: &mut usize| {
                    while *i < chars.len() && chars[*i].is_ascii_digit() {
                        *i += 1;
                    }
                };
                digits(&mut i);
                // A slash or point directly followed by a digit continues the literal.
                if i + 1 < chars.len() && (chars[i] == '/' || chars[i] == '.') && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    digits(&mut i);
                }
                out.push((start, Tok::Num(chars[start..i].iter().collect())));
                continue;
            }
            _ if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                out.push((start, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            '+' => return Err(syntax(start, "expected `+.`")),
            _ => return Err(syntax(start, format!("unexpected character `{c}`"))),
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((chars.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.pos(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => Err(syntax(self.pos(), format!("unexpected {}", t.describe()))),
        }
    }

    // ---- terms ----

    fn term(&mut self) -> Result<Term> {
        let mut lhs = self.meet_term()?;
        while *self.peek() == Tok::Join {
            self.bump();
            lhs = lhs.join(self.meet_term()?);
        }
        Ok(lhs)
    }

    fn meet_term(&mut self) -> Result<Term> {
        let mut lhs = self.unary_term()?;
        while *self.peek() == Tok::Meet {
            self.bump();
            lhs = lhs.meet(self.unary_term()?);
        }
        Ok(lhs)
    }

    fn unary_term(&mut self) -> Result<Term> {
        let pos = self.pos();
        match self.bump() {
            Tok::Tilde => Ok(self.unary_term()?.not()),
            Tok::Num(n) if n == "0" => Ok(Term::Zero),
            Tok::Num(n) if n == "1" => Ok(Term::One),
            Tok::Ident(name) => Ok(Term::Var(name)),
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            t => Err(syntax(pos, format!("expected a term, found {}", t.describe()))),
        }
    }

    // ---- formulas ----

    fn at_quantifier(&self) -> bool {
        matches!(self.peek(), Tok::Ident(q) if q == "sup" || q == "inf") && matches!(self.peek2(), Tok::Ident(_))
    }

    fn formula(&mut self) -> Result<Formula> {
        if self.at_quantifier() {
            return self.quantifier();
        }
        let mut lhs = self.postfix()?;
        loop {
            let op = self.peek().clone();
            if op != Tok::Monus && op != Tok::Plus {
                break;
            }
            self.bump();
            let rhs = if self.at_quantifier() {
                self.quantifier()?
            } else {
                self.postfix()?
            };
            lhs = if op == Tok::Monus { lhs.monus(rhs) } else { lhs.plus(rhs) };
        }
        Ok(lhs)
    }

    fn quantifier(&mut self) -> Result<Formula> {
        let q = self.bump();
        let Tok::Ident(var) = self.bump() else { unreachable!("checked by at_quantifier") };
        self.expect(Tok::Dot)?;
        let body = self.formula()?;
        Ok(match q {
            Tok::Ident(q) if q == "sup" => Formula::sup(&var, body),
            _ => Formula::inf(&var, body),
        })
    }

    fn postfix(&mut self) -> Result<Formula> {
        let mut f = self.atom()?;
        while *self.peek() == Tok::Half {
            self.bump();
            f = f.half();
        }
        Ok(f)
    }

    fn atom(&mut self) -> Result<Formula> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(text) => {
                let c: Rational = parse_rational(&text).map_err(|_| syntax(pos, format!("bad number `{text}`")))?;
                if c.is_negative() || c > Rational::one() {
                    return Err(syntax(pos, format!("constant `{text}` is outside [0,1]")));
                }
                Ok(Formula::Const(c))
            }
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Pipe => {
                let a = self.formula()?;
                self.expect(Tok::Minus)?;
                let b = self.formula()?;
                self.expect(Tok::Pipe)?;
                Ok(a.abs_diff(b))
            }
            Tok::Ident(name) => {
                if *self.peek() != Tok::LParen {
                    return Err(syntax(self.pos(), format!("expected `(` after `{name}`")));
                }
                let builtin = Builtin::from_name(&name);
                if !matches!(name.as_str(), "mu" | "d" | "min" | "max") && builtin.is_none() {
                    return Err(Error::UnknownSymbol(name));
                }
                self.bump();
                let f = match name.as_str() {
                    "mu" => Formula::Mu(self.term()?),
                    "d" => {
                        let a = self.term()?;
                        self.expect(Tok::Comma)?;
                        Formula::D(a, self.term()?)
                    }
                    "min" | "max" => {
                        let mut args = vec![self.formula()?];
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            args.push(self.formula()?);
                        }
                        if name == "min" {
                            Formula::Min(args)
                        } else {
                            Formula::Max(args)
                        }
                    }
                    _ => Formula::Call(builtin.expect("checked above"), self.term()?),
                };
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            t => Err(syntax(pos, format!("expected a formula, found {}", t.describe()))),
        }
    }
}

/// Parses a formula. Positions in errors are character offsets.
pub fn parse(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a boolean term.
pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}
