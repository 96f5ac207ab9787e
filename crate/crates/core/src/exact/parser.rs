//! Recursive-descent parser for the expression grammar shared by the CLI and
//! the file formats:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-'* atom ('^' integer)?
//! atom   := integer | ident | '(' expr ')'
//! ident  := [a-z][a-z0-9]*
//! ```
//!
//! `^` binds tightest and its exponent is a nonnegative integer literal.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(u64),
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Evaluation hooks; the same tree is interpreted over field elements and over
/// tower elements.
pub trait EvalContext {
    type Value;
    fn from_int(&mut self, v: u64) -> Result<Self::Value>;
    fn ident(&mut self, name: &str) -> Result<Self::Value>;
    fn add(&mut self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn sub(&mut self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn neg(&mut self, a: Self::Value) -> Result<Self::Value>;
    fn mul(&mut self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn div(&mut self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn pow(&mut self, a: Self::Value, e: u32) -> Result<Self::Value>;
}

pub fn eval<C: EvalContext>(expr: &Expr, ctx: &mut C) -> Result<C::Value> {
    match expr {
        Expr::Int(v) => ctx.from_int(*v),
        Expr::Ident(name) => ctx.ident(name),
        Expr::Neg(a) => {
            let a = eval(a, ctx)?;
            ctx.neg(a)
        }
        Expr::Add(a, b) => {
            let (a, b) = (eval(a, ctx)?, eval(b, ctx)?);
            ctx.add(a, b)
        }
        Expr::Sub(a, b) => {
            let (a, b) = (eval(a, ctx)?, eval(b, ctx)?);
            ctx.sub(a, b)
        }
        Expr::Mul(a, b) => {
            let (a, b) = (eval(a, ctx)?, eval(b, ctx)?);
            ctx.mul(a, b)
        }
        Expr::Div(a, b) => {
            let (a, b) = (eval(a, ctx)?, eval(b, ctx)?);
            ctx.div(a, b)
        }
        Expr::Pow(a, e) => {
            let a = eval(a, ctx)?;
            ctx.pow(a, *e)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                chars.next();
            }
            '+' => {
                chars.next();
                toks.push(Tok::Plus);
            }
            '-' => {
                chars.next();
                toks.push(Tok::Minus);
            }
            '*' => {
                chars.next();
                toks.push(Tok::Star);
            }
            '/' => {
                chars.next();
                toks.push(Tok::Slash);
            }
            '^' => {
                chars.next();
                toks.push(Tok::Caret);
            }
            '(' => {
                chars.next();
                toks.push(Tok::LParen);
            }
            ')' => {
                chars.next();
                toks.push(Tok::RParen);
            }
            '0'..='9' => {
                let mut v: u64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(dig) = d.to_digit(10) {
                        v = v
                            .checked_mul(10)
                            .and_then(|v| v.checked_add(dig as u64))
                            .ok_or_else(|| Error::Parse("integer literal too large".into()))?;
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Int(v));
            }
            'a'..='z' => {
                let mut name = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_lowercase() || d.is_ascii_digit() {
                        name.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Ident(name));
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.next();
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    let rhs = self.factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.next();
                    let rhs = self.factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if let Some(Tok::Minus) = self.peek() {
            self.next();
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.next();
            match self.next() {
                Some(Tok::Int(e)) => {
                    let e = u32::try_from(e)
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    if let Some(Tok::Caret) = self.peek() {
                        return Err(Error::Parse("chained '^' is not allowed".into()));
                    }
                    return Ok(Expr::Pow(Box::new(base), e));
                }
                other => {
                    return Err(Error::Parse(format!(
                        "expected integer exponent after '^', got {other:?}"
                    )))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Tok::Int(v)) => Ok(Expr::Int(v)),
            Some(Tok::Ident(name)) => Ok(Expr::Ident(name)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    other => Err(Error::Parse(format!("expected ')', got {other:?}"))),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!(
            "trailing input after position {}",
            p.pos
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        // ^ binds tightest: 2*z^3 is 2*(z^3)
        let e = parse("2*z^3").unwrap();
        assert_eq!(
            e,
            Expr::Mul(
                Box::new(Expr::Int(2)),
                Box::new(Expr::Pow(Box::new(Expr::Ident("z".into())), 3))
            )
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("").is_err());
        assert!(parse("z^").is_err());
        assert!(parse("z^2^3").is_err());
        assert!(parse("(z").is_err());
        assert!(parse("z )").is_err());
        assert!(parse("Z").is_err());
    }
}
