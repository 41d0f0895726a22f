//! Recursive-descent parser for the published expression grammar.
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | power ;
//! power    = atom [ "^" [ "[" integer "]" ] exponent ] ;
//! exponent = [ "-" ] ( integer | "(" expr ")" ) ;   (* must fold to a rational *)
//! atom     = integer | "I" | "pi" | "s"
//!          | ("sqrt" | "sin" | "cos" | "exp") "(" expr ")"
//!          | "(" expr ")" ;
//! ```
//!
//! `^` binds tighter than unary minus, so `-s^2` is `-(s^2)`. The optional
//! `[k]` after `^` selects a non-principal leaf and only appears in printed
//! output of internally rewritten expressions; plain input never needs it.

use super::{Expr, Rat};
use num::{BigInt, BigRational, Signed, Zero};

/// A syntax or semantic error with the byte offset where it was detected.
#[derive(Debug, Clone, thiserror::Error)]
#[error("parse error at offset {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", b as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::add(lhs, rhs);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::sub(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expr::mul(lhs, rhs);
                }
                Some(b'/') => {
                    let at = self.pos;
                    self.pos += 1;
                    let rhs = self.unary()?;
                    if matches!(&rhs, Expr::Number(r) if r.is_zero()) {
                        return Err(ParseError {
                            position: at,
                            message: "division by a constant-folded zero".into(),
                        });
                    }
                    lhs = Expr::div(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            let inner = self.unary()?;
            return Ok(Expr::neg(inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let winding = if self.eat(b'[') {
            let neg = self.eat(b'-');
            let n = self.integer_digits()?;
            self.expect(b']')?;
            let k: i32 = n
                .to_string()
                .parse()
                .map_err(|_| self.err("winding out of range"))?;
            if neg {
                -k
            } else {
                k
            }
        } else {
            0
        };
        let exponent = self.exponent()?;
        Ok(Expr::pow_winding(base, exponent, winding))
    }

    /// Parses the exponent position: a literal integer, possibly negated, or
    /// a parenthesized constant expression folding to an exact rational.
    fn exponent(&mut self) -> Result<Rat, ParseError> {
        let neg = self.eat(b'-');
        let at = self.pos;
        let value = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                inner.fold_rational().ok_or_else(|| ParseError {
                    position: at,
                    message: "exponent is not an exact rational".into(),
                })?
            }
            Some(c) if c.is_ascii_digit() => BigRational::from_integer(self.integer_digits()?),
            _ => return Err(self.err("expected exponent")),
        };
        let value = if neg { -value } else { value };
        big_to_small(&value).ok_or_else(|| ParseError {
            position: at,
            message: "exponent out of range".into(),
        })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Number(BigRational::from_integer(
                self.integer_digits()?,
            ))),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(self.err(&format!("unexpected character '{}'", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn integer_digits(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        if self.bytes.get(self.pos) == Some(&b'.') {
            return Err(self.err("decimal literals are not supported; write a ratio like 1/2"));
        }
        BigInt::parse_bytes(&self.bytes[start..self.pos], 10).ok_or_else(|| self.err("bad integer"))
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        match name {
            "s" => Ok(Expr::Var),
            "I" => Ok(Expr::I),
            "pi" => Ok(Expr::Pi),
            "sqrt" | "sin" | "cos" | "exp" => {
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(match name {
                    "sqrt" => Expr::sqrt(arg),
                    "sin" => Expr::Sin(arg.into()),
                    "cos" => Expr::Cos(arg.into()),
                    _ => Expr::Exp(arg.into()),
                })
            }
            _ => Err(ParseError {
                position: start,
                message: format!("unknown identifier '{name}'"),
            }),
        }
    }
}

fn big_to_small(r: &BigRational) -> Option<Rat> {
    use num::ToPrimitive;
    let n = r.numer().to_i64()?;
    let d = r.denom().to_i64()?;
    if r.denom().is_negative() || d == 0 {
        return None;
    }
    Some(Rat::new(n, d))
}
