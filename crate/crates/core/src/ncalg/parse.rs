//! Text form of polynomial tuples, e.g. `(t1*t2 + 2, -1/2*t2^2 + i*b1)`.
//!
//! Factors are `t<i>` (1-based generator), `b<k>` (0-based B basis index), rationals,
//! decimals, `i`, and parenthesized sub-expressions; `^` takes a nonnegative integer power.

use num_rational::BigRational;
use num_traits::Signed;
use std::sync::Arc;

use super::coeff;
use super::poly::NCPoly;
use super::system::GeneratorSystem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Gen(usize),
    B(usize),
    Num(BigRational),
    I,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut k = 0;
    let err = |position: usize, message: String| Error::Parse { position, message };
    while k < bytes.len() {
        let c = bytes[k] as char;
        let start = k;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                k += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            ',' => out.push((start, Tok::Comma)),
            't' | 'b' => {
                let mut e = k + 1;
                while e < bytes.len() && bytes[e].is_ascii_digit() {
                    e += 1;
                }
                if e == k + 1 {
                    return Err(err(start, format!("expected an index after `{c}`")));
                }
                let idx: usize = text[k + 1..e]
                    .parse()
                    .map_err(|_| err(start, "index out of range".into()))?;
                out.push((start, if c == 't' { Tok::Gen(idx) } else { Tok::B(idx) }));
                k = e;
                continue;
            }
            'i' => out.push((start, Tok::I)),
            d if d.is_ascii_digit() || d == '.' => {
                let mut e = k;
                while e < bytes.len() && (bytes[e].is_ascii_digit() || bytes[e] == b'.') {
                    e += 1;
                }
                if e < bytes.len() && (bytes[e] == b'e' || bytes[e] == b'E') {
                    let mut f = e + 1;
                    if f < bytes.len() && (bytes[f] == b'+' || bytes[f] == b'-') {
                        f += 1;
                    }
                    if f < bytes.len() && bytes[f].is_ascii_digit() {
                        while f < bytes.len() && bytes[f].is_ascii_digit() {
                            f += 1;
                        }
                        e = f;
                    }
                }
                if e + 1 < bytes.len() && bytes[e] == b'/' && bytes[e + 1].is_ascii_digit() {
                    e += 1;
                    while e < bytes.len() && bytes[e].is_ascii_digit() {
                        e += 1;
                    }
                }
                let lit = &text[k..e];
                let r = coeff::parse_rational(lit)
                    .filter(|_| !lit.ends_with("/0"))
                    .ok_or_else(|| err(start, format!("malformed number `{lit}`")))?;
                out.push((start, Tok::Num(r)));
                k = e;
                continue;
            }
            other => return Err(err(start, format!("unexpected character `{other}`"))),
        }
        k += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    sys: &'a Arc<GeneratorSystem>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.here(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn poly(&mut self) -> Result<NCPoly> {
        let mut acc = NCPoly::zero(self.sys);
        let mut first = true;
        loop {
            let negative = match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    false
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => break,
            };
            let t = self.term()?;
            acc = if negative { acc.sub(&t)? } else { acc.add(&t)? };
            first = false;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<NCPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                }
                // juxtaposition such as `2t1` or `2i`
                Some(Tok::Gen(_) | Tok::B(_) | Tok::I | Tok::LParen) => {}
                _ => break,
            }
            let at = self.here();
            let f = self.power()?;
            acc = acc.mul(&f).map_err(|e| locate(e, at))?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<NCPoly> {
        let base = self.factor()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.here();
        let exp = match self.peek() {
            Some(Tok::Num(r)) if r.is_integer() && !r.is_negative() => {
                r.to_integer().to_string().parse::<usize>().ok()
            }
            _ => None,
        };
        let Some(exp) = exp else {
            return self.fail("expected a nonnegative integer exponent");
        };
        self.pos += 1;
        let mut acc = NCPoly::one(self.sys);
        for _ in 0..exp {
            acc = acc.mul(&base).map_err(|e| locate(e, at))?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<NCPoly> {
        let at = self.here();
        let Some(tok) = self.peek().cloned() else {
            return self.fail("unexpected end of input");
        };
        self.pos += 1;
        match tok {
            Tok::Gen(i) => {
                if i == 0 || i > self.sys.n() {
                    return Err(Error::Parse {
                        position: at,
                        message: format!("unknown generator t{i} (have t1..t{})", self.sys.n()),
                    });
                }
                NCPoly::t(self.sys, i - 1)
            }
            Tok::B(k) => NCPoly::b(self.sys, k).map_err(|_| Error::Parse {
                position: at,
                message: format!("unknown B basis element b{k}"),
            }),
            Tok::Num(r) => Ok(NCPoly::scalar(self.sys, coeff::from_real(r))),
            Tok::I => Ok(NCPoly::scalar(self.sys, coeff::imag_unit())),
            Tok::LParen => {
                let p = self.poly()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(p)
            }
            Tok::Minus => Ok(self.factor()?.neg()),
            _ => Err(Error::Parse {
                position: at,
                message: "expected a generator, B element, number or `(`".into(),
            }),
        }
    }

    fn tuple(&mut self) -> Result<Vec<NCPoly>> {
        if self.peek() == Some(&Tok::LParen) {
            let save = self.pos;
            self.pos += 1;
            let mut items = vec![self.poly()?];
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                items.push(self.poly()?);
            }
            if self.peek() == Some(&Tok::RParen) && self.pos + 1 == self.toks.len() {
                self.pos += 1;
                return Ok(items);
            }
            if items.len() > 1 {
                self.expect(Tok::RParen, "`)` closing the tuple")?;
                return self.fail("trailing input after tuple");
            }
            self.pos = save;
        }
        let p = self.poly()?;
        if self.pos != self.toks.len() {
            return self.fail("unexpected token");
        }
        Ok(vec![p])
    }
}

fn locate(e: Error, position: usize) -> Error {
    match e {
        Error::DegreeCap { degree, cap } => Error::Parse {
            position,
            message: format!("degree {degree} exceeds the cap of {cap}"),
        },
        other => other,
    }
}

/// Parses a comma-separated tuple in parentheses, or a single polynomial.
pub fn parse_tuple(text: &str, sys: &Arc<GeneratorSystem>) -> Result<Vec<NCPoly>> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Parse {
            position: 0,
            message: "empty input".into(),
        });
    }
    Parser {
        toks,
        pos: 0,
        end: text.len(),
        sys,
    }
    .tuple()
}

/// Parses a single polynomial.
pub fn parse_poly(text: &str, sys: &Arc<GeneratorSystem>) -> Result<NCPoly> {
    let mut t = parse_tuple(text, sys)?;
    if t.len() != 1 {
        return Err(Error::Parse {
            position: 0,
            message: format!("expected one polynomial, got a tuple of {}", t.len()),
        });
    }
    Ok(t.remove(0))
}
