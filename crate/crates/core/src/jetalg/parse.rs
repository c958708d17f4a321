//! Recursive-descent parser for germ expressions.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary ("*" unary)*
//! unary  := ("+" | "-") unary | power
//! power  := atom ("^" INT)?
//! atom   := INT ("/" INT)? | VAR | "(" expr ")"
//! VAR    := x1..x9 | y1..y9 | t | q1..q9 | u11..u99 | z | x | y | q | u
//! ```

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{JetError, Poly, VarSpec, Q};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, JetError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().map(|p| p.1).collect();
            out.push((pos, Tok::Int(s.parse().expect("digits"))));
            i = j;
        } else if c.is_ascii_alphabetic() {
            let mut j = i + 1;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().map(|p| p.1).collect();
            out.push((pos, Tok::Ident(s)));
            i = j;
        } else if "+-*^/()".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(JetError::Syntax { pos, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    spec: &'a Arc<VarSpec>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, JetError> {
        Err(JetError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, JetError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, JetError> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, JetError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly, JetError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                let e: u32 = match u32::try_from(&n) {
                    Ok(e) if e >= 1 => e,
                    _ => return self.err("exponent must be a positive integer"),
                };
                self.at += 1;
                Ok(base.pow_truncate(e, None))
            }
            _ => self.err("expected a positive integer exponent after `^`"),
        }
    }

    fn atom(&mut self) -> Result<Poly, JetError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                if self.eat('/') {
                    match self.peek().cloned() {
                        Some(Tok::Int(d)) if !d.is_zero() => {
                            self.at += 1;
                            Ok(Poly::constant(self.spec, Q::new(n, d)))
                        }
                        Some(Tok::Int(_)) => self.err("zero denominator"),
                        _ => self.err("expected an integer denominator after `/`"),
                    }
                } else {
                    Ok(Poly::constant(self.spec, Q::from_integer(n)))
                }
            }
            Some(Tok::Ident(name)) => match self.spec.index(&name) {
                Some(i) => {
                    self.at += 1;
                    Ok(Poly::var(self.spec, i))
                }
                None => Err(JetError::UnknownVar(name)),
            },
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(inner)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a germ expression over `spec`.
pub fn parse_poly(text: &str, spec: &Arc<VarSpec>) -> Result<Poly, JetError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), spec };
    let out = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(out)
}

/// Identifiers occurring in `text`, in order of first appearance.
pub fn scan_names(text: &str) -> Result<Vec<String>, JetError> {
    let mut out: Vec<String> = Vec::new();
    for (_, t) in lex(text)? {
        if let Tok::Ident(s) = t {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// Builds the smallest spec covering the names used in `texts`, with extra parameters added.
pub fn infer_spec(texts: &[&str], extra: &[&str]) -> Result<VarSpec, JetError> {
    let mut r = 0usize;
    let mut k = 0usize;
    let mut params: Vec<String> = extra.iter().map(|s| s.to_string()).collect();
    for text in texts {
        for name in scan_names(text)? {
            let idx = |s: &str| s[1..].parse::<usize>().unwrap_or(1);
            match name.as_bytes()[0] {
                b'x' if name.len() <= 2 => r = r.max(idx(&name)),
                b'y' if name.len() <= 2 => k = k.max(idx(&name)),
                _ => {
                    let canon = match name.as_str() {
                        "q" => "q1".to_string(),
                        "u" => "u11".to_string(),
                        _ => name.clone(),
                    };
                    if !params.contains(&canon) {
                        params.push(canon);
                    }
                }
            }
        }
    }
    let p: Vec<&str> = params.iter().map(String::as_str).collect();
    VarSpec::new(r, k, &p).map_err(|e| match e {
        JetError::Spec(m) => JetError::UnknownVar(m),
        e => e,
    })
}
