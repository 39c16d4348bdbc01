//! Recursive-descent parser for scalar and polynomial expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Division is only allowed by nonzero constants. Over an extension field the
//! identifier `g` denotes the field generator unless a ring variable has that
//! name. Expressions are expanded exactly before the degree check, so
//! `(x+1)^2 - x^2` has degree 1.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::scalar::{Field, Scalar, ScalarError};
use crate::trunc::{Ring, TruncPoly};

/// Total degree beyond which exact expansion is refused.
const MAX_EXPANDED_DEGREE: u32 = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("degree {degree} exceeds beta = {beta} (pass --truncate to discard higher terms)")]
    DegreeExceedsBeta { degree: usize, beta: usize },
    #[error("division by a non-constant expression at position {0}")]
    NonConstantDivisor(usize),
    #[error("expression expands beyond degree {MAX_EXPANDED_DEGREE}")]
    TooLarge,
    #[error("expected a constant, found an expression in the variables")]
    NotConstant,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|p| p.1).collect();
            out.push((pos, Token::Int(s.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((pos, Token::Ident(chars[start..i].iter().map(|p| p.1).collect())));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Token::Op(c)));
            i += 1;
        } else {
            return Err(ParseError::Syntax { pos, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

/// Exact sparse polynomial used during evaluation.
#[derive(Clone)]
struct Sparse {
    terms: BTreeMap<Vec<u32>, Scalar>,
}

struct Evaluator<'a> {
    field: &'a Field,
    names: &'a [String],
    generator: Option<Scalar>,
    /// Drop terms above this degree while expanding.
    cap: Option<u32>,
    dropped: bool,
}

impl Evaluator<'_> {
    fn nvars(&self) -> usize {
        self.names.len()
    }

    fn constant(&self, c: Scalar) -> Sparse {
        let mut terms = BTreeMap::new();
        if !self.field.is_zero(&c) {
            terms.insert(vec![0; self.nvars()], c);
        }
        Sparse { terms }
    }

    fn as_constant(&self, s: &Sparse) -> Option<Scalar> {
        match s.terms.len() {
            0 => Some(self.field.zero()),
            1 => s.terms.get(&vec![0; self.nvars()]).cloned(),
            _ => None,
        }
    }

    fn add(&self, a: &Sparse, b: &Sparse, negate: bool) -> Sparse {
        let mut terms = a.terms.clone();
        for (e, c) in &b.terms {
            let c = if negate { self.field.neg(c) } else { c.clone() };
            let v = match terms.get(e) {
                Some(old) => self.field.add(old, &c),
                None => c,
            };
            if self.field.is_zero(&v) {
                terms.remove(e);
            } else {
                terms.insert(e.clone(), v);
            }
        }
        Sparse { terms }
    }

    fn mul(&mut self, a: &Sparse, b: &Sparse) -> Result<Sparse, ParseError> {
        let mut terms: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let deg: u32 = e.iter().sum();
                if let Some(cap) = self.cap {
                    if deg > cap {
                        self.dropped = true;
                        continue;
                    }
                }
                if deg > MAX_EXPANDED_DEGREE {
                    return Err(ParseError::TooLarge);
                }
                let prod = self.field.mul(ca, cb);
                let v = match terms.get(&e) {
                    Some(old) => self.field.add(old, &prod),
                    None => prod,
                };
                terms.insert(e, v);
            }
        }
        terms.retain(|_, c| !self.field.is_zero(c));
        Ok(Sparse { terms })
    }
}

struct Parser<'a, 'b> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    ev: &'a mut Evaluator<'b>,
}

impl Parser<'_, '_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.here(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Sparse, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc = self.ev.add(&acc, &t, false);
            } else if self.eat('-') {
                let t = self.term()?;
                acc = self.ev.add(&acc, &t, true);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Sparse, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = self.ev.mul(&acc, &rhs)?;
            } else if self.peek() == Some(&Token::Op('/')) {
                let at = self.here();
                self.pos += 1;
                let rhs = self.unary()?;
                let c = self.ev.as_constant(&rhs).ok_or(ParseError::NonConstantDivisor(at))?;
                let inv = self.ev.field.inv(&c)?;
                acc = self.ev.mul(&acc, &self.ev.constant(inv))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Sparse, ParseError> {
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(self.ev.add(&Sparse { terms: BTreeMap::new() }, &inner, true));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Sparse, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let e = match self.peek() {
            Some(Token::Int(n)) => {
                let n = u32::try_from(n.clone()).or_else(|_| self.syntax("exponent too large"))?;
                self.pos += 1;
                n
            }
            _ => return self.syntax("expected a non-negative integer exponent"),
        };
        let mut acc = self.ev.constant(self.ev.field.one());
        for _ in 0..e {
            acc = self.ev.mul(&acc, &base)?;
            if acc.terms.is_empty() {
                break;
            }
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Sparse, ParseError> {
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                self.pos += 1;
                Ok(self.ev.constant(self.ev.field.from_bigint(&n)))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if let Some(j) = variable_index(self.ev.names, &name) {
                    let mut e = vec![0; self.ev.nvars()];
                    e[j] = 1;
                    let mut terms = BTreeMap::new();
                    terms.insert(e, self.ev.field.one());
                    let mut s = Sparse { terms };
                    if self.ev.cap == Some(0) {
                        s.terms.clear();
                        self.ev.dropped = true;
                    }
                    return Ok(s);
                }
                match (&self.ev.generator, name.as_str()) {
                    (Some(g), "g") => Ok(self.ev.constant(g.clone())),
                    _ => Err(ParseError::UnknownVariable(name)),
                }
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.syntax("expected `)`");
                }
                Ok(inner)
            }
            Some(Token::Op(c)) => self.syntax(format!("unexpected `{c}`")),
            None => self.syntax("unexpected end of input"),
        }
    }
}

/// Resolves a variable name: the ring's own names first, then `x1..xN`.
fn variable_index(names: &[String], name: &str) -> Option<usize> {
    if let Some(j) = names.iter().position(|n| n == name) {
        return Some(j);
    }
    let idx: usize = name.strip_prefix('x')?.parse().ok()?;
    (1..=names.len()).contains(&idx).then(|| idx - 1)
}

fn run(text: &str, ev: &mut Evaluator<'_>) -> Result<Sparse, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len(), ev };
    let out = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return parser.syntax("unexpected trailing input");
    }
    Ok(out)
}

fn generator_for(field: &Field, names: &[String]) -> Option<Scalar> {
    if names.iter().any(|n| n == "g") {
        return None;
    }
    field.generator()
}

/// Parses a scalar of `field`, e.g. `-3/4` or `g^2+1`.
pub fn parse_scalar(text: &str, field: &Field) -> Result<Scalar, ParseError> {
    let mut ev = Evaluator { field, names: &[], generator: field.generator(), cap: None, dropped: false };
    let s = run(text, &mut ev)?;
    ev.as_constant(&s).ok_or(ParseError::NotConstant)
}

/// Parses a polynomial in `g` over `F_p` and returns its coefficients from
/// degree 0 upwards (no trailing zeros).
pub fn parse_residue_poly(text: &str, p: u32) -> Result<Vec<u32>, ParseError> {
    let field = Field::prime(p)?;
    let names = vec!["g".to_string()];
    let mut ev = Evaluator { field: &field, names: &names, generator: None, cap: None, dropped: false };
    let s = run(text, &mut ev)?;
    let deg = s.terms.keys().map(|e| e[0]).max().unwrap_or(0) as usize;
    let mut out = vec![0u32; deg + 1];
    for (e, c) in &s.terms {
        out[e[0] as usize] = match c {
            Scalar::Finite(v) => *v,
            Scalar::Rational(_) => unreachable!("prime field"),
        };
    }
    while out.len() > 1 && out.last() == Some(&0) {
        out.pop();
    }
    Ok(out)
}

/// Parses an element of `ring`. Terms of degree above beta are an error
/// unless `truncate` is set, in which case they are dropped and the result is
/// marked inexact.
pub fn parse_poly(text: &str, ring: &Ring, truncate: bool) -> Result<TruncPoly, ParseError> {
    let field = ring.field();
    let mut ev = Evaluator {
        field,
        names: ring.names(),
        generator: generator_for(field, ring.names()),
        cap: truncate.then_some(ring.beta() as u32),
        dropped: false,
    };
    let s = run(text, &mut ev)?;
    let mut out = TruncPoly::zero(ring);
    let mut dropped = ev.dropped;
    for (e, c) in s.terms {
        let degree: u32 = e.iter().sum();
        match ring.index_of(&e) {
            Some(i) => out.set_coeff(i, c),
            None if truncate => dropped = true,
            None => return Err(ParseError::DegreeExceedsBeta { degree: degree as usize, beta: ring.beta() }),
        }
    }
    Ok(out.with_exact(!dropped))
}

/// Identifiers occurring in `text`, in order of first occurrence.
pub fn identifiers(text: &str) -> Result<Vec<String>, ParseError> {
    let mut out: Vec<String> = Vec::new();
    for (_, token) in tokenize(text)? {
        if let Token::Ident(name) = token {
            if !out.contains(&name) {
                out.push(name);
            }
        }
    }
    Ok(out)
}

/// Total degree of the exact expansion of `text` in the variables `names`
/// (0 for a constant).
pub fn expanded_degree(text: &str, names: &[String], field: &Field) -> Result<usize, ParseError> {
    let mut ev = Evaluator { field, names, generator: generator_for(field, names), cap: None, dropped: false };
    let s = run(text, &mut ev)?;
    Ok(s.terms.keys().map(|e| e.iter().sum::<u32>() as usize).max().unwrap_or(0))
}
