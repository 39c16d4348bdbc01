//! Exact base fields: the rationals and finite fields `F_{p^m}`.
//!
//! A [`Field`] is a cheap-to-clone handle that owns all arithmetic. Elements
//! are plain [`Scalar`] values; a finite-field element is stored as the index
//! `c_0 + c_1 p + ... + c_{m-1} p^{m-1}` of its residue polynomial
//! `c_0 + c_1 g + ... + c_{m-1} g^{m-1}`, so canonical form and structural
//! equality coincide.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest field order for which extension-field log tables are built.
const MAX_EXTENSION_ORDER: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalar does not belong to field {0}")]
    FieldMismatch(String),
    #[error("not supported: {0}")]
    NotSupported(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("cannot parse scalar: {0}")]
    Parse(String),
}

/// An element of a [`Field`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rational(BigRational),
    Finite(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Rationals,
    Finite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug)]
struct FiniteRepr {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, coefficients from low to high degree; empty when m = 1.
    modulus: Vec<u32>,
    /// exp[k] = index of w^k for a primitive element w; only when m > 1.
    exp: Vec<u32>,
    log: Vec<u32>,
}

#[derive(Debug)]
enum Repr {
    Rationals,
    Finite(FiniteRepr),
}

/// Handle to an exact base field.
#[derive(Clone)]
pub struct Field(Arc<Repr>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&*self.0, &*other.0) {
            (Repr::Rationals, Repr::Rationals) => true,
            (Repr::Finite(a), Repr::Finite(b)) => a.p == b.p && a.m == b.m && a.modulus == b.modulus,
            _ => false,
        }
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({self})")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Repr::Rationals => write!(f, "Q"),
            Repr::Finite(ff) if ff.m == 1 => write!(f, "F{}", ff.p),
            Repr::Finite(ff) => {
                write!(f, "F{}[", ff.q)?;
                write!(f, "{}", format_residue_poly(&ff.modulus, ff.p))?;
                write!(f, "]")
            }
        }
    }
}

/// Conway polynomials for the small built-in extension fields, low to high.
const BUILTIN_MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (5, 2, &[2, 4, 1]),
    (3, 3, &[1, 2, 0, 1]),
];

impl Field {
    pub fn rationals() -> Self {
        Field(Arc::new(Repr::Rationals))
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self, ScalarError> {
        if !is_prime(p as u64) {
            return Err(ScalarError::InvalidField(format!("{p} is not prime")));
        }
        if p as u64 >= 1 << 31 {
            return Err(ScalarError::InvalidField(format!("prime {p} too large")));
        }
        Ok(Field(Arc::new(Repr::Finite(FiniteRepr {
            p,
            m: 1,
            q: p,
            modulus: Vec::new(),
            exp: Vec::new(),
            log: Vec::new(),
        }))))
    }

    /// `F_p[g]/(modulus)`; the modulus is given low-to-high and must be monic
    /// and irreducible over `F_p`.
    pub fn extension(p: u32, modulus: &[u32]) -> Result<Self, ScalarError> {
        if !is_prime(p as u64) {
            return Err(ScalarError::InvalidField(format!("{p} is not prime")));
        }
        let mut modulus: Vec<u32> = modulus.iter().map(|c| c % p).collect();
        while modulus.last() == Some(&0) {
            modulus.pop();
        }
        if modulus.len() < 2 {
            return Err(ScalarError::InvalidField("modulus must have degree >= 1".into()));
        }
        let m = (modulus.len() - 1) as u32;
        if m == 1 {
            return Self::prime(p);
        }
        if *modulus.last().unwrap() != 1 {
            return Err(ScalarError::InvalidField("modulus must be monic".into()));
        }
        let q = (p as u64).checked_pow(m).filter(|&q| q <= MAX_EXTENSION_ORDER).ok_or_else(|| {
            ScalarError::InvalidField(format!("field order {p}^{m} exceeds {MAX_EXTENSION_ORDER}"))
        })? as u32;
        if !is_irreducible(&modulus, p) {
            return Err(ScalarError::InvalidField(format!(
                "modulus {} is reducible over F{p}",
                format_residue_poly(&modulus, p)
            )));
        }
        let (exp, log) = build_log_tables(p, m, q, &modulus);
        Ok(Field(Arc::new(Repr::Finite(FiniteRepr { p, m, q, modulus, exp, log }))))
    }

    /// The field of order `q`: a prime field, or one of the built-in
    /// extensions F4, F8, F9, F25, F27.
    pub fn of_order(q: u32) -> Result<Self, ScalarError> {
        if is_prime(q as u64) {
            return Self::prime(q);
        }
        for &(p, m, modulus) in BUILTIN_MODULI {
            if p.pow(m) == q {
                return Self::extension(p, modulus);
            }
        }
        Err(ScalarError::InvalidField(format!(
            "no built-in modulus for order {q}; use F{q}[<modulus in g>]"
        )))
    }

    /// Parses `Q`, `F7`, `F4` (built-in modulus) or `F4[g^2+g+1]`.
    pub fn parse(text: &str) -> Result<Self, ScalarError> {
        let text = text.trim();
        if text == "Q" || text == "QQ" {
            return Ok(Self::rationals());
        }
        let rest = text
            .strip_prefix('F')
            .ok_or_else(|| ScalarError::InvalidField(format!("unknown field syntax `{text}`")))?;
        let (order_text, modulus_text) = match rest.find('[') {
            Some(open) => {
                let close = rest
                    .rfind(']')
                    .filter(|&c| c > open && c == rest.len() - 1)
                    .ok_or_else(|| ScalarError::InvalidField(format!("unbalanced brackets in `{text}`")))?;
                (&rest[..open], Some(&rest[open + 1..close]))
            }
            None => (rest, None),
        };
        let q: u32 = order_text
            .parse()
            .map_err(|_| ScalarError::InvalidField(format!("bad field order in `{text}`")))?;
        let Some(modulus_text) = modulus_text else {
            return Self::of_order(q);
        };
        let (p, m) = prime_power(q)
            .ok_or_else(|| ScalarError::InvalidField(format!("{q} is not a prime power")))?;
        let coeffs = crate::parse::parse_residue_poly(modulus_text, p)
            .map_err(|e| ScalarError::InvalidField(e.to_string()))?;
        if coeffs.len() != m as usize + 1 {
            return Err(ScalarError::InvalidField(format!(
                "modulus of F{q} must have degree {m}, got {}",
                coeffs.len().saturating_sub(1)
            )));
        }
        Self::extension(p, &coeffs)
    }

    pub fn kind(&self) -> FieldKind {
        match &*self.0 {
            Repr::Rationals => FieldKind::Rationals,
            Repr::Finite(_) => FieldKind::Finite,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.kind() == FieldKind::Finite
    }

    /// 0 for the rationals.
    pub fn characteristic(&self) -> u32 {
        match &*self.0 {
            Repr::Rationals => 0,
            Repr::Finite(ff) => ff.p,
        }
    }

    /// Extension degree over the prime field.
    pub fn degree(&self) -> u32 {
        match &*self.0 {
            Repr::Rationals => 1,
            Repr::Finite(ff) => ff.m,
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(&self) -> Option<u32> {
        match &*self.0 {
            Repr::Rationals => None,
            Repr::Finite(ff) => Some(ff.q),
        }
    }

    /// Monic modulus (low to high) of an extension field.
    pub fn modulus(&self) -> Option<&[u32]> {
        match &*self.0 {
            Repr::Finite(ff) if ff.m > 1 => Some(&ff.modulus),
            _ => None,
        }
    }

    fn finite(&self) -> Option<&FiniteRepr> {
        match &*self.0 {
            Repr::Finite(ff) => Some(ff),
            Repr::Rationals => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match &*self.0 {
            Repr::Rationals => Scalar::Rational(BigRational::zero()),
            Repr::Finite(_) => Scalar::Finite(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match &*self.0 {
            Repr::Rationals => Scalar::Rational(BigRational::one()),
            Repr::Finite(_) => Scalar::Finite(1),
        }
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match &*self.0 {
            Repr::Rationals => Scalar::Rational(BigRational::from_integer(n.clone())),
            Repr::Finite(ff) => {
                let p = BigInt::from(ff.p);
                let mut r = n % &p;
                if r.is_negative() {
                    r += &p;
                }
                Scalar::Finite(r.to_u32().expect("residue fits in u32"))
            }
        }
    }

    /// `num / den` mapped into the field.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Scalar, ScalarError> {
        let n = self.from_bigint(num);
        let d = self.from_bigint(den);
        self.div(&n, &d)
    }

    /// The class of `g` in `F_p[g]/(modulus)`.
    pub fn generator(&self) -> Option<Scalar> {
        match &*self.0 {
            Repr::Finite(ff) if ff.m > 1 => Some(Scalar::Finite(ff.p)),
            _ => None,
        }
    }

    /// Element with the given residue coefficients `c_0 + c_1 g + ...`.
    pub fn from_residue(&self, coeffs: &[u32]) -> Result<Scalar, ScalarError> {
        let ff = self
            .finite()
            .ok_or_else(|| ScalarError::NotSupported("residue polynomials over Q".into()))?;
        let reduced = poly_rem(&trim(coeffs.iter().map(|c| c % ff.p).collect()), &ff.modulus, ff.p, ff.m);
        Ok(Scalar::Finite(encode(&reduced, ff.p)))
    }

    pub fn contains(&self, a: &Scalar) -> bool {
        match (&*self.0, a) {
            (Repr::Rationals, Scalar::Rational(_)) => true,
            (Repr::Finite(ff), Scalar::Finite(i)) => *i < ff.q,
            _ => false,
        }
    }

    fn check(&self, a: &Scalar) -> Result<(), ScalarError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(ScalarError::FieldMismatch(self.to_string()))
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Finite(i) => *i == 0,
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Finite(i) => *i == 1,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x + y),
            (Scalar::Finite(x), Scalar::Finite(y)) => {
                let ff = self.finite().expect("finite field");
                Scalar::Finite(digit_op(*x, *y, ff, |u, v| (u + v) % ff.p))
            }
            _ => panic!("mixed scalar kinds"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match a {
            Scalar::Rational(x) => Scalar::Rational(-x),
            Scalar::Finite(x) => {
                let ff = self.finite().expect("finite field");
                Scalar::Finite(digit_op(*x, 0, ff, |u, _| (ff.p - u) % ff.p))
            }
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x - y),
            (Scalar::Finite(x), Scalar::Finite(y)) => {
                let ff = self.finite().expect("finite field");
                Scalar::Finite(digit_op(*x, *y, ff, |u, v| (u + ff.p - v) % ff.p))
            }
            _ => panic!("mixed scalar kinds"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            (Scalar::Finite(x), Scalar::Finite(y)) => {
                let ff = self.finite().expect("finite field");
                if *x == 0 || *y == 0 {
                    return Scalar::Finite(0);
                }
                if ff.m == 1 {
                    return Scalar::Finite(((*x as u64 * *y as u64) % ff.p as u64) as u32);
                }
                let k = (ff.log[*x as usize] as u64 + ff.log[*y as usize] as u64) % (ff.q as u64 - 1);
                Scalar::Finite(ff.exp[k as usize])
            }
            _ => panic!("mixed scalar kinds"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar, ScalarError> {
        if self.is_zero(a) {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match a {
            Scalar::Rational(x) => Scalar::Rational(x.recip()),
            Scalar::Finite(x) => {
                let ff = self.finite().expect("finite field");
                if ff.m == 1 {
                    Scalar::Finite(pow_mod(*x as u64, ff.p as u64 - 2, ff.p as u64) as u32)
                } else {
                    let k = (ff.q - 1 - ff.log[*x as usize]) % (ff.q - 1);
                    Scalar::Finite(ff.exp[k as usize])
                }
            }
        })
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Scalar, mut e: u64) -> Scalar {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Checked binary arithmetic; both operands must belong to this field.
    pub fn arith(&self, op: ArithOp, a: &Scalar, b: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
            ArithOp::Div => self.div(a, b)?,
        })
    }

    /// The unique `s` with `s^p = a`, i.e. `a^(p^(m-1))`.
    pub fn pth_root(&self, a: &Scalar) -> Result<Scalar, ScalarError> {
        let ff = self
            .finite()
            .ok_or_else(|| ScalarError::NotSupported("p-th roots in characteristic 0".into()))?;
        self.check(a)?;
        Ok(self.pow(a, (ff.p as u64).pow(ff.m - 1)))
    }

    /// All elements in canonical (index) order. Empty for the rationals.
    pub fn elements(&self) -> impl Iterator<Item = Scalar> {
        let q = self.order().unwrap_or(0);
        (0..q).map(Scalar::Finite)
    }

    /// Residue coefficients `c_0..c_{m-1}` of a finite-field element.
    pub fn residue(&self, a: &Scalar) -> Option<Vec<u32>> {
        match (self.finite(), a) {
            (Some(ff), Scalar::Finite(i)) => Some(decode(*i, ff.p, ff.m)),
            _ => None,
        }
    }

    /// Canonical text: `p/q` or an integer over Q; a residue or polynomial in
    /// `g` over `F_{p^m}`.
    pub fn format(&self, a: &Scalar) -> String {
        match (a, self.finite()) {
            (Scalar::Rational(r), _) => {
                if r.is_integer() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            (Scalar::Finite(i), Some(ff)) if ff.m > 1 => {
                format_residue_poly(&trim(decode(*i, ff.p, ff.m)), ff.p)
            }
            (Scalar::Finite(i), _) => i.to_string(),
        }
    }

    /// Inverse of [`Field::format`].
    pub fn parse_scalar(&self, text: &str) -> Result<Scalar, ScalarError> {
        crate::parse::parse_scalar(text, self).map_err(|e| ScalarError::Parse(e.to_string()))
    }

    /// True when `a` prints as a single term (needs no parentheses as a factor).
    pub fn is_atomic(&self, a: &Scalar) -> bool {
        match (a, self.finite()) {
            (Scalar::Finite(i), Some(ff)) if ff.m > 1 => {
                decode(*i, ff.p, ff.m).iter().filter(|&&c| c != 0).count() <= 1
            }
            _ => true,
        }
    }

    /// Sign-aware helper for pretty printing: true when `a` is a negative
    /// rational.
    pub fn is_negative(&self, a: &Scalar) -> bool {
        matches!(a, Scalar::Rational(r) if r.is_negative())
    }
}

fn digit_op(x: u32, y: u32, ff: &FiniteRepr, op: impl Fn(u32, u32) -> u32) -> u32 {
    if ff.m == 1 {
        return op(x, y);
    }
    let (mut x, mut y) = (x, y);
    let mut out = 0u32;
    let mut place = 1u32;
    for _ in 0..ff.m {
        out += op(x % ff.p, y % ff.p) * place;
        x /= ff.p;
        y /= ff.p;
        place = place.wrapping_mul(ff.p);
    }
    out
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn decode(mut i: u32, p: u32, m: u32) -> Vec<u32> {
    (0..m)
        .map(|_| {
            let c = i % p;
            i /= p;
            c
        })
        .collect()
}

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn format_residue_poly(coeffs: &[u32], _p: u32) -> String {
    let mut parts = Vec::new();
    for (k, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "g".to_string(),
            _ => format!("g^{k}"),
        };
        parts.push(match (c, k) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}*{mono}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut r, mut m) = (q, 0);
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

/// Remainder of `a` modulo the monic `modulus` over `F_p`.
fn poly_rem(a: &[u32], modulus: &[u32], p: u32, m: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let deg_m = modulus.len() - 1;
    while r.len() > deg_m {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - deg_m;
        if lead != 0 {
            for (k, &c) in modulus.iter().enumerate() {
                let sub = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + k] = (r[shift + k] + p - sub) % p;
            }
        }
        r.pop();
    }
    r.resize(m as usize, 0);
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32, m: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    poly_rem(&prod, modulus, p, m)
}

/// Exhaustive check that no monic polynomial of degree `1..=deg/2` divides.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    for k in 1..=deg / 2 {
        let count = (p as u64).pow(k as u32);
        for idx in 0..count {
            let mut divisor = decode(idx as u32, p, k as u32);
            divisor.push(1);
            if poly_rem(modulus, &divisor, p, k as u32).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn build_log_tables(p: u32, m: u32, q: u32, modulus: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let order = q - 1;
    let mut factors = Vec::new();
    let mut r = order;
    let mut d = 2;
    while d * d <= r {
        if r.is_multiple_of(d) {
            factors.push(d);
            while r.is_multiple_of(d) {
                r /= d;
            }
        }
        d += 1;
    }
    if r > 1 {
        factors.push(r);
    }
    let pow = |base: &[u32], mut e: u32| {
        let mut acc = vec![0u32; m as usize];
        acc[0] = 1;
        let mut b = base.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &b, modulus, p, m);
            }
            b = poly_mulmod(&b, &b, modulus, p, m);
            e >>= 1;
        }
        acc
    };
    let one = encode(&{
        let mut v = vec![0u32; m as usize];
        v[0] = 1;
        v
    }, p);
    let primitive = (2..q)
        .map(|i| decode(i, p, m))
        .find(|cand| factors.iter().all(|&l| encode(&pow(cand, order / l), p) != one))
        .expect("multiplicative group of a finite field is cyclic");
    let mut exp = vec![0u32; order as usize];
    let mut log = vec![0u32; q as usize];
    let mut cur = vec![0u32; m as usize];
    cur[0] = 1;
    for k in 0..order {
        let idx = encode(&cur, p);
        exp[k as usize] = idx;
        log[idx as usize] = k;
        cur = poly_mulmod(&cur, &primitive, modulus, p, m);
    }
    (exp, log)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::Rational(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn rational_sum() {
        let k = Field::rationals();
        assert_eq!(k.arith(ArithOp::Add, &q(1, 2), &q(1, 3)).unwrap(), q(5, 6));
    }

    #[test]
    fn char_two_sum() {
        let k = Field::prime(2).unwrap();
        assert_eq!(k.add(&k.one(), &k.one()), k.zero());
    }

    #[test]
    fn f4_generator_squared() {
        let k = Field::parse("F4[g^2+g+1]").unwrap();
        let g = k.generator().unwrap();
        let gg = k.mul(&g, &g);
        assert_eq!(k.format(&gg), "g+1");
        assert_eq!(gg, k.add(&g, &k.one()));
    }

    #[test]
    fn pth_roots_match_examples() {
        let f2 = Field::prime(2).unwrap();
        assert_eq!(f2.pth_root(&f2.one()).unwrap(), f2.one());
        let f4 = Field::of_order(4).unwrap();
        let g = f4.generator().unwrap();
        let s = f4.pth_root(&g).unwrap();
        assert_eq!(s, f4.add(&g, &f4.one()));
        assert_eq!(f4.mul(&s, &s), g);
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.pth_root(&f7.from_int(3)).unwrap(), f7.from_int(3));
    }

    #[test]
    fn pth_root_refused_over_q() {
        let k = Field::rationals();
        assert!(matches!(k.pth_root(&k.one()), Err(ScalarError::NotSupported(_))));
    }

    #[test]
    fn division_errors() {
        let k = Field::prime(5).unwrap();
        assert_eq!(k.arith(ArithOp::Div, &k.one(), &k.zero()), Err(ScalarError::DivisionByZero));
        assert!(matches!(
            k.arith(ArithOp::Add, &k.one(), &Scalar::Finite(9)),
            Err(ScalarError::FieldMismatch(_))
        ));
        assert!(matches!(
            k.arith(ArithOp::Add, &k.one(), &q(1, 2)),
            Err(ScalarError::FieldMismatch(_))
        ));
    }

    #[test]
    fn field_syntax() {
        assert_eq!(Field::parse("Q").unwrap(), Field::rationals());
        assert_eq!(Field::parse("F7").unwrap().characteristic(), 7);
        assert_eq!(Field::parse("F9").unwrap().degree(), 2);
        assert!(Field::parse("F6").is_err());
        assert!(Field::parse("F4[g^2+1]").is_err(), "g^2+1 = (g+1)^2 over F2");
        assert!(Field::parse("F8[g^2+g+1]").is_err(), "wrong degree");
        let f = Field::parse("F8[g^3+g^2+1]").unwrap();
        assert_eq!(f.to_string(), "F8[g^3+g^2+1]");
    }

    #[test]
    fn builtin_moduli_are_irreducible() {
        for q in [4, 8, 9, 25, 27] {
            let k = Field::of_order(q).unwrap();
            assert_eq!(k.order(), Some(q));
        }
    }

    #[test]
    fn exhaustive_field_axioms_small_fields() {
        for k in [Field::prime(5).unwrap(), Field::of_order(4).unwrap(), Field::of_order(9).unwrap()] {
            let els: Vec<_> = k.elements().collect();
            for a in &els {
                assert_eq!(k.add(a, &k.neg(a)), k.zero());
                if !k.is_zero(a) {
                    assert_eq!(k.mul(a, &k.inv(a).unwrap()), k.one());
                }
                let p = k.characteristic() as u64;
                let s = k.pth_root(a).unwrap();
                assert_eq!(k.pow(&s, p), *a);
                for b in &els {
                    assert_eq!(k.mul(a, b), k.mul(b, a));
                    let r = k.pth_root(b).unwrap();
                    assert_eq!(k.pth_root(&k.add(a, b)).unwrap(), k.add(&s, &r));
                    assert_eq!(k.pth_root(&k.mul(a, b)).unwrap(), k.mul(&s, &r));
                    for c in &els {
                        assert_eq!(k.mul(a, &k.add(b, c)), k.add(&k.mul(a, b), &k.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn format_parse_round_trip() {
        let k = Field::of_order(27).unwrap();
        for a in k.elements() {
            assert_eq!(k.parse_scalar(&k.format(&a)).unwrap(), a);
        }
        let q_ = Field::rationals();
        for s in [q(-7, 3), q(0, 1), q(12, 1)] {
            assert_eq!(q_.parse_scalar(&q_.format(&s)).unwrap(), s);
        }
    }
}
