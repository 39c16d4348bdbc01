//! The truncated polynomial ring `k[x_1..x_N]/(x)^{beta+1}`.
//!
//! Coordinates are the monomials of total degree `<= beta` in graded
//! lexicographic order: by degree, then lexicographically with `x_1` largest
//! (`1, x, y, z, x^2, xy, xz, y^2, ...`). Every [`Subspace`] of the ring uses
//! these coordinates.
//!
//! A [`TruncPoly`] also remembers whether it is *exact*, i.e. whether it is
//! known to be an honest polynomial rather than the truncation of something
//! larger. Operations that may have discarded terms of degree `> beta` clear
//! the flag; [`PolySystem::taylor_shift`] refuses inexact input.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{Matrix, Subspace};
use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TruncError {
    #[error("ring mismatch: {0}")]
    SpecMismatch(String),
    #[error("substitution has a nonzero constant term in component {0}")]
    ConstantTermNotAllowed(usize),
    #[error("taylor shift needs exact polynomials of degree <= beta")]
    TruncationUnsafe,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("variable index {0} out of range")]
    VariableOutOfRange(usize),
    #[error("point has {got} coordinates, ring has {expected} variables")]
    PointDimension { expected: usize, got: usize },
    #[error("invalid ring: {0}")]
    InvalidRing(String),
}

const MUL_TABLE_LIMIT: usize = 512;

struct RingSpec {
    nvars: usize,
    beta: usize,
    field: Field,
    names: Vec<String>,
    monomials: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    /// degree_start[d] = index of the first monomial of degree d; one extra
    /// entry at the end.
    degree_start: Vec<usize>,
    mul_table: Option<Vec<u32>>,
}

/// Handle to `O_{N,beta}` over a field; cheap to clone.
#[derive(Clone)]
pub struct Ring(Arc<RingSpec>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.nvars == other.0.nvars && self.0.beta == other.0.beta && self.0.field == other.0.field)
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring(N={}, beta={}, {})", self.0.nvars, self.0.beta, self.0.field)
    }
}

/// Default variable names: `x, y, z, w` for up to four variables, else
/// `x1..xN`.
pub fn default_names(nvars: usize) -> Vec<String> {
    if nvars <= 4 {
        ["x", "y", "z", "w"][..nvars].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=nvars).map(|i| format!("x{i}")).collect()
    }
}

fn monomials_of_degree(nvars: usize, d: u32, out: &mut Vec<Vec<u32>>) {
    fn rec(prefix: &mut Vec<u32>, left: usize, d: u32, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(prefix, left - 1, d - e, out);
            prefix.pop();
        }
    }
    rec(&mut Vec::with_capacity(nvars), nvars, d, out);
}

impl Ring {
    pub fn new(nvars: usize, beta: usize, field: &Field) -> Result<Self, TruncError> {
        Self::with_names(default_names(nvars), beta, field)
    }

    pub fn with_names(names: Vec<String>, beta: usize, field: &Field) -> Result<Self, TruncError> {
        let nvars = names.len();
        if nvars == 0 {
            return Err(TruncError::InvalidRing("need at least one variable".into()));
        }
        let mut monomials = Vec::new();
        let mut degree_start = Vec::with_capacity(beta + 2);
        for d in 0..=beta {
            degree_start.push(monomials.len());
            monomials_of_degree(nvars, d as u32, &mut monomials);
        }
        degree_start.push(monomials.len());
        let index: HashMap<Vec<u32>, usize> =
            monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let dim = monomials.len();
        let mul_table = (dim <= MUL_TABLE_LIMIT).then(|| {
            let mut t = vec![u32::MAX; dim * dim];
            let mut buf = vec![0u32; nvars];
            for i in 0..dim {
                for j in 0..dim {
                    for (k, b) in buf.iter_mut().enumerate() {
                        *b = monomials[i][k] + monomials[j][k];
                    }
                    if let Some(&idx) = index.get(&buf) {
                        t[i * dim + j] = idx as u32;
                    }
                }
            }
            t
        });
        Ok(Ring(Arc::new(RingSpec {
            nvars,
            beta,
            field: field.clone(),
            names,
            monomials,
            index,
            degree_start,
            mul_table,
        })))
    }

    /// Same variables and field at a different truncation order.
    pub fn with_beta(&self, beta: usize) -> Ring {
        if beta == self.beta() {
            return self.clone();
        }
        Ring::with_names(self.0.names.clone(), beta, &self.0.field).expect("valid ring")
    }

    pub fn nvars(&self) -> usize {
        self.0.nvars
    }

    pub fn beta(&self) -> usize {
        self.0.beta
    }

    pub fn field(&self) -> &Field {
        &self.0.field
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    /// Number of monomials, `binom(N + beta, N)`.
    pub fn dim(&self) -> usize {
        self.0.monomials.len()
    }

    pub fn monomial(&self, i: usize) -> &[u32] {
        &self.0.monomials[i]
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.0.monomials
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.0.index.get(exps).copied()
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.0.monomials[i].iter().sum::<u32>() as usize
    }

    /// Indices of the monomials of total degree `d`.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        if d > self.beta() {
            return self.dim()..self.dim();
        }
        self.0.degree_start[d]..self.0.degree_start[d + 1]
    }

    /// Index of the product of monomials `i` and `j`, if it survives.
    pub fn mul_index(&self, i: usize, j: usize) -> Option<usize> {
        match &self.0.mul_table {
            Some(t) => {
                let v = t[i * self.dim() + j];
                (v != u32::MAX).then_some(v as usize)
            }
            None => {
                let e: Vec<u32> = self.monomial(i).iter().zip(self.monomial(j)).map(|(a, b)| a + b).collect();
                self.index_of(&e)
            }
        }
    }

    pub fn format_monomial(&self, i: usize) -> String {
        let parts: Vec<String> = self
            .monomial(i)
            .iter()
            .zip(self.names())
            .filter(|(e, _)| **e > 0)
            .map(|(&e, name)| if e == 1 { name.clone() } else { format!("{name}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    fn check_same(&self, other: &Ring) -> Result<(), TruncError> {
        if self != other {
            return Err(TruncError::SpecMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Element of `O_{N,beta}` stored densely over the monomial basis.
#[derive(Clone)]
pub struct TruncPoly {
    ring: Ring,
    coeffs: Vec<Scalar>,
    exact: bool,
}

impl PartialEq for TruncPoly {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.coeffs == other.coeffs
    }
}

impl Eq for TruncPoly {}

impl fmt::Debug for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.ring.field();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            let negative = k.is_negative(c);
            let abs = if negative { k.neg(c) } else { c.clone() };
            let sign = match (first, negative) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let mono = self.ring.format_monomial(i);
            let coeff = k.format(&abs);
            let coeff = if k.is_atomic(&abs) { coeff } else { format!("({coeff})") };
            let term = match (mono.as_str(), k.is_one(&abs)) {
                ("1", _) => coeff,
                (_, true) => mono,
                _ => format!("{coeff}*{mono}"),
            };
            write!(f, "{sign}{term}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl TruncPoly {
    pub fn zero(ring: &Ring) -> Self {
        TruncPoly { ring: ring.clone(), coeffs: vec![ring.field().zero(); ring.dim()], exact: true }
    }

    pub fn constant(ring: &Ring, c: Scalar) -> Self {
        let mut p = Self::zero(ring);
        p.coeffs[0] = c;
        p
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, ring.field().one())
    }

    /// The coordinate function `x_j` (0-based). Zero when beta = 0.
    pub fn var(ring: &Ring, j: usize) -> Self {
        let mut e = vec![0u32; ring.nvars()];
        e[j] = 1;
        Self::monomial(ring, &e, ring.field().one())
    }

    /// `c * x^exps`; vanishes (and is marked inexact) beyond beta.
    pub fn monomial(ring: &Ring, exps: &[u32], c: Scalar) -> Self {
        let mut p = Self::zero(ring);
        match ring.index_of(exps) {
            Some(i) => p.coeffs[i] = c,
            None => p.exact = ring.field().is_zero(&c),
        }
        p
    }

    /// Builds from a dense coefficient vector in monomial-basis order.
    pub fn from_coeffs(ring: &Ring, coeffs: Vec<Scalar>) -> Self {
        assert_eq!(coeffs.len(), ring.dim());
        TruncPoly { ring: ring.clone(), coeffs, exact: true }
    }

    pub(crate) fn with_exact(mut self, exact: bool) -> Self {
        self.exact = exact;
        self
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> &Field {
        self.ring.field()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Scalar {
        &self.coeffs[i]
    }

    pub fn coeff_of(&self, exps: &[u32]) -> Scalar {
        self.ring
            .index_of(exps)
            .map(|i| self.coeffs[i].clone())
            .unwrap_or_else(|| self.field().zero())
    }

    pub fn set_coeff(&mut self, i: usize, c: Scalar) {
        self.coeffs[i] = c;
    }

    /// Nonzero terms as `(exponent vector, coefficient)` in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Scalar)> + '_ {
        let k = self.field();
        self.coeffs
            .iter()
            .enumerate()
            .filter(move |(_, c)| !k.is_zero(c))
            .map(move |(i, c)| (self.ring.monomial(i), c))
    }

    fn nonzero(&self) -> impl Iterator<Item = (usize, &Scalar)> + '_ {
        let k = self.field();
        self.coeffs.iter().enumerate().filter(move |(_, c)| !k.is_zero(c))
    }

    /// True when no information above degree beta is known to be missing.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn is_zero(&self) -> bool {
        let k = self.field();
        self.coeffs.iter().all(|c| k.is_zero(c))
    }

    pub fn constant_term(&self) -> &Scalar {
        &self.coeffs[0]
    }

    /// Lowest degree of a nonzero term.
    pub fn order(&self) -> Option<usize> {
        self.nonzero().next().map(|(i, _)| self.ring.degree_of(i))
    }

    /// Highest degree of a nonzero term.
    pub fn degree(&self) -> Option<usize> {
        let k = self.field();
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .find(|(_, c)| !k.is_zero(c))
            .map(|(i, _)| self.ring.degree_of(i))
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: usize) -> TruncPoly {
        let mut out = TruncPoly::zero(&self.ring);
        for i in self.ring.degree_range(d) {
            out.coeffs[i] = self.coeffs[i].clone();
        }
        out
    }

    /// Drops all terms of degree `> d` (stays in the same ring).
    pub fn truncate(&self, d: usize) -> TruncPoly {
        let mut out = self.clone();
        let cut = if d >= self.ring.beta() { self.ring.dim() } else { self.ring.degree_range(d + 1).start };
        let k = self.field();
        let dropped = out.coeffs[cut..].iter().any(|c| !k.is_zero(c));
        for c in out.coeffs[cut..].iter_mut() {
            *c = k.zero();
        }
        out.exact = self.exact && !dropped;
        out
    }

    /// Moves to a ring with the same variables and field but another beta.
    pub fn change_ring(&self, ring: &Ring) -> Result<TruncPoly, TruncError> {
        if ring.nvars() != self.ring.nvars() || ring.field() != self.field() {
            return Err(TruncError::SpecMismatch(format!("{:?} vs {:?}", self.ring, ring)));
        }
        let mut out = TruncPoly::zero(ring);
        let mut exact = self.exact || ring.beta() < self.ring.beta();
        for (i, c) in self.nonzero() {
            match ring.index_of(self.ring.monomial(i)) {
                Some(j) => out.coeffs[j] = c.clone(),
                None => exact = false,
            }
        }
        // lifting an inexact element cannot recover the lost terms
        if ring.beta() > self.ring.beta() && !self.exact {
            exact = false;
        }
        out.exact = exact;
        Ok(out)
    }

    pub fn checked_add(&self, other: &TruncPoly) -> Result<TruncPoly, TruncError> {
        self.ring.check_same(&other.ring)?;
        let k = self.field();
        Ok(TruncPoly {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| k.add(a, b)).collect(),
            exact: self.exact && other.exact,
        })
    }

    pub fn checked_sub(&self, other: &TruncPoly) -> Result<TruncPoly, TruncError> {
        self.ring.check_same(&other.ring)?;
        let k = self.field();
        Ok(TruncPoly {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| k.sub(a, b)).collect(),
            exact: self.exact && other.exact,
        })
    }

    pub fn checked_mul(&self, other: &TruncPoly) -> Result<TruncPoly, TruncError> {
        self.ring.check_same(&other.ring)?;
        let k = self.field();
        let mut coeffs = vec![k.zero(); self.ring.dim()];
        let rhs: Vec<(usize, &Scalar)> = other.nonzero().collect();
        for (i, a) in self.nonzero() {
            for &(j, b) in &rhs {
                if let Some(idx) = self.ring.mul_index(i, j) {
                    coeffs[idx] = k.add(&coeffs[idx], &k.mul(a, b));
                }
            }
        }
        let overflow = match (self.degree(), other.degree()) {
            (Some(a), Some(b)) => a + b > self.ring.beta(),
            _ => false,
        };
        let both_zero_safe = self.is_zero() || other.is_zero();
        Ok(TruncPoly {
            ring: self.ring.clone(),
            coeffs,
            exact: both_zero_safe || (self.exact && other.exact && !overflow),
        })
    }

    pub fn neg(&self) -> TruncPoly {
        let k = self.field();
        TruncPoly {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|a| k.neg(a)).collect(),
            exact: self.exact,
        }
    }

    pub fn scale(&self, c: &Scalar) -> TruncPoly {
        let k = self.field();
        TruncPoly {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|a| k.mul(a, c)).collect(),
            exact: self.exact || k.is_zero(c),
        }
    }

    /// Formal partial derivative in variable `j` (0-based).
    pub fn derivative(&self, j: usize) -> Result<TruncPoly, TruncError> {
        if j >= self.ring.nvars() {
            return Err(TruncError::VariableOutOfRange(j));
        }
        let k = self.field();
        let mut out = TruncPoly::zero(&self.ring);
        let mut e = vec![0u32; self.ring.nvars()];
        for (i, c) in self.nonzero() {
            let m = self.ring.monomial(i);
            if m[j] == 0 {
                continue;
            }
            e.copy_from_slice(m);
            e[j] -= 1;
            let idx = self.ring.index_of(&e).expect("lower degree monomial exists");
            out.coeffs[idx] = k.mul(c, &k.from_int(m[j] as i64));
        }
        out.exact = self.exact;
        Ok(out)
    }

    /// `f(phi_1, .., phi_N)`; every `phi_i` must vanish at the origin.
    pub fn compose(&self, phi: &[TruncPoly]) -> Result<TruncPoly, TruncError> {
        for (i, p) in phi.iter().enumerate() {
            if !p.field().is_zero(p.constant_term()) {
                return Err(TruncError::ConstantTermNotAllowed(i));
            }
        }
        self.compose_allow_constant(phi)
    }

    /// `f(phi_1, .., phi_N)` without the constant-term check; correct when
    /// `f` is an honest polynomial of degree `<= beta`.
    pub fn compose_allow_constant(&self, phi: &[TruncPoly]) -> Result<TruncPoly, TruncError> {
        if phi.len() != self.ring.nvars() {
            return Err(TruncError::SpecMismatch(format!(
                "substitution has {} components for {} variables",
                phi.len(),
                self.ring.nvars()
            )));
        }
        let ring = phi.first().map(|p| p.ring.clone()).unwrap_or_else(|| self.ring.clone());
        for p in phi {
            ring.check_same(&p.ring)?;
        }
        if ring.field() != self.field() {
            return Err(TruncError::SpecMismatch("different fields".into()));
        }
        let max_exp: Vec<u32> = (0..self.ring.nvars())
            .map(|j| self.nonzero().map(|(i, _)| self.ring.monomial(i)[j]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<TruncPoly>> = phi
            .iter()
            .zip(&max_exp)
            .map(|(p, &e)| {
                let mut v = vec![TruncPoly::one(&ring)];
                for _ in 0..e {
                    let next = v.last().unwrap().checked_mul(p).expect("same ring");
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = TruncPoly::zero(&ring);
        for (i, c) in self.nonzero() {
            let m = self.ring.monomial(i);
            let mut term = TruncPoly::constant(&ring, c.clone());
            for (j, &e) in m.iter().enumerate() {
                if e > 0 {
                    term = term.checked_mul(&powers[j][e as usize])?;
                }
            }
            out = out.checked_add(&term)?;
        }
        let phi_deg = phi.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
        let fits = self.degree().is_none_or(|d| d * phi_deg <= ring.beta());
        out.exact = self.exact && phi.iter().all(|p| p.exact) && fits;
        Ok(out)
    }

    /// Value at a point of `k^N` (meaningful for exact polynomials).
    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar, TruncError> {
        if point.len() != self.ring.nvars() {
            return Err(TruncError::PointDimension { expected: self.ring.nvars(), got: point.len() });
        }
        let k = self.field();
        let mut acc = k.zero();
        for (i, c) in self.nonzero() {
            let mut t = c.clone();
            for (a, &e) in point.iter().zip(self.ring.monomial(i)) {
                if e > 0 {
                    t = k.mul(&t, &k.pow(a, e as u64));
                }
            }
            acc = k.add(&acc, &t);
        }
        Ok(acc)
    }

    pub fn is_unit(&self) -> bool {
        !self.field().is_zero(self.constant_term())
    }

    /// Multiplicative inverse via the geometric series.
    pub fn inverse(&self) -> Result<TruncPoly, TruncError> {
        let k = self.field();
        let c = k.inv(self.constant_term()).map_err(|_| TruncError::NotAUnit)?;
        // self = c0 (1 + u) with u in the maximal ideal
        let normalised = self.scale(&c);
        let mut u = normalised.clone();
        u.coeffs[0] = k.zero();
        let minus_u = u.neg();
        let mut acc = TruncPoly::one(&self.ring);
        let mut power = TruncPoly::one(&self.ring);
        for _ in 0..self.ring.beta() {
            power = power.checked_mul(&minus_u)?;
            if power.is_zero() {
                break;
            }
            acc = acc.checked_add(&power)?;
        }
        let mut out = acc.scale(&c);
        out.exact = false;
        Ok(out)
    }

    /// `true`: some variable other than those listed occurs.
    pub fn uses_variable(&self, j: usize) -> bool {
        self.nonzero().any(|(i, _)| self.ring.monomial(i)[j] > 0)
    }
}

impl std::ops::Add for &TruncPoly {
    type Output = TruncPoly;
    fn add(self, rhs: &TruncPoly) -> TruncPoly {
        self.checked_add(rhs).expect("ring mismatch")
    }
}

impl std::ops::Sub for &TruncPoly {
    type Output = TruncPoly;
    fn sub(self, rhs: &TruncPoly) -> TruncPoly {
        self.checked_sub(rhs).expect("ring mismatch")
    }
}

impl std::ops::Mul for &TruncPoly {
    type Output = TruncPoly;
    fn mul(self, rhs: &TruncPoly) -> TruncPoly {
        self.checked_mul(rhs).expect("ring mismatch")
    }
}

impl std::ops::Neg for &TruncPoly {
    type Output = TruncPoly;
    fn neg(self) -> TruncPoly {
        TruncPoly::neg(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

/// Checked binary ring arithmetic.
pub fn ring_arith(a: &TruncPoly, b: &TruncPoly, op: RingOp) -> Result<TruncPoly, TruncError> {
    match op {
        RingOp::Add => a.checked_add(b),
        RingOp::Sub => a.checked_sub(b),
        RingOp::Mul => a.checked_mul(b),
    }
}

/// Which multiples enter [`PolySystem::ideal_span`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanWeights {
    /// All `x^a f_i`.
    Plain,
    /// Only `x^a f_i` with `|a| >= 1`.
    MaximalIdeal,
}

/// A tuple `f = (f_1, .., f_n)` over one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySystem {
    ring: Ring,
    polys: Vec<TruncPoly>,
}

impl PolySystem {
    pub fn new(ring: &Ring, polys: Vec<TruncPoly>) -> Result<Self, TruncError> {
        for p in &polys {
            ring.check_same(&p.ring)?;
        }
        Ok(PolySystem { ring: ring.clone(), polys })
    }

    pub fn single(f: TruncPoly) -> Self {
        PolySystem { ring: f.ring.clone(), polys: vec![f] }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> &Field {
        self.ring.field()
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> &[TruncPoly] {
        &self.polys
    }

    pub fn get(&self, i: usize) -> &TruncPoly {
        &self.polys[i]
    }

    pub fn into_polys(self) -> Vec<TruncPoly> {
        self.polys
    }

    pub fn is_exact(&self) -> bool {
        self.polys.iter().all(|p| p.is_exact())
    }

    /// Largest total degree among the entries.
    pub fn total_degree(&self) -> usize {
        self.polys.iter().filter_map(|p| p.degree()).max().unwrap_or(0)
    }

    pub fn orders(&self) -> Vec<Option<usize>> {
        self.polys.iter().map(|p| p.order()).collect()
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<Vec<Scalar>, TruncError> {
        self.polys.iter().map(|p| p.eval(point)).collect()
    }

    pub fn vanishes_at(&self, point: &[Scalar]) -> Result<bool, TruncError> {
        let k = self.field();
        Ok(self.eval(point)?.iter().all(|v| k.is_zero(v)))
    }

    /// Each entry composed with `phi` (constant terms refused).
    pub fn compose(&self, phi: &[TruncPoly]) -> Result<PolySystem, TruncError> {
        let polys = self.polys.iter().map(|p| p.compose(phi)).collect::<Result<Vec<_>, _>>()?;
        Ok(PolySystem { ring: phi.first().map(|p| p.ring.clone()).unwrap_or(self.ring.clone()), polys })
    }

    /// `f(x + a)`, the recentred system at `a`.
    pub fn taylor_shift(&self, a: &[Scalar]) -> Result<PolySystem, TruncError> {
        if a.len() != self.ring.nvars() {
            return Err(TruncError::PointDimension { expected: self.ring.nvars(), got: a.len() });
        }
        if !self.is_exact() {
            return Err(TruncError::TruncationUnsafe);
        }
        let phi: Vec<TruncPoly> = a
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let mut v = TruncPoly::var(&self.ring, j);
                v.coeffs[0] = c.clone();
                v
            })
            .collect();
        let polys = self
            .polys
            .iter()
            .map(|p| p.compose_allow_constant(&phi))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolySystem { ring: self.ring.clone(), polys })
    }

    /// Jacobian matrix `(df_i/dx_j)(a)`.
    pub fn jacobian_at(&self, a: &[Scalar]) -> Result<Matrix, TruncError> {
        let k = self.field();
        let mut m = Matrix::zeros(k, self.len(), self.ring.nvars());
        for (i, p) in self.polys.iter().enumerate() {
            for j in 0..self.ring.nvars() {
                m.set(i, j, p.derivative(j)?.eval(a)?);
            }
        }
        Ok(m)
    }

    /// The k-span of the multiples `x^a f_i`, in monomial coordinates.
    pub fn ideal_span(&self, weights: SpanWeights) -> Subspace {
        let ring = &self.ring;
        let k = ring.field();
        let min_deg = match weights {
            SpanWeights::Plain => 0,
            SpanWeights::MaximalIdeal => 1,
        };
        let mut rows = Vec::new();
        for f in &self.polys {
            let Some(ord) = f.order() else { continue };
            for d in min_deg..=ring.beta().saturating_sub(ord) {
                for m in ring.degree_range(d) {
                    let mut row = vec![k.zero(); ring.dim()];
                    for (i, c) in f.nonzero() {
                        if let Some(idx) = ring.mul_index(i, m) {
                            row[idx] = c.clone();
                        }
                    }
                    rows.push(row);
                }
            }
        }
        Subspace::from_vectors(k, ring.dim(), rows).expect("rows have ring dimension")
    }
}

impl fmt::Display for PolySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.polys.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}
