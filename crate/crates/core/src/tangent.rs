//! Orbit tangent spaces of the contact action, fingerprints, and the
//! j-invariant of a binary quartic tangent cone.
//!
//! Vectors of `O^n` use component-major coordinates: entry `i * dim + m` is
//! the coefficient of monomial `m` in component `i`, where `dim` is the
//! dimension of the ring.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Subspace;
use crate::scalar::{Field, Scalar};
use crate::trunc::{PolySystem, Ring, SpanWeights, TruncPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TangentError {
    #[error("input is zero")]
    ZeroInput,
    #[error("not a binary quartic: {0}")]
    NotBinaryQuartic(String),
    #[error("the quartic has a repeated root")]
    RepeatedRoots,
    #[error("the quartic does not split into linear factors over {0}")]
    RootsNotInField(String),
}

/// Multiplies `f` by the monomial with index `m` (truncating).
fn shift_by_monomial(ring: &Ring, f: &TruncPoly, m: usize) -> Vec<Scalar> {
    let mut out = vec![ring.field().zero(); ring.dim()];
    for (i, c) in f.coeffs().iter().enumerate() {
        if ring.field().is_zero(c) {
            continue;
        }
        if let Some(idx) = ring.mul_index(i, m) {
            out[idx] = c.clone();
        }
    }
    out
}

/// Spanning vectors of `T_f`: `x^a f_j e_i` for all `a`, and
/// `x^a (df/dx_j)` for `|a| >= 1`.
fn tangent_generators(f: &PolySystem) -> Vec<Vec<Scalar>> {
    let ring = f.ring();
    let k = ring.field();
    let dim = ring.dim();
    let n = f.len();
    let mut rows = Vec::new();
    for fj in f.polys() {
        if fj.is_zero() {
            continue;
        }
        for m in 0..dim {
            let block = shift_by_monomial(ring, fj, m);
            if block.iter().all(|c| k.is_zero(c)) {
                continue;
            }
            for i in 0..n {
                let mut v = vec![k.zero(); n * dim];
                v[i * dim..(i + 1) * dim].clone_from_slice(&block);
                rows.push(v);
            }
        }
    }
    for var in 0..ring.nvars() {
        let partials: Vec<TruncPoly> = f.polys().iter().map(|p| p.derivative(var).expect("variable in range")).collect();
        if partials.iter().all(|p| p.is_zero()) {
            continue;
        }
        for m in 1..dim {
            let mut v = Vec::with_capacity(n * dim);
            for p in &partials {
                v.extend(shift_by_monomial(ring, p, m));
            }
            if v.iter().any(|c| !k.is_zero(c)) {
                rows.push(v);
            }
        }
    }
    rows
}

/// Image of the tangent space of `K_beta` under the orbit map at `f`.
pub fn orbit_tangent_space(f: &PolySystem) -> Subspace {
    let ambient = f.len() * f.ring().dim();
    Subspace::from_vectors(f.field(), ambient, tangent_generators(f)).expect("generator length")
}

/// Monomials (as coefficient vectors of `O^n`) spanning a complement of `T_f`.
pub fn tangent_complement(f: &PolySystem) -> Vec<(usize, usize)> {
    let dim = f.ring().dim();
    orbit_tangent_space(f)
        .complement_coordinates()
        .into_iter()
        .map(|c| (c / dim, c % dim))
        .collect()
}

/// Contact invariants of a jet: orders and the Hilbert function of
/// `O^n / T_f` with respect to the order filtration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub field: String,
    pub characteristic: u32,
    pub beta: usize,
    /// Orders of a minimal generating set of the ideal `(f)`, ascending,
    /// padded with `None` up to the number of equations.
    pub orders: Vec<Option<usize>>,
    /// `hilbert[d] = dim O^n / (T_f + m^{d+1} O^n)`; non-decreasing.
    pub hilbert: Vec<usize>,
    /// `dim O^n / T_f`, equal to the last Hilbert entry.
    pub codim: usize,
}

pub fn fingerprint(f: &PolySystem) -> Fingerprint {
    let ring = f.ring();
    let dim = ring.dim();
    let n = f.len();
    let beta = ring.beta();
    // reorder coordinates by (degree, component, monomial); then the pivots of
    // degree <= d count the rank of T_f modulo m^{d+1}
    let mut order = Vec::with_capacity(n * dim);
    for d in 0..=beta {
        for i in 0..n {
            for m in ring.degree_range(d) {
                order.push(i * dim + m);
            }
        }
    }
    let rows: Vec<Vec<Scalar>> = tangent_generators(f)
        .into_iter()
        .map(|v| order.iter().map(|&c| v[c].clone()).collect())
        .collect();
    let space = Subspace::from_vectors(f.field(), n * dim, rows).expect("generator length");
    let mut pivot_count = vec![0usize; beta + 1];
    for &p in space.pivots() {
        pivot_count[ring.degree_of(order[p] % dim)] += 1;
    }
    let mut hilbert = Vec::with_capacity(beta + 1);
    let (mut coords, mut pivots) = (0usize, 0usize);
    for d in 0..=beta {
        coords += n * ring.degree_range(d).len();
        pivots += pivot_count[d];
        hilbert.push(coords - pivots);
    }
    Fingerprint {
        field: ring.field().to_string(),
        characteristic: ring.field().characteristic(),
        beta,
        orders: generator_orders(f),
        codim: *hilbert.last().expect("beta >= 0"),
        hilbert,
    }
}

/// Orders of minimal generators of `I = (f)`: the graded dimensions of
/// `I / mI` under the order filtration. Monomial indices are graded, so the
/// pivot of an echelon row is its order.
pub fn generator_orders(f: &PolySystem) -> Vec<Option<usize>> {
    let ring = f.ring();
    let graded = |span: Subspace| {
        let mut count = vec![0isize; ring.beta() + 1];
        for &p in span.pivots() {
            count[ring.degree_of(p)] += 1;
        }
        count
    };
    let ideal = graded(f.ideal_span(SpanWeights::Plain));
    let square = graded(f.ideal_span(SpanWeights::MaximalIdeal));
    let mut orders = Vec::with_capacity(f.len());
    for (d, (a, b)) in ideal.iter().zip(&square).enumerate() {
        for _ in 0..a - b {
            orders.push(Some(d));
        }
    }
    orders.resize(f.len(), None);
    orders
}

/// Lowest-degree homogeneous part of `f`.
pub fn tangent_cone(f: &TruncPoly) -> Result<TruncPoly, TangentError> {
    let d = f.order().ok_or(TangentError::ZeroInput)?;
    Ok(f.homogeneous_part(d))
}

const DIVISOR_SEARCH_LIMIT: u64 = 1_000_000_000_000;

/// Dense univariate polynomial, coefficients from degree 0 upwards.
type Univariate = Vec<Scalar>;

fn trim(k: &Field, mut p: Univariate) -> Univariate {
    while p.last().is_some_and(|c| k.is_zero(c)) {
        p.pop();
    }
    p
}

fn derivative(k: &Field, p: &Univariate) -> Univariate {
    trim(k, p.iter().enumerate().skip(1).map(|(i, c)| k.mul(c, &k.from_int(i as i64))).collect())
}

fn rem(k: &Field, a: &Univariate, b: &Univariate) -> Univariate {
    let mut r = a.clone();
    let lead_inv = k.inv(b.last().expect("nonzero divisor")).expect("nonzero lead");
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = k.mul(r.last().expect("nonempty"), &lead_inv);
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = k.sub(&r[shift + i], &k.mul(&c, bc));
        }
        r = trim(k, r);
    }
    r
}

fn gcd(k: &Field, a: &Univariate, b: &Univariate) -> Univariate {
    let (mut a, mut b) = (trim(k, a.clone()), trim(k, b.clone()));
    while !b.is_empty() {
        let r = rem(k, &a, &b);
        a = b;
        b = r;
    }
    a
}

fn eval(k: &Field, p: &Univariate, t: &Scalar) -> Scalar {
    p.iter().rev().fold(k.zero(), |acc, c| k.add(&k.mul(&acc, t), c))
}

/// Rational candidates `+-a/b` with `a | c_0` and `b | c_n` after clearing
/// denominators; `p` must have a nonzero constant term. Coefficients above
/// `DIVISOR_SEARCH_LIMIT` yield no candidates.
fn rational_root_candidates(k: &Field, p: &Univariate) -> Vec<Scalar> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, Signed, ToPrimitive, Zero};
    let rats: Vec<_> = p
        .iter()
        .map(|c| match c {
            Scalar::Rational(r) => r.clone(),
            Scalar::Finite(_) => unreachable!("rational field"),
        })
        .collect();
    let lcm = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = rats.iter().map(|r| (r * num_rational::BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n = n.abs();
        let Some(m) = n.to_u64().filter(|&m| m <= DIVISOR_SEARCH_LIMIT) else { return vec![] };
        let mut out = Vec::new();
        let mut d = 1u64;
        while d * d <= m {
            if m % d == 0 {
                out.push(BigInt::from(d));
                if d * d != m {
                    out.push(BigInt::from(m / d));
                }
            }
            d += 1;
        }
        out
    };
    let c0 = &ints[0];
    let cn = ints.last().expect("nonempty");
    if c0.is_zero() {
        return vec![];
    }
    let mut out = Vec::new();
    for a in divisors(c0) {
        for b in divisors(cn) {
            for s in [1i64, -1] {
                let v = k.from_ratio(&(a.clone() * s), &b).expect("nonzero denominator");
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// The points of the projective line where a binary form of degree `deg`
/// with dehomogenised coefficients `p` vanishes, as `(u, v)` pairs.
fn projective_roots(k: &Field, p: &Univariate, deg: usize) -> Result<Vec<(Scalar, Scalar)>, TangentError> {
    let p = trim(k, p.clone());
    if p.is_empty() {
        return Err(TangentError::ZeroInput);
    }
    let at_infinity = deg - (p.len() - 1);
    if at_infinity >= 2 {
        return Err(TangentError::RepeatedRoots);
    }
    if p.len() > 1 && gcd(k, &p, &derivative(k, &p)).len() > 1 {
        return Err(TangentError::RepeatedRoots);
    }
    let mut roots = Vec::new();
    if at_infinity == 1 {
        roots.push((k.one(), k.zero()));
    }
    let mut finite = Vec::new();
    let mut rest = p.clone();
    if k.is_zero(&rest[0]) {
        finite.push(k.zero());
        rest.remove(0);
    }
    let candidates: Vec<Scalar> = if k.is_finite() { k.elements().collect() } else { rational_root_candidates(k, &rest) };
    for t in candidates {
        if finite.len() == p.len() - 1 {
            break;
        }
        if k.is_zero(&eval(k, &rest, &t)) {
            finite.push(t);
        }
    }
    if finite.len() != p.len() - 1 {
        return Err(TangentError::RootsNotInField(k.to_string()));
    }
    roots.extend(finite.into_iter().map(|t| (t, k.one())));
    Ok(roots)
}

/// `j(l) = 256 (l^2 - l + 1)^3 / (l^2 (l - 1)^2)`.
pub fn j_of_lambda(k: &Field, lambda: &Scalar) -> Scalar {
    let l2 = k.mul(lambda, lambda);
    let num = k.pow(&k.add(&k.sub(&l2, lambda), &k.one()), 3);
    let lm1 = k.sub(lambda, &k.one());
    let den = k.mul(&l2, &k.mul(&lm1, &lm1));
    k.mul(&k.from_int(256), &k.div(&num, &den).expect("distinct points"))
}

/// Cross-ratio of four distinct points of the projective line.
pub fn cross_ratio(k: &Field, pts: &[(Scalar, Scalar); 4]) -> Scalar {
    let bracket = |a: &(Scalar, Scalar), b: &(Scalar, Scalar)| k.sub(&k.mul(&a.0, &b.1), &k.mul(&b.0, &a.1));
    let num = k.mul(&bracket(&pts[0], &pts[2]), &bracket(&pts[1], &pts[3]));
    let den = k.mul(&bracket(&pts[0], &pts[3]), &bracket(&pts[1], &pts[2]));
    k.div(&num, &den).expect("distinct points")
}

/// Roots of a homogeneous quartic in at most two of the ring variables.
pub fn quartic_roots(q: &TruncPoly) -> Result<(Vec<usize>, Vec<(Scalar, Scalar)>), TangentError> {
    let ring = q.ring();
    let k = ring.field();
    if q.is_zero() {
        return Err(TangentError::ZeroInput);
    }
    if q.order() != Some(4) || q.degree() != Some(4) {
        return Err(TangentError::NotBinaryQuartic("not homogeneous of degree 4".into()));
    }
    let used: Vec<usize> = (0..ring.nvars()).filter(|&j| q.uses_variable(j)).collect();
    if used.len() > 2 {
        return Err(TangentError::NotBinaryQuartic(format!("{} variables occur", used.len())));
    }
    if used.len() < 2 {
        return Err(TangentError::RepeatedRoots);
    }
    // dehomogenise at the second variable: p(t) = q(t, 1)
    let u = used[0];
    let mut p = vec![k.zero(); 5];
    for (e, c) in q.terms() {
        p[e[u] as usize] = c.clone();
    }
    let roots = projective_roots(k, &p, 4)?;
    Ok((used, roots))
}

/// Ordering-free j-invariant of the four lines of a binary quartic.
pub fn quartic_j_invariant(q: &TruncPoly) -> Result<Scalar, TangentError> {
    let k = q.field().clone();
    let (_, roots) = quartic_roots(q)?;
    let pts: [(Scalar, Scalar); 4] = roots.try_into().expect("four roots");
    Ok(j_of_lambda(&k, &cross_ratio(&k, &pts)))
}
