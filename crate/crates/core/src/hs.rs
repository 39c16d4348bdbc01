//! Hasse-Schmidt derivations tangent to a system `f`, truncated in `t`.
//!
//! An [`HsDerivation`] of order `r` is the ring map determined by
//! `D(x_j) = x_j + sum_{i=1..r} d_i(x_j) t^i`; it is tangent to `f` at
//! `beta_work` when every `t`-coefficient of `f_l(D(x))` lies in the span of
//! the ideal `(f)` modulo `m^{beta_work+1}`.
//!
//! The search solves one level at a time. The `t^i` coefficient equals
//! `L(d_i) + c_i` where `L(d) = sum_j df/dx_j * d(x_j)` is the same linear
//! map at every level and `c_i` depends only on lower levels. Lower levels
//! are carried symbolically as polynomials in free parameters, so the
//! consistency of each level becomes a polynomial equation in those
//! parameters, and only the parameters that occur in some equation (or in
//! the regularity condition) are enumerated.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::linalg::{Matrix, Subspace};
use crate::scalar::{Field, Scalar};
use crate::trunc::{PolySystem, Ring, SpanWeights, TruncError, TruncPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HsError {
    #[error("exhaustive search needs a finite field")]
    FieldNotFinite,
    #[error("beta_work = {beta_work} exceeds the ring truncation {beta}")]
    BetaTooLarge { beta_work: usize, beta: usize },
    #[error("t-order must be at least 1")]
    ZeroOrder,
    #[error("the system must consist of exact polynomials of degree <= beta")]
    TruncationUnsafe,
    #[error("derivation shape does not match: {0}")]
    Shape(String),
    #[error(transparent)]
    Trunc(#[from] TruncError),
}

/// `D(x_j) = x_j + sum_i levels[i-1][j] t^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HsDerivation {
    ring: Ring,
    levels: Vec<Vec<TruncPoly>>,
}

impl HsDerivation {
    pub fn new(ring: &Ring, levels: Vec<Vec<TruncPoly>>) -> Result<Self, HsError> {
        for level in &levels {
            if level.len() != ring.nvars() {
                return Err(HsError::Shape(format!("level has {} images for {} variables", level.len(), ring.nvars())));
            }
            if level.iter().any(|p| p.ring() != ring) {
                return Err(HsError::Shape("image over another ring".into()));
            }
        }
        Ok(HsDerivation { ring: ring.clone(), levels })
    }

    /// The zero derivation of order `r`.
    pub fn zero(ring: &Ring, r: usize) -> Self {
        HsDerivation { ring: ring.clone(), levels: vec![vec![TruncPoly::zero(ring); ring.nvars()]; r] }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Vec<TruncPoly>] {
        &self.levels
    }

    /// `d_i(x_j)` for `1 <= i <= r`.
    pub fn image(&self, i: usize, j: usize) -> &TruncPoly {
        &self.levels[i - 1][j]
    }

    /// The first `r` levels.
    pub fn prefix(&self, r: usize) -> HsDerivation {
        HsDerivation { ring: self.ring.clone(), levels: self.levels[..r.min(self.levels.len())].to_vec() }
    }

    /// Per level: does some `d_i(x_j)` have a nonzero constant term.
    pub fn regular_levels(&self) -> Vec<bool> {
        let k = self.ring.field();
        self.levels.iter().map(|l| l.iter().any(|p| !k.is_zero(p.constant_term()))).collect()
    }

    /// Regular in the sense that some `d_1(x_j)` is a unit.
    pub fn is_regular(&self) -> bool {
        self.regular_levels().first().copied().unwrap_or(false)
    }
}

/// First failing `t`-coefficient of `f_l(D(x))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub equation: usize,
    pub t_order: usize,
    /// Normal form of the coefficient modulo the ideal span, in the ring of
    /// truncation `beta_work`.
    pub residue: TruncPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HsReport {
    pub passes: bool,
    pub violation: Option<Violation>,
    pub regular_levels: Vec<bool>,
}

fn check_system(f: &PolySystem, beta_work: usize) -> Result<(), HsError> {
    if beta_work > f.ring().beta() {
        return Err(HsError::BetaTooLarge { beta_work, beta: f.ring().beta() });
    }
    if !f.is_exact() {
        return Err(HsError::TruncationUnsafe);
    }
    Ok(())
}

/// Power series in `t` truncated after `t^r`, with coefficients in `O`.
fn series_mul(a: &[TruncPoly], b: &[TruncPoly]) -> Vec<TruncPoly> {
    let r = a.len() - 1;
    let mut out = vec![TruncPoly::zero(a[0].ring()); r + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(r + 1 - i) {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// `t`-coefficients `0..=r` of `f_l(D(x))` for each `l`.
pub fn expand(f: &PolySystem, d: &HsDerivation) -> Vec<Vec<TruncPoly>> {
    let ring = f.ring();
    let r = d.order();
    let xs: Vec<Vec<TruncPoly>> = (0..ring.nvars())
        .map(|j| {
            let mut s = vec![TruncPoly::var(ring, j)];
            s.extend(d.levels.iter().map(|l| l[j].clone()));
            s
        })
        .collect();
    let mut powers: Vec<Vec<Vec<TruncPoly>>> = xs.iter().map(|s| {
        let mut one = vec![TruncPoly::zero(ring); r + 1];
        one[0] = TruncPoly::one(ring);
        vec![one, s.clone()]
    }).collect();
    f.polys()
        .iter()
        .map(|fl| {
            let mut acc = vec![TruncPoly::zero(ring); r + 1];
            for (e, c) in fl.terms() {
                let mut term = vec![TruncPoly::zero(ring); r + 1];
                term[0] = TruncPoly::constant(ring, c.clone());
                for (j, &ej) in e.iter().enumerate() {
                    while powers[j].len() <= ej as usize {
                        let next = series_mul(powers[j].last().unwrap(), &xs[j]);
                        powers[j].push(next);
                    }
                    if ej > 0 {
                        term = series_mul(&term, &powers[j][ej as usize]);
                    }
                }
                for (a, b) in acc.iter_mut().zip(&term) {
                    *a = &*a + b;
                }
            }
            acc
        })
        .collect()
}

/// Checks tangency of `d` to `f` modulo `m^{beta_work+1}`.
pub fn hs_verify(f: &PolySystem, d: &HsDerivation, beta_work: usize) -> Result<HsReport, HsError> {
    check_system(f, beta_work)?;
    if d.ring() != f.ring() {
        return Err(HsError::Shape("derivation over another ring".into()));
    }
    let work = f.ring().with_beta(beta_work);
    let span = lower(f, &work)?.ideal_span(SpanWeights::Plain);
    let coefficients = expand(f, d);
    let mut violation = None;
    'outer: for i in 1..=d.order() {
        for (l, series) in coefficients.iter().enumerate() {
            let c = series[i].change_ring(&work)?;
            let residue = span.reduce(c.coeffs());
            if residue.iter().any(|s| !work.field().is_zero(s)) {
                violation = Some(Violation { equation: l, t_order: i, residue: TruncPoly::from_coeffs(&work, residue) });
                break 'outer;
            }
        }
    }
    Ok(HsReport { passes: violation.is_none(), violation, regular_levels: d.regular_levels() })
}

fn lower(f: &PolySystem, work: &Ring) -> Result<PolySystem, HsError> {
    let polys = f.polys().iter().map(|p| p.change_ring(work)).collect::<Result<Vec<_>, _>>()?;
    Ok(PolySystem::new(work, polys)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Any tangent derivation (the zero derivation always qualifies).
    Any,
    /// Some `d_1(x_j)` must have a nonzero constant term.
    Regular,
}

#[derive(Clone, Debug)]
pub enum HsOutcome {
    Found(HsDerivation),
    Exhausted,
}

#[derive(Clone, Debug)]
pub struct HsSearch {
    pub outcome: HsOutcome,
    /// Parameter assignments visited.
    pub nodes: u64,
    /// Free parameters over all levels.
    pub parameters: usize,
    /// Parameters that occur in a constraint and were enumerated.
    pub enumerated: usize,
}

/// Monomial in the parameters: sorted `(parameter, exponent)` pairs.
type Mono = Vec<(usize, u32)>;

/// Polynomial in the parameters with coefficients in `O`.
#[derive(Clone, Debug, Default)]
struct Sym {
    terms: BTreeMap<Mono, TruncPoly>,
}

impl Sym {
    fn constant(p: TruncPoly) -> Sym {
        let mut s = Sym::default();
        s.add_term(Vec::new(), p);
        s
    }

    fn add_term(&mut self, m: Mono, p: TruncPoly) {
        if p.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => &old + &p,
            None => p,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    fn add(&self, other: &Sym) -> Sym {
        let mut out = self.clone();
        for (m, p) in &other.terms {
            out.add_term(m.clone(), p.clone());
        }
        out
    }

    fn mul(&self, other: &Sym, q: u64) -> Sym {
        let mut out = Sym::default();
        for (ma, pa) in &self.terms {
            for (mb, pb) in &other.terms {
                let p = pa * pb;
                if !p.is_zero() {
                    out.add_term(merge(ma, mb, q), p);
                }
            }
        }
        out
    }
}

/// Product of parameter monomials, using `a^q = a` on `F_q`.
fn merge(a: &Mono, b: &Mono, q: u64) -> Mono {
    let mut map: BTreeMap<usize, u64> = a.iter().map(|&(p, e)| (p, e as u64)).collect();
    for &(p, e) in b {
        *map.entry(p).or_insert(0) += e as u64;
    }
    map.into_iter().map(|(p, e)| (p, if e >= q { ((e - 1) % (q - 1) + 1) as u32 } else { e as u32 })).collect()
}

fn sym_series_mul(a: &[Sym], b: &[Sym], q: u64) -> Vec<Sym> {
    let r = a.len() - 1;
    let mut out = vec![Sym::default(); r + 1];
    for (i, x) in a.iter().enumerate() {
        if x.terms.is_empty() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(r + 1 - i) {
            out[i + j] = out[i + j].add(&x.mul(y, q));
        }
    }
    out
}

/// `t^i` coefficient of `f_l(x + sum_{s<i} d_s t^s)` for each `l`.
fn symbolic_coefficient(f: &PolySystem, levels: &[Vec<Sym>], i: usize, q: u64) -> Vec<Sym> {
    let ring = f.ring();
    let xs: Vec<Vec<Sym>> = (0..ring.nvars())
        .map(|j| {
            let mut s = vec![Sym::constant(TruncPoly::var(ring, j))];
            s.extend(levels.iter().map(|l| l[j].clone()));
            s.resize(i + 1, Sym::default());
            s
        })
        .collect();
    let mut one = vec![Sym::default(); i + 1];
    one[0] = Sym::constant(TruncPoly::one(ring));
    let mut powers: Vec<Vec<Vec<Sym>>> = xs.iter().map(|s| vec![one.clone(), s.clone()]).collect();
    f.polys()
        .iter()
        .map(|fl| {
            let mut acc = Sym::default();
            for (e, c) in fl.terms() {
                let mut term = one.clone();
                term[0] = Sym::constant(TruncPoly::constant(ring, c.clone()));
                for (j, &ej) in e.iter().enumerate() {
                    while powers[j].len() <= ej as usize {
                        let next = sym_series_mul(powers[j].last().unwrap(), &xs[j], q);
                        powers[j].push(next);
                    }
                    if ej > 0 {
                        term = sym_series_mul(&term, &powers[j][ej as usize], q);
                    }
                }
                acc = acc.add(&term[i]);
            }
            acc
        })
        .collect()
}

/// The linear data shared by all levels, in coordinates of the working ring.
struct LevelMaps {
    /// Rows: `d = S w` solves `L(d) = w mod J^n` whenever `Q w = 0`.
    solve: Matrix,
    /// Consistency rows `Q`.
    consistency: Matrix,
    /// Basis of `{d : L(d) in J^n}` modulo `J^N`.
    kernel: Vec<Vec<Scalar>>,
}

impl LevelMaps {
    fn new(f: &PolySystem, work: &Ring) -> Result<Self, HsError> {
        let k = work.field().clone();
        let dim = work.dim();
        let nvars = work.nvars();
        let n = f.len();
        let fw = lower(f, work)?;
        let j_span = fw.ideal_span(SpanWeights::Plain);
        let partials: Vec<Vec<TruncPoly>> = (0..nvars)
            .map(|j| f.polys().iter().map(|p| p.derivative(j)?.change_ring(work)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        let rows = n * dim;
        let d_cols = nvars * dim;
        let j_cols = n * j_span.dim();
        // [ L | J^n | I ]
        let mut aug = Matrix::zeros(&k, rows, d_cols + j_cols + rows);
        for (j, partial) in partials.iter().enumerate() {
            for m in 0..dim {
                for (l, p) in partial.iter().enumerate() {
                    for (i, c) in p.coeffs().iter().enumerate() {
                        if k.is_zero(c) {
                            continue;
                        }
                        if let Some(idx) = work.mul_index(i, m) {
                            let (r, col) = (l * dim + idx, j * dim + m);
                            let v = k.add(aug.get(r, col), c);
                            aug.set(r, col, v);
                        }
                    }
                }
            }
        }
        for l in 0..n {
            for (b, row) in j_span.basis().row_vecs().iter().enumerate() {
                for (idx, c) in row.iter().enumerate() {
                    aug.set(l * dim + idx, d_cols + l * j_span.dim() + b, c.clone());
                }
            }
        }
        for r in 0..rows {
            aug.set(r, d_cols + j_cols + r, k.one());
        }
        let mut a_only = Matrix::zeros(&k, rows, d_cols + j_cols);
        for r in 0..rows {
            for c in 0..d_cols + j_cols {
                a_only.set(r, c, aug.get(r, c).clone());
            }
        }
        let pivots = aug.rref_limited(d_cols + j_cols);
        let mut solve = Matrix::zeros(&k, d_cols, rows);
        for (r, &p) in pivots.iter().enumerate() {
            if p < d_cols {
                for c in 0..rows {
                    solve.set(p, c, aug.get(r, d_cols + j_cols + c).clone());
                }
            }
        }
        let q_rows: Vec<Vec<Scalar>> =
            (pivots.len()..rows).map(|r| aug.row(r)[d_cols + j_cols..].to_vec()).collect();
        let consistency = Subspace::from_vectors(&k, rows, q_rows).expect("row length").basis().clone();
        // kernel of [L | J^n], projected to d and reduced modulo J^N
        let j_rows = j_span.basis().row_vecs();
        let j_blocks: Vec<Vec<Scalar>> = (0..nvars)
            .flat_map(|j| j_rows.iter().map(move |row| (j, row)))
            .map(|(j, row)| {
                let mut v = vec![k.zero(); d_cols];
                v[j * dim..(j + 1) * dim].clone_from_slice(row);
                v
            })
            .collect();
        let j_big = Subspace::from_vectors(&k, d_cols, j_blocks).expect("length");
        let proper = !j_span.contains_vector(TruncPoly::one(work).coeffs());
        let kernel_vectors: Vec<Vec<Scalar>> = a_only
            .kernel()
            .into_iter()
            .map(|v| {
                let d = v[..d_cols].to_vec();
                if proper {
                    j_big.reduce(&d)
                } else {
                    d
                }
            })
            .collect();
        let kernel = Subspace::from_vectors(&k, d_cols, kernel_vectors).expect("length").basis().row_vecs();
        Ok(LevelMaps { solve, consistency, kernel })
    }
}

/// Polynomial equation in the parameters over the base field.
#[derive(Clone, Debug)]
struct Equation {
    terms: Vec<(Mono, Scalar)>,
}

/// Finds a tangent Hasse-Schmidt derivation of order `r` by exhaustive,
/// depth-first search over a finite field.
pub fn hs_search(f: &PolySystem, r: usize, beta_work: usize, mode: SearchMode) -> Result<HsSearch, HsError> {
    check_system(f, beta_work)?;
    let ring = f.ring().clone();
    let k = ring.field().clone();
    let q = k.order().ok_or(HsError::FieldNotFinite)? as u64;
    if r == 0 {
        return Err(HsError::ZeroOrder);
    }
    let work = ring.with_beta(beta_work);
    let maps = LevelMaps::new(f, &work)?;
    let dim = work.dim();
    let nvars = ring.nvars();
    let n = f.len();
    let lift: Vec<usize> = (0..dim).map(|m| ring.index_of(work.monomial(m)).expect("smaller ring")).collect();
    let to_ring = |coords: &[Scalar]| {
        let mut p = TruncPoly::zero(&ring);
        for (m, c) in coords.iter().enumerate() {
            if !k.is_zero(c) {
                p.set_coeff(lift[m], c.clone());
            }
        }
        p
    };

    let mut levels: Vec<Vec<Sym>> = Vec::new();
    let mut equations: Vec<Equation> = Vec::new();
    let mut param_count = 0usize;
    for i in 1..=r {
        let c = symbolic_coefficient(f, &levels, i, q);
        let monos: BTreeSet<Mono> = c.iter().flat_map(|s| s.terms.keys().cloned()).collect();
        let mut level_eqs: Vec<Vec<(Mono, Scalar)>> = vec![Vec::new(); maps.consistency.rows()];
        let mut images: Vec<Sym> = vec![Sym::default(); nvars];
        for m in monos {
            let mut w = vec![k.zero(); n * dim];
            for (l, s) in c.iter().enumerate() {
                if let Some(p) = s.terms.get(&m) {
                    let low = p.change_ring(&work)?;
                    w[l * dim..(l + 1) * dim].clone_from_slice(low.coeffs());
                }
            }
            for (e, eq) in level_eqs.iter_mut().enumerate() {
                let v = crate::linalg::dot(&k, maps.consistency.row(e), &w);
                if !k.is_zero(&v) {
                    eq.push((m.clone(), v));
                }
            }
            let minus_w: Vec<Scalar> = w.iter().map(|x| k.neg(x)).collect();
            let d = maps.solve.mul_vec(&minus_w).expect("shape");
            for (j, image) in images.iter_mut().enumerate() {
                image.add_term(m.clone(), to_ring(&d[j * dim..(j + 1) * dim]));
            }
        }
        equations.extend(level_eqs.into_iter().map(|terms| Equation { terms }));
        for basis in &maps.kernel {
            let id = param_count;
            param_count += 1;
            for (j, image) in images.iter_mut().enumerate() {
                image.add_term(vec![(id, 1)], to_ring(&basis[j * dim..(j + 1) * dim]));
            }
        }
        levels.push(images);
    }

    // regularity: linear forms d_1(x_j)(0) in the level-1 parameters
    let regularity: Vec<Vec<(usize, Scalar)>> = levels[0]
        .iter()
        .map(|s| {
            s.terms
                .iter()
                .filter_map(|(m, p)| {
                    let c = p.constant_term();
                    if k.is_zero(c) {
                        return None;
                    }
                    Some((m.first().map(|&(id, _)| id), c.clone()))
                })
                .filter_map(|(id, c)| id.map(|id| (id, c)))
                .collect()
        })
        .collect();
    let mut relevant: BTreeSet<usize> = equations.iter().flat_map(|e| e.terms.iter().flat_map(|(m, _)| m.iter().map(|&(p, _)| p))).collect();
    if mode == SearchMode::Regular {
        relevant.extend(regularity.iter().flat_map(|f| f.iter().map(|&(p, _)| p)));
    }
    let order: Vec<usize> = relevant.into_iter().collect();
    let mut position = vec![None; param_count];
    for (pos, &p) in order.iter().enumerate() {
        position[p] = Some(pos);
    }
    let slot = |p: usize| position[p].expect("relevant parameter");

    // equations become checkable once their last parameter is assigned
    let mut buckets: Vec<Vec<&Equation>> = vec![Vec::new(); order.len()];
    let mut constant_failure = false;
    for eq in &equations {
        match eq.terms.iter().flat_map(|(m, _)| m.iter().map(|&(p, _)| slot(p))).max() {
            Some(last) => buckets[last].push(eq),
            None => constant_failure |= eq.terms.iter().any(|(_, c)| !k.is_zero(c)),
        }
    }
    let regular_last = match mode {
        SearchMode::Any => None,
        SearchMode::Regular => regularity.iter().flat_map(|f| f.iter().map(|&(p, _)| slot(p))).max(),
    };
    let impossible_regular = mode == SearchMode::Regular && regular_last.is_none();

    let mut search = Dfs {
        k: &k,
        elements: k.elements().collect(),
        order: &order,
        slot: &slot,
        buckets: &buckets,
        regularity: &regularity,
        regular_last,
        values: Vec::with_capacity(order.len()),
        nodes: 0,
    };
    let found = if constant_failure || impossible_regular { false } else { search.run() };
    let nodes = search.nodes;
    let outcome = if found {
        let mut values = vec![k.zero(); param_count];
        for (pos, &p) in order.iter().enumerate() {
            values[p] = search.values[pos].clone();
        }
        let numeric: Vec<Vec<TruncPoly>> = levels
            .iter()
            .map(|level| level.iter().map(|s| evaluate(&k, &ring, s, &values)).collect())
            .collect();
        let witness = HsDerivation::new(&ring, numeric)?;
        let report = hs_verify(f, &witness, beta_work)?;
        assert!(report.passes, "search witness must verify: {:?}", report.violation);
        assert!(mode == SearchMode::Any || witness.is_regular());
        HsOutcome::Found(witness)
    } else {
        HsOutcome::Exhausted
    };
    Ok(HsSearch { outcome, nodes, parameters: param_count, enumerated: order.len() })
}

fn monomial_value(k: &Field, m: &Mono, values: &[Scalar]) -> Scalar {
    m.iter().fold(k.one(), |acc, &(p, e)| k.mul(&acc, &k.pow(&values[p], e as u64)))
}

fn evaluate(k: &Field, ring: &Ring, s: &Sym, values: &[Scalar]) -> TruncPoly {
    let mut out = TruncPoly::zero(ring);
    for (m, p) in &s.terms {
        let c = monomial_value(k, m, values);
        if !k.is_zero(&c) {
            out = &out + &p.scale(&c);
        }
    }
    out
}

struct Dfs<'a, F: Fn(usize) -> usize> {
    k: &'a Field,
    elements: Vec<Scalar>,
    order: &'a [usize],
    slot: &'a F,
    buckets: &'a [Vec<&'a Equation>],
    regularity: &'a [Vec<(usize, Scalar)>],
    regular_last: Option<usize>,
    values: Vec<Scalar>,
    nodes: u64,
}

impl<F: Fn(usize) -> usize> Dfs<'_, F> {
    fn value(&self, p: usize) -> Scalar {
        self.values[(self.slot)(p)].clone()
    }

    fn holds(&self, eq: &Equation) -> bool {
        let k = self.k;
        let mut acc = k.zero();
        for (m, c) in &eq.terms {
            let v = m.iter().fold(c.clone(), |a, &(p, e)| k.mul(&a, &k.pow(&self.value(p), e as u64)));
            acc = k.add(&acc, &v);
        }
        k.is_zero(&acc)
    }

    fn is_regular(&self) -> bool {
        let k = self.k;
        self.regularity.iter().any(|form| {
            let v = form.iter().fold(k.zero(), |a, (p, c)| k.add(&a, &k.mul(c, &self.value(*p))));
            !k.is_zero(&v)
        })
    }

    fn run(&mut self) -> bool {
        let pos = self.values.len();
        if pos == self.order.len() {
            return true;
        }
        for idx in 0..self.elements.len() {
            self.nodes += 1;
            self.values.push(self.elements[idx].clone());
            let ok = self.buckets[pos].iter().all(|eq| self.holds(eq))
                && (self.regular_last != Some(pos) || self.is_regular());
            if ok && self.run() {
                return true;
            }
            self.values.pop();
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn ring(n: usize, beta: usize, field: &str) -> Ring {
        Ring::new(n, beta, &Field::parse(field).unwrap()).unwrap()
    }

    fn p(r: &Ring, s: &str) -> TruncPoly {
        parse_poly(s, r, false).unwrap()
    }

    fn hs(r: &Ring, levels: &[&[&str]]) -> HsDerivation {
        HsDerivation::new(r, levels.iter().map(|l| l.iter().map(|s| p(r, s)).collect()).collect()).unwrap()
    }

    #[test]
    fn verify_examples() {
        let r = ring(2, 2, "F2");
        let f = PolySystem::single(p(&r, "x"));
        assert!(hs_verify(&f, &hs(&r, &[&["0", "1"]]), 2).unwrap().passes);

        let r = ring(3, 3, "F2");
        let f = PolySystem::single(p(&r, "x^2+y^2*z"));
        let report = hs_verify(&f, &hs(&r, &[&["0", "0", "1"]]), 2).unwrap();
        assert!(!report.passes);
        let v = report.violation.unwrap();
        assert_eq!((v.equation, v.t_order), (0, 1));
        assert_eq!(v.residue.to_string(), "y^2");

        let report = hs_verify(&f, &hs(&r, &[&["0", "1", "0"], &["0", "0", "0"]]), 2).unwrap();
        let v = report.violation.unwrap();
        assert_eq!((v.t_order, v.residue.to_string()), (2, "z".to_string()));
        assert_eq!(report.regular_levels, vec![true, false]);
    }

    #[test]
    fn level_two_residue_mixes_levels() {
        // t^2 coefficient: d1(x)^2 + y^2 d2(z) + d1(y)^2 z
        let r = ring(3, 3, "F2");
        let f = PolySystem::single(p(&r, "x^2+y^2*z"));
        let d = hs(&r, &[&["1", "0", "0"], &["0", "0", "1"]]);
        let v = hs_verify(&f, &d, 2).unwrap().violation.unwrap();
        assert_eq!((v.t_order, v.residue.to_string()), (2, "1 + y^2".to_string()));
        let full = expand(&f, &d);
        assert_eq!(full[0][2], p(&r, "1 + y^2"));
    }

    #[test]
    fn prefixes_of_passing_derivations_pass() {
        let r = ring(2, 3, "F3");
        let f = PolySystem::single(p(&r, "x^2"));
        let d = hs(&r, &[&["0", "1"], &["x", "y"], &["x^2", "1"]]);
        assert!(hs_verify(&f, &d, 3).unwrap().passes);
        for k in 0..3 {
            assert!(hs_verify(&f, &d.prefix(k), 3).unwrap().passes);
        }
    }

    #[test]
    fn search_examples() {
        let r = ring(3, 3, "F2");
        let f = PolySystem::single(p(&r, "x^2+y^2*z"));
        let out = hs_search(&f, 2, 2, SearchMode::Regular).unwrap();
        assert!(matches!(out.outcome, HsOutcome::Exhausted));
        let again = hs_search(&f, 2, 2, SearchMode::Regular).unwrap();
        assert_eq!(out.nodes, again.nodes);

        let any = hs_search(&f, 1, 2, SearchMode::Any).unwrap();
        let HsOutcome::Found(w) = any.outcome else { panic!("zero derivation qualifies") };
        assert_eq!(w, HsDerivation::zero(&r, 1));

        let r2 = ring(2, 2, "F2");
        let g = PolySystem::single(p(&r2, "x^2"));
        let HsOutcome::Found(w) = hs_search(&g, 1, 2, SearchMode::Regular).unwrap().outcome else {
            panic!("d/dy is tangent and regular")
        };
        assert!(w.is_regular());
        assert!(hs_verify(&g, &w, 2).unwrap().passes);
    }

    #[test]
    fn search_over_q_is_refused() {
        let r = ring(1, 2, "Q");
        let f = PolySystem::single(p(&r, "x^2"));
        assert_eq!(hs_search(&f, 1, 2, SearchMode::Any).unwrap_err(), HsError::FieldNotFinite);
    }

    #[test]
    fn derivation_embedding() {
        // an ordinary logarithmic derivation is an order-one HS derivation
        use crate::derlog::{solve_log_derivation, LogDerResult};
        let r = ring(3, 4, "F3");
        let k = r.field().clone();
        for f in ["x^2+y^2", "x*y + z^3", "x^2*z + y^3"] {
            let f = PolySystem::single(p(&r, f));
            for v in [[0, 0, 1], [0, 1, 0], [1, 0, 0], [0, 0, 0]] {
                let v: Vec<Scalar> = v.iter().map(|&c| k.from_int(c)).collect();
                if let LogDerResult::Feasible { derivation, .. } = solve_log_derivation(&f, &v, 4).unwrap() {
                    let d = HsDerivation::new(&r, vec![derivation.coeffs.clone()]).unwrap();
                    assert!(hs_verify(&f, &d, 3).unwrap().passes);
                }
            }
        }
    }

    /// All assignments of all coefficients in the working ring.
    fn brute_force_regular(f: &PolySystem, r: usize, beta_work: usize) -> bool {
        let ring = f.ring();
        let k = ring.field();
        let work = ring.with_beta(beta_work);
        let slots: Vec<usize> = (0..work.dim()).map(|m| ring.index_of(work.monomial(m)).unwrap()).collect();
        let per_level = ring.nvars() * slots.len();
        let total = r * per_level;
        let q = k.order().unwrap() as u64;
        let elems: Vec<Scalar> = k.elements().collect();
        for code in 0..q.pow(total as u32) {
            let mut c = code;
            let mut levels = vec![vec![TruncPoly::zero(ring); ring.nvars()]; r];
            for level in levels.iter_mut() {
                for poly in level.iter_mut() {
                    for &s in &slots {
                        poly.set_coeff(s, elems[(c % q) as usize].clone());
                        c /= q;
                    }
                }
            }
            let d = HsDerivation::new(ring, levels).unwrap();
            if d.is_regular() && hs_verify(f, &d, beta_work).unwrap().passes {
                return true;
            }
        }
        false
    }

    #[test]
    fn search_agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let cases: [(usize, usize, usize, usize); 3] = [(1, 2, 2, 2), (2, 2, 1, 2), (2, 2, 2, 1)];
        for &(nvars, beta, beta_work, r) in &cases {
            let rg = ring(nvars, beta + 1, "F2");
            let k = rg.field().clone();
            for _ in 0..12 {
                let mut f = TruncPoly::zero(&rg);
                for i in 1..rg.dim() {
                    if rng.gen_bool(0.35) {
                        f.set_coeff(i, k.one());
                    }
                }
                let f = PolySystem::single(f);
                let fast = matches!(hs_search(&f, r, beta_work, SearchMode::Regular).unwrap().outcome, HsOutcome::Found(_));
                assert_eq!(fast, brute_force_regular(&f, r, beta_work), "{f} r={r} bw={beta_work}");
            }
        }
    }
}
