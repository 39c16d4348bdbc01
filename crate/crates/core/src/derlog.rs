//! Logarithmic derivations of a system `f`: derivations `d = sum g_j d/dx_j`
//! with `d(f_i) = sum_l H_il f_l`, solved for as one linear system modulo
//! `m^{beta_work}`. Also inseparability certificates and, in characteristic
//! zero, splitting off smooth factors along a regular derivation.

use serde::Serialize;
use thiserror::Error;

use crate::contact::{
    self, check_on_variety, identity_map, invert_map, verify_equivalence_witness, ContactElement, ContactError,
    PolyMatrix,
};
use crate::linalg::{dot, solve_linear, LinearSolution, Matrix, Subspace};
use crate::scalar::{Field, FieldKind, Scalar};
use crate::trunc::{PolySystem, Ring, SpanWeights, TruncError, TruncPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerlogError {
    #[error("beta_work = {beta_work} exceeds the ring truncation {beta}")]
    BetaTooLarge { beta_work: usize, beta: usize },
    #[error("direction has {got} entries, ring has {expected} variables")]
    DirectionLength { expected: usize, got: usize },
    #[error("the witness does not carry the jet at the origin to the jet at the point")]
    WitnessInvalid,
    #[error("the point is the origin")]
    ZeroDirection,
    #[error("a logarithmic derivation exists in this direction; no certificate at this beta_work")]
    DerivationFeasible,
    #[error("derivation is not regular: every coefficient vanishes at the origin")]
    NotRegular,
    #[error("splitting needs characteristic zero")]
    CharPNotSupported,
    #[error("derivation does not satisfy d(f) = H f through degree {0}")]
    NotAttached(usize),
    #[error("straightening failed at degree {degree}: {stage}")]
    StraightenFailed { stage: String, degree: usize },
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Trunc(#[from] TruncError),
}

/// `d = sum_j g_j d/dx_j` together with a multiplier matrix `H`; attached to
/// `f` when `d(f) = H f` modulo `m^{beta_work}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub coeffs: Vec<TruncPoly>,
    pub multiplier: PolyMatrix,
    pub beta_work: usize,
}

impl Derivation {
    pub fn new(coeffs: Vec<TruncPoly>, multiplier: PolyMatrix, beta_work: usize) -> Self {
        Derivation { coeffs, multiplier, beta_work }
    }

    pub fn ring(&self) -> &Ring {
        self.multiplier.ring()
    }

    pub fn apply(&self, h: &TruncPoly) -> Result<TruncPoly, TruncError> {
        let mut acc = TruncPoly::zero(h.ring());
        for (j, g) in self.coeffs.iter().enumerate() {
            acc = acc.checked_add(&g.checked_mul(&h.derivative(j)?)?)?;
        }
        Ok(acc)
    }

    /// `(g_1(0), .., g_N(0))`.
    pub fn direction(&self) -> Vec<Scalar> {
        self.coeffs.iter().map(|g| g.constant_term().clone()).collect()
    }

    pub fn is_regular(&self) -> bool {
        let k = self.ring().field();
        self.coeffs.iter().any(|g| !k.is_zero(g.constant_term()))
    }

    /// `d(f) - H f`, truncated to degree `beta_work - 1`.
    pub fn residual(&self, f: &PolySystem) -> Result<Vec<TruncPoly>, DerlogError> {
        let hf = self.multiplier.apply(f.polys())?;
        let mut out = Vec::with_capacity(f.len());
        for (fi, hfi) in f.polys().iter().zip(&hf) {
            let r = self.apply(fi)?.checked_sub(hfi)?;
            out.push(match self.beta_work {
                0 => TruncPoly::zero(fi.ring()),
                b => r.truncate(b - 1),
            });
        }
        Ok(out)
    }

    pub fn is_attached(&self, f: &PolySystem) -> Result<bool, DerlogError> {
        Ok(self.residual(f)?.iter().all(|r| r.is_zero()))
    }
}

/// Label of an equation: coefficient of `monomial` in component `component`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquationLabel {
    pub component: usize,
    pub monomial: String,
}

/// The linear system `sum_j g_j df/dx_j - H f = 0 mod m^{beta_work}` with
/// `g(0) = v`, in the unknowns `g_j` (degrees `1..beta_work-1`) followed by
/// `H_il` (degrees `0..beta_work-1`).
#[derive(Clone, Debug)]
pub struct LogDerSystem {
    pub matrix: Matrix,
    pub rhs: Vec<Scalar>,
    pub rows: Vec<EquationLabel>,
    ring: Ring,
    work: Option<Ring>,
    n: usize,
    g_columns: usize,
}

/// Nonzero entries of a certificate, labelled by equation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateEntry {
    pub component: usize,
    pub monomial: String,
    pub weight: String,
}

/// Left null vector `y` with `y A = 0` and `y b != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfeasibilityProof {
    pub y: Vec<Scalar>,
    pub rows: Vec<EquationLabel>,
}

impl InfeasibilityProof {
    pub fn entries(&self, k: &Field) -> Vec<CertificateEntry> {
        self.y
            .iter()
            .zip(&self.rows)
            .filter(|(c, _)| !k.is_zero(c))
            .map(|(c, l)| CertificateEntry { component: l.component, monomial: l.monomial.clone(), weight: k.format(c) })
            .collect()
    }

    /// Independent check against the system it claims to refute.
    pub fn verify(&self, system: &LogDerSystem) -> bool {
        let k = system.matrix.field();
        if self.y.len() != system.matrix.rows() {
            return false;
        }
        let combo_zero = (0..system.matrix.cols()).all(|c| {
            let col: Vec<Scalar> = (0..system.matrix.rows()).map(|r| system.matrix.get(r, c).clone()).collect();
            k.is_zero(&dot(k, &self.y, &col))
        });
        combo_zero && !k.is_zero(&dot(k, &self.y, &system.rhs))
    }
}

#[derive(Clone, Debug)]
pub enum LogDerResult {
    /// A particular solution and the dimension of the solution space.
    Feasible { derivation: Derivation, solution_dim: usize },
    Infeasible { proof: InfeasibilityProof },
}

impl LogDerResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LogDerResult::Feasible { .. })
    }
}

fn multiply_into(work: &Ring, p: &TruncPoly, m: usize, out: &mut [Scalar], offset: usize) {
    for (i, c) in p.coeffs().iter().enumerate() {
        if work.field().is_zero(c) {
            continue;
        }
        if let Some(idx) = work.mul_index(i, m) {
            out[offset + idx] = work.field().add(&out[offset + idx], c);
        }
    }
}

impl LogDerSystem {
    pub fn build(f: &PolySystem, beta_work: usize) -> Result<(Self, Vec<Vec<TruncPoly>>), DerlogError> {
        let ring = f.ring().clone();
        if beta_work > ring.beta() {
            return Err(DerlogError::BetaTooLarge { beta_work, beta: ring.beta() });
        }
        let k = ring.field().clone();
        let nvars = ring.nvars();
        let n = f.len();
        let Some(work_beta) = beta_work.checked_sub(1) else {
            let empty = Matrix::zeros(&k, 0, 0);
            let sys = LogDerSystem { matrix: empty, rhs: vec![], rows: vec![], ring, work: None, n, g_columns: 0 };
            return Ok((sys, vec![]));
        };
        let work = ring.with_beta(work_beta);
        let dim = work.dim();
        // partials[j][i] = d f_i / d x_j in the working ring
        let partials: Vec<Vec<TruncPoly>> = (0..nvars)
            .map(|j| f.polys().iter().map(|p| p.derivative(j)?.change_ring(&work)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        let fw: Vec<TruncPoly> = f.polys().iter().map(|p| p.change_ring(&work)).collect::<Result<_, _>>()?;
        let mut columns: Vec<Vec<Scalar>> = Vec::new();
        for partial in &partials {
            for m in 1..dim {
                let mut col = vec![k.zero(); n * dim];
                for (i, p) in partial.iter().enumerate() {
                    multiply_into(&work, p, m, &mut col, i * dim);
                }
                columns.push(col);
            }
        }
        let g_columns = columns.len();
        for i in 0..n {
            for fl in &fw {
                for m in 0..dim {
                    let mut col = vec![k.zero(); n * dim];
                    multiply_into(&work, &fl.neg(), m, &mut col, i * dim);
                    columns.push(col);
                }
            }
        }
        let mut matrix = Matrix::zeros(&k, n * dim, columns.len());
        for (c, col) in columns.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                if !k.is_zero(v) {
                    matrix.set(r, c, v.clone());
                }
            }
        }
        let rows = (0..n)
            .flat_map(|i| (0..dim).map(move |m| (i, m)))
            .map(|(i, m)| EquationLabel { component: i, monomial: work.format_monomial(m) })
            .collect();
        let sys = LogDerSystem { matrix, rhs: vec![k.zero(); n * dim], rows, ring, work: Some(work), n, g_columns };
        Ok((sys, partials))
    }

    fn with_direction(mut self, partials: &[Vec<TruncPoly>], v: &[Scalar]) -> Self {
        let Some(work) = self.work.clone() else { return self };
        let k = work.field().clone();
        let dim = work.dim();
        for (j, vj) in v.iter().enumerate() {
            if k.is_zero(vj) {
                continue;
            }
            for (i, p) in partials[j].iter().enumerate() {
                for (m, c) in p.coeffs().iter().enumerate() {
                    let r = i * dim + m;
                    self.rhs[r] = k.sub(&self.rhs[r], &k.mul(vj, c));
                }
            }
        }
        self
    }

    /// Reassembles a derivation from a solution vector.
    fn derivation(&self, v: &[Scalar], x: &[Scalar], beta_work: usize) -> Derivation {
        let ring = &self.ring;
        let mut coeffs: Vec<TruncPoly> = v.iter().map(|c| TruncPoly::constant(ring, c.clone())).collect();
        let mut multiplier = PolyMatrix::zeros(ring, self.n, self.n);
        if let Some(work) = &self.work {
            let dim = work.dim();
            let lift = |m: usize| ring.index_of(work.monomial(m)).expect("working ring is smaller");
            for (j, g) in coeffs.iter_mut().enumerate() {
                for m in 1..dim {
                    g.set_coeff(lift(m), x[j * (dim - 1) + (m - 1)].clone());
                }
            }
            for i in 0..self.n {
                for l in 0..self.n {
                    let mut h = TruncPoly::zero(ring);
                    for m in 0..dim {
                        h.set_coeff(lift(m), x[self.g_columns + (i * self.n + l) * dim + m].clone());
                    }
                    multiplier.set(i, l, h);
                }
            }
        }
        Derivation::new(coeffs, multiplier, beta_work)
    }
}

fn check_direction(f: &PolySystem, v: &[Scalar]) -> Result<(), DerlogError> {
    if v.len() != f.ring().nvars() {
        return Err(DerlogError::DirectionLength { expected: f.ring().nvars(), got: v.len() });
    }
    Ok(())
}

/// The system for direction `v`, for independent inspection.
pub fn log_derivation_system(f: &PolySystem, v: &[Scalar], beta_work: usize) -> Result<LogDerSystem, DerlogError> {
    check_direction(f, v)?;
    let (sys, partials) = LogDerSystem::build(f, beta_work)?;
    Ok(sys.with_direction(&partials, v))
}

/// Solves for a logarithmic derivation with `g(0) = v` modulo `m^{beta_work}`.
pub fn solve_log_derivation(f: &PolySystem, v: &[Scalar], beta_work: usize) -> Result<LogDerResult, DerlogError> {
    let sys = log_derivation_system(f, v, beta_work)?;
    if sys.work.is_none() {
        let derivation = sys.derivation(v, &[], beta_work);
        return Ok(LogDerResult::Feasible { derivation, solution_dim: 0 });
    }
    match solve_linear(&sys.matrix, &sys.rhs).expect("system is well formed") {
        LinearSolution::Solved { x, kernel } => Ok(LogDerResult::Feasible {
            derivation: sys.derivation(v, &x, beta_work),
            solution_dim: kernel.dim(),
        }),
        LinearSolution::Infeasible { certificate } => {
            Ok(LogDerResult::Infeasible { proof: InfeasibilityProof { y: certificate, rows: sys.rows } })
        }
    }
}

/// All `v` in `k^N` for which [`solve_log_derivation`] is feasible.
pub fn solvable_directions(f: &PolySystem, beta_work: usize) -> Result<Subspace, DerlogError> {
    let (sys, partials) = LogDerSystem::build(f, beta_work)?;
    let ring = f.ring();
    let k = ring.field();
    let nvars = ring.nvars();
    let Some(work) = &sys.work else { return Ok(Subspace::full(k, nvars)) };
    let dim = work.dim();
    // columns for v_j, then the unknowns of the system
    let mut joint = Matrix::zeros(k, sys.matrix.rows(), nvars + sys.matrix.cols());
    for (j, partial) in partials.iter().enumerate() {
        for (i, p) in partial.iter().enumerate() {
            for (m, c) in p.coeffs().iter().enumerate() {
                joint.set(i * dim + m, j, c.clone());
            }
        }
    }
    for r in 0..sys.matrix.rows() {
        for c in 0..sys.matrix.cols() {
            let v = sys.matrix.get(r, c);
            if !k.is_zero(v) {
                joint.set(r, nvars + c, v.clone());
            }
        }
    }
    let projected: Vec<Vec<Scalar>> = joint.kernel().into_iter().map(|v| v[..nvars].to_vec()).collect();
    Ok(Subspace::from_vectors(k, nvars, projected).expect("length N"))
}

/// Evidence that the orbit map is inseparable at the origin: a point `a`
/// whose jet is in the orbit of the jet at 0, while no logarithmic derivation
/// points in direction `a`.
#[derive(Clone, Debug)]
pub struct InseparabilityCertificate {
    pub f: PolySystem,
    pub point: Vec<Scalar>,
    pub witness: ContactElement,
    pub direction: Vec<Scalar>,
    pub beta_work: usize,
    pub proof: InfeasibilityProof,
}

impl InseparabilityCertificate {
    /// Re-checks both halves from scratch.
    pub fn verify(&self) -> Result<bool, DerlogError> {
        let origin = vec![self.f.field().zero(); self.f.ring().nvars()];
        if !verify_equivalence_witness(&self.f, &origin, &self.point, &self.witness)? {
            return Ok(false);
        }
        let sys = log_derivation_system(&self.f, &self.direction, self.beta_work)?;
        Ok(self.proof.verify(&sys))
    }
}

pub fn inseparability_certificate(
    f: &PolySystem,
    a: &[Scalar],
    g: &ContactElement,
    beta_work: usize,
) -> Result<InseparabilityCertificate, DerlogError> {
    check_direction(f, a)?;
    let k = f.field().clone();
    let lead = a.iter().find(|c| !k.is_zero(c)).ok_or(DerlogError::ZeroDirection)?;
    let lead_inv = k.inv(lead).expect("nonzero");
    let origin = vec![k.zero(); a.len()];
    check_on_variety(f, &origin)?;
    if !verify_equivalence_witness(f, &origin, a, g)? {
        return Err(DerlogError::WitnessInvalid);
    }
    let direction: Vec<Scalar> = a.iter().map(|c| k.mul(c, &lead_inv)).collect();
    match solve_log_derivation(f, &direction, beta_work)? {
        LogDerResult::Feasible { .. } => Err(DerlogError::DerivationFeasible),
        LogDerResult::Infeasible { proof } => Ok(InseparabilityCertificate {
            f: f.clone(),
            point: a.to_vec(),
            witness: g.clone(),
            direction,
            beta_work,
            proof,
        }),
    }
}

/// Outcome of straightening one regular derivation.
#[derive(Clone, Debug)]
pub struct SplitResult {
    /// Substitution `x = psi(y)` in which the derivation becomes `d/dy_j`.
    pub psi: Vec<TruncPoly>,
    /// Index of the straightened variable.
    pub variable: usize,
    /// `U (f o psi)`, free of `x_j` through degree `precision`.
    pub residual: PolySystem,
    /// The unit matrix `U`.
    pub unit: PolyMatrix,
    /// Highest degree at which all identities are exact.
    pub precision: usize,
}

impl SplitResult {
    /// `(U, psi)` as an element of the contact group; acting on `f` gives
    /// the untruncated residual.
    pub fn element(&self) -> Result<ContactElement, ContactError> {
        ContactElement::new(self.unit.clone(), self.psi.clone())
    }
}

fn factorial_inverse(k: &Field, n: usize) -> Scalar {
    let mut acc = k.one();
    for i in 2..=n {
        acc = k.mul(&acc, &k.from_int(i as i64));
    }
    k.inv(&acc).expect("characteristic zero")
}

fn first_violation(p: &TruncPoly, max_degree: usize, bad: impl Fn(&[u32]) -> bool) -> Option<usize> {
    let ring = p.ring();
    (0..ring.dim())
        .filter(|&i| !ring.field().is_zero(p.coeff(i)) && ring.degree_of(i) <= max_degree && bad(ring.monomial(i)))
        .map(|i| ring.degree_of(i))
        .min()
}

/// Straightens a regular logarithmic derivation to `d/dx_j` and removes the
/// `x_j`-dependence of `f` by a unit multiplier (characteristic zero).
pub fn straighten_and_split(f: &PolySystem, d: &Derivation) -> Result<SplitResult, DerlogError> {
    let k = f.field().clone();
    let j = d.coeffs.iter().position(|g| !k.is_zero(g.constant_term())).ok_or(DerlogError::NotRegular)?;
    straighten_along(f, d, j)
}

/// As [`straighten_and_split`] with a prescribed variable `j`, which needs
/// `g_j(0) != 0`.
pub fn straighten_along(f: &PolySystem, d: &Derivation, j: usize) -> Result<SplitResult, DerlogError> {
    let ring = f.ring().clone();
    let k = ring.field().clone();
    if k.kind() != FieldKind::Rationals {
        return Err(DerlogError::CharPNotSupported);
    }
    if d.beta_work > ring.beta() {
        return Err(DerlogError::BetaTooLarge { beta_work: d.beta_work, beta: ring.beta() });
    }
    if k.is_zero(d.coeffs[j].constant_term()) {
        return Err(DerlogError::NotRegular);
    }
    if !d.is_attached(f)? {
        return Err(DerlogError::NotAttached(d.beta_work.saturating_sub(1)));
    }
    let beta = ring.beta();
    let precision = d.beta_work.saturating_sub(1);
    // normalise so that d(x_j) = 1
    let gj_inv = d.coeffs[j].inverse()?;
    let dn = Derivation::new(
        d.coeffs.iter().map(|g| g * &gj_inv).collect(),
        {
            let mut h = d.multiplier.clone();
            for a in 0..h.rows() {
                for b in 0..h.cols() {
                    let v = h.get(a, b) * &gj_inv;
                    h.set(a, b, v);
                }
            }
            h
        },
        d.beta_work,
    );
    let minus_xj = TruncPoly::var(&ring, j).neg();
    let mut weights = vec![TruncPoly::one(&ring)];
    for _ in 1..=beta {
        let next = weights.last().unwrap() * &minus_xj;
        weights.push(next);
    }
    for (e, w) in weights.iter_mut().enumerate() {
        *w = w.scale(&factorial_inverse(&k, e));
    }
    // theta(h) = sum (-x_j)^e / e! d^e(h), a ring map onto the constants of d
    let theta = |h: &TruncPoly| -> Result<TruncPoly, DerlogError> {
        let mut acc = TruncPoly::zero(&ring);
        let mut power = h.clone();
        for w in &weights {
            acc = &acc + &(w * &power);
            power = dn.apply(&power)?;
        }
        Ok(acc)
    };
    let mut big_theta = Vec::with_capacity(ring.nvars());
    for l in 0..ring.nvars() {
        big_theta.push(if l == j { TruncPoly::var(&ring, l) } else { theta(&TruncPoly::var(&ring, l))? });
    }
    let psi = invert_map(&ring, &big_theta)?;
    // U = sum (-x_j)^e / e! A_e with A_0 = 1, A_{e+1} = d(A_e) + A_e H
    let n = f.len();
    let mut a_e = PolyMatrix::identity(&ring, n);
    let mut u = PolyMatrix::zeros(&ring, n, n);
    for w in &weights {
        let mut term = a_e.clone();
        for r in 0..n {
            for c in 0..n {
                let v = w * a_e.get(r, c);
                term.set(r, c, v);
            }
        }
        u = u.add(&term)?;
        let mut next = a_e.mul(&dn.multiplier)?;
        for r in 0..n {
            for c in 0..n {
                let v = &dn.apply(a_e.get(r, c))? + next.get(r, c);
                next.set(r, c, v);
            }
        }
        a_e = next;
    }
    let unit = u.compose(&psi)?;
    let element = ContactElement::new(unit.clone(), psi.clone())?;
    let full = element.act(f)?;

    let fail = |stage: &str, degree: usize| DerlogError::StraightenFailed { stage: stage.into(), degree };
    for g in full.polys() {
        if let Some(deg) = first_violation(g, precision, |e| e[j] > 0) {
            return Err(fail("residual still depends on the straightened variable", deg));
        }
    }
    for (l, t) in big_theta.iter().enumerate() {
        if l == j {
            continue;
        }
        let image = dn.apply(t)?.compose(&psi)?;
        if let Some(deg) = first_violation(&image, precision, |_| true) {
            return Err(fail("pulled-back derivation differs from the coordinate derivation", deg));
        }
    }
    let low = ring.with_beta(precision);
    let residual = PolySystem::new(&ring, full.polys().iter().map(|g| g.truncate(precision)).collect())?;
    let composed = f.compose(&psi)?;
    let lower = |s: &PolySystem| -> Result<Subspace, DerlogError> {
        let polys = s.polys().iter().map(|p| p.change_ring(&low)).collect::<Result<Vec<_>, _>>()?;
        Ok(PolySystem::new(&low, polys)?.ideal_span(SpanWeights::Plain))
    };
    if lower(&residual)? != lower(&composed)? {
        return Err(fail("ideals differ after the unit multiplier", precision));
    }
    Ok(SplitResult { psi, variable: j, residual, unit, precision })
}

/// Result of splitting off as many smooth factors as the derivations allow.
#[derive(Clone, Debug)]
pub struct MultiSplit {
    /// Indices of the straightened variables, in order.
    pub variables: Vec<usize>,
    /// Combined substitution over the original ring.
    pub psi: Vec<TruncPoly>,
    /// System in the remaining variables (same ring, exact through `precision`).
    pub residual: PolySystem,
    pub precision: usize,
}

fn restrict(p: &TruncPoly, keep: &[usize], target: &Ring) -> TruncPoly {
    let mut out = TruncPoly::zero(target);
    for (e, c) in p.terms() {
        let sub: Vec<u32> = keep.iter().map(|&i| e[i]).collect();
        if sub.iter().sum::<u32>() == e.iter().sum::<u32>() {
            if let Some(idx) = target.index_of(&sub) {
                out.set_coeff(idx, c.clone());
            }
        }
    }
    out
}

fn extend(p: &TruncPoly, keep: &[usize], target: &Ring) -> TruncPoly {
    let mut out = TruncPoly::zero(target);
    for (e, c) in p.terms() {
        let mut full = vec![0u32; target.nvars()];
        for (slot, &i) in keep.iter().enumerate() {
            full[i] = e[slot];
        }
        if let Some(idx) = target.index_of(&full) {
            out.set_coeff(idx, c.clone());
        }
    }
    out
}

/// Repeatedly finds a regular logarithmic derivation of the residual system
/// and straightens it, restricting to the untouched variables after each
/// step. Each step costs one degree of precision.
pub fn split_smooth_factors(f: &PolySystem, beta_work: usize) -> Result<MultiSplit, DerlogError> {
    let ring = f.ring().clone();
    let k = ring.field().clone();
    if k.kind() != FieldKind::Rationals {
        return Err(DerlogError::CharPNotSupported);
    }
    if beta_work > ring.beta() {
        return Err(DerlogError::BetaTooLarge { beta_work, beta: ring.beta() });
    }
    let mut keep: Vec<usize> = (0..ring.nvars()).collect();
    let mut variables = Vec::new();
    let mut psi_total = identity_map(&ring);
    let mut current = f.clone();
    let mut precision = beta_work;
    while keep.len() > 1 && precision >= 1 {
        let names: Vec<String> = keep.iter().map(|&i| ring.names()[i].clone()).collect();
        let sub_ring = Ring::with_names(names, precision, &k)?;
        let sub = PolySystem::new(
            &sub_ring,
            current.polys().iter().map(|p| restrict(&p.truncate(precision), &keep, &sub_ring)).collect(),
        )?;
        let dirs = solvable_directions(&sub, precision)?;
        if dirs.dim() == 0 {
            break;
        }
        let v = dirs.basis().row(0).to_vec();
        let LogDerResult::Feasible { derivation, .. } = solve_log_derivation(&sub, &v, precision)? else {
            unreachable!("direction taken from the solvable subspace");
        };
        let step = straighten_and_split(&sub, &derivation)?;
        let global_var = keep[step.variable];
        let step_psi: Vec<TruncPoly> = (0..ring.nvars())
            .map(|i| match keep.iter().position(|&g| g == i) {
                Some(slot) => extend(&step.psi[slot], &keep, &ring),
                None => TruncPoly::var(&ring, i),
            })
            .collect();
        psi_total = contact::compose_maps(&psi_total, &step_psi)?;
        current = PolySystem::new(&ring, step.residual.polys().iter().map(|p| extend(p, &keep, &ring)).collect())?;
        variables.push(global_var);
        keep.retain(|&i| i != global_var);
        precision = step.precision;
    }
    let residual = PolySystem::new(&ring, current.polys().iter().map(|p| p.truncate(precision)).collect())?;
    Ok(MultiSplit { variables, psi: psi_total, residual, precision })
}
