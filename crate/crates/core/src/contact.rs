//! The truncated contact group `K_beta = GL_n(O) x| Aut O` and its action
//! `(M, phi) . f = M * (f o phi)` on systems of `n` series.

use thiserror::Error;

use crate::linalg::{Matrix, Subspace};
use crate::scalar::Scalar;
use crate::trunc::{PolySystem, Ring, TruncError, TruncPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContactError {
    #[error("mismatch: {0}")]
    SpecMismatch(String),
    #[error("automorphism has a singular Jacobian at the origin")]
    SingularJacobian,
    #[error("matrix is not invertible at the origin")]
    NotAUnit,
    #[error("automorphism component {0} does not vanish at the origin")]
    NotOriginPreserving(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("point {0} is not on the variety")]
    PointNotOnVariety(String),
    #[error(transparent)]
    Trunc(#[from] TruncError),
}

/// Matrix with entries in `O_{N,beta}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    entries: Vec<TruncPoly>,
}

impl PolyMatrix {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Self {
        PolyMatrix { ring: ring.clone(), rows, cols, entries: vec![TruncPoly::zero(ring); rows * cols] }
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.entries[i * n + i] = TruncPoly::one(ring);
        }
        m
    }

    /// Constant matrix over `k` viewed inside `O^{n x n}`.
    pub fn from_constant(ring: &Ring, m: &Matrix) -> Self {
        let mut out = Self::zeros(ring, m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.entries[i * m.cols() + j] = TruncPoly::constant(ring, m.get(i, j).clone());
            }
        }
        out
    }

    pub fn from_rows(ring: &Ring, rows: Vec<Vec<TruncPoly>>) -> Result<Self, ContactError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(ContactError::SpecMismatch("ragged matrix".into()));
            }
            for p in row {
                if p.ring() != ring {
                    return Err(ContactError::SpecMismatch("matrix entry over another ring".into()));
                }
                entries.push(p);
            }
        }
        Ok(PolyMatrix { ring: ring.clone(), rows: nrows, cols: ncols, entries })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: TruncPoly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn row_polys(&self, i: usize) -> &[TruncPoly] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Value at the origin.
    pub fn constant_part(&self) -> Matrix {
        let k = self.ring.field();
        let mut m = Matrix::zeros(k, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).constant_term().clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix, ContactError> {
        if self.cols != other.rows || self.ring != other.ring {
            return Err(ContactError::SpecMismatch("matrix product shapes".into()));
        }
        let mut out = PolyMatrix::zeros(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = TruncPoly::zero(&self.ring);
                for l in 0..self.cols {
                    acc = &acc + &(self.get(i, l) * other.get(l, j));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix, ContactError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix, ContactError> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &PolyMatrix, op: impl Fn(&TruncPoly, &TruncPoly) -> TruncPoly) -> Result<PolyMatrix, ContactError> {
        if self.rows != other.rows || self.cols != other.cols || self.ring != other.ring {
            return Err(ContactError::SpecMismatch("matrix shapes".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| op(a, b)).collect();
        Ok(PolyMatrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, entries })
    }

    /// Matrix times column vector of series.
    pub fn apply(&self, v: &[TruncPoly]) -> Result<Vec<TruncPoly>, ContactError> {
        if v.len() != self.cols {
            return Err(ContactError::SpecMismatch(format!("{} columns vs vector of length {}", self.cols, v.len())));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row_polys(i)
                    .iter()
                    .zip(v)
                    .fold(TruncPoly::zero(&self.ring), |acc, (a, b)| &acc + &(a * b))
            })
            .collect())
    }

    /// Entrywise composition `M o phi`.
    pub fn compose(&self, phi: &[TruncPoly]) -> Result<PolyMatrix, ContactError> {
        let entries = self.entries.iter().map(|p| p.compose(phi)).collect::<Result<Vec<_>, _>>()?;
        Ok(PolyMatrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, entries })
    }

    /// Inverse of a square matrix that is invertible at the origin.
    pub fn inverse(&self) -> Result<PolyMatrix, ContactError> {
        let n = self.rows;
        if n != self.cols {
            return Err(ContactError::SpecMismatch("inverse of a non-square matrix".into()));
        }
        let c0 = self.constant_part();
        let c0_inv = c0.inverse().ok_or(ContactError::NotAUnit)?;
        let c0_inv = PolyMatrix::from_constant(&self.ring, &c0_inv);
        // self = C0 (1 + X) with X in m; (1 + X)^-1 = sum (-X)^k, and X^(beta+1) = 0
        let x = c0_inv.mul(self)?.sub(&PolyMatrix::identity(&self.ring, n))?;
        let minus_x = PolyMatrix::zeros(&self.ring, n, n).sub(&x)?;
        let mut acc = PolyMatrix::identity(&self.ring, n);
        let mut power = PolyMatrix::identity(&self.ring, n);
        for _ in 0..self.ring.beta() {
            power = power.mul(&minus_x)?;
            acc = acc.add(&power)?;
        }
        acc.mul(&c0_inv)
    }
}

/// Jacobian matrix `(d phi_i / d x_j)(0)` of a substitution.
pub fn linear_part(ring: &Ring, phi: &[TruncPoly]) -> Matrix {
    let k = ring.field();
    let n = ring.nvars();
    let mut m = Matrix::zeros(k, phi.len(), n);
    for (i, p) in phi.iter().enumerate() {
        for j in 0..n {
            let mut e = vec![0u32; n];
            e[j] = 1;
            m.set(i, j, p.coeff_of(&e));
        }
    }
    m
}

/// Composition of substitutions: `(phi o psi)_i = phi_i(psi)`.
pub fn compose_maps(phi: &[TruncPoly], psi: &[TruncPoly]) -> Result<Vec<TruncPoly>, TruncError> {
    phi.iter().map(|p| p.compose(psi)).collect()
}

pub fn identity_map(ring: &Ring) -> Vec<TruncPoly> {
    (0..ring.nvars()).map(|j| TruncPoly::var(ring, j)).collect()
}

/// Checks that `phi` is an automorphism of `O_{N,beta}`.
pub fn check_automorphism(ring: &Ring, phi: &[TruncPoly]) -> Result<(), ContactError> {
    if phi.len() != ring.nvars() {
        return Err(ContactError::SpecMismatch(format!(
            "automorphism has {} components, ring has {} variables",
            phi.len(),
            ring.nvars()
        )));
    }
    for (i, p) in phi.iter().enumerate() {
        if p.ring() != ring {
            return Err(ContactError::SpecMismatch("automorphism over another ring".into()));
        }
        if !ring.field().is_zero(p.constant_term()) {
            return Err(ContactError::NotOriginPreserving(i));
        }
    }
    if ring.beta() >= 1 && linear_part(ring, phi).rank() < ring.nvars() {
        return Err(ContactError::SingularJacobian);
    }
    Ok(())
}

/// Formal inverse of an automorphism: `psi` with `phi o psi = id`.
pub fn invert_map(ring: &Ring, phi: &[TruncPoly]) -> Result<Vec<TruncPoly>, ContactError> {
    check_automorphism(ring, phi)?;
    if ring.beta() == 0 {
        return Ok(phi.to_vec());
    }
    let lin = linear_part(ring, phi);
    let lin_inv = PolyMatrix::from_constant(ring, &lin.inverse().ok_or(ContactError::SingularJacobian)?);
    let x = identity_map(ring);
    let higher: Vec<TruncPoly> = phi.iter().map(|p| p - &p.homogeneous_part(1)).collect();
    // psi = L^-1 (x - phi_{>=2}(psi)); pass k makes psi correct through degree k
    let mut psi = lin_inv.apply(&x)?;
    for _ in 1..ring.beta() {
        let h = compose_maps(&higher, &psi)?;
        let rhs: Vec<TruncPoly> = x.iter().zip(&h).map(|(a, b)| a - b).collect();
        psi = lin_inv.apply(&rhs)?;
    }
    Ok(psi)
}

/// An element `(M, phi)` of `K_beta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContactElement {
    m: PolyMatrix,
    phi: Vec<TruncPoly>,
}

impl ContactElement {
    /// Validates `det M(0) != 0`, `phi(0) = 0` and `det (d phi / dx)(0) != 0`.
    pub fn new(m: PolyMatrix, phi: Vec<TruncPoly>) -> Result<Self, ContactError> {
        if m.rows() != m.cols() {
            return Err(ContactError::SpecMismatch("M must be square".into()));
        }
        check_automorphism(m.ring(), &phi)?;
        if m.rows() > 0 && m.constant_part().rank() < m.rows() {
            return Err(ContactError::NotAUnit);
        }
        Ok(ContactElement { m, phi })
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        ContactElement { m: PolyMatrix::identity(ring, n), phi: identity_map(ring) }
    }

    /// `(1, phi)`.
    pub fn from_automorphism(ring: &Ring, n: usize, phi: Vec<TruncPoly>) -> Result<Self, ContactError> {
        Self::new(PolyMatrix::identity(ring, n), phi)
    }

    pub fn ring(&self) -> &Ring {
        self.m.ring()
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.m
    }

    pub fn phi(&self) -> &[TruncPoly] {
        &self.phi
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.ring(), self.n())
    }

    /// `M * (f o phi)`.
    pub fn act(&self, f: &PolySystem) -> Result<PolySystem, ContactError> {
        if f.ring() != self.ring() || f.len() != self.n() {
            return Err(ContactError::SpecMismatch(format!(
                "element for n = {} over {:?}, system of length {} over {:?}",
                self.n(),
                self.ring(),
                f.len(),
                f.ring()
            )));
        }
        let composed = f.compose(&self.phi)?;
        let polys = self.m.apply(composed.polys())?;
        Ok(PolySystem::new(self.ring(), polys)?)
    }

    /// `self * other = (M_self (M_other o phi_self), phi_other o phi_self)`,
    /// so that acting by the product equals acting by `other` then `self`.
    pub fn group_mul(&self, other: &ContactElement) -> Result<ContactElement, ContactError> {
        if self.ring() != other.ring() || self.n() != other.n() {
            return Err(ContactError::SpecMismatch("group elements of different shapes".into()));
        }
        let m = self.m.mul(&other.m.compose(&self.phi)?)?;
        let phi = compose_maps(&other.phi, &self.phi)?;
        Ok(ContactElement { m, phi })
    }

    pub fn invert(&self) -> Result<ContactElement, ContactError> {
        let psi = invert_map(self.ring(), &self.phi)?;
        let m = self.m.compose(&psi)?.inverse()?;
        Ok(ContactElement { m, phi: psi })
    }
}

/// A matrix `C` with `C(1 - AB) + B` invertible, following the rank
/// factorisation of `B`.
pub fn mather_complement(a: &Matrix, b: &Matrix) -> Result<Matrix, ContactError> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n || b.cols() != n {
        return Err(ContactError::SpecMismatch("A and B must be square of equal size".into()));
    }
    let k = a.field();
    let mut reduced = b.clone();
    let pivots = reduced.rref();
    let r = pivots.len();
    // e_1..e_r: unit vectors at pivot columns (B e_i independent); e_{r+1}..: ker B
    let mut e_cols: Vec<Vec<Scalar>> = pivots
        .iter()
        .map(|&p| (0..n).map(|i| if i == p { k.one() } else { k.zero() }).collect())
        .collect();
    e_cols.extend(b.kernel());
    // e'_{r+1}..e'_n: unit vectors completing B e_1..B e_r to a basis
    let mut span = Subspace::from_vectors(k, n, pivots.iter().map(|&p| (0..n).map(|i| b.get(i, p).clone()).collect()).collect())
        .expect("dimensions agree");
    let mut e_prime = Vec::new();
    for j in 0..n {
        if span.dim() == n {
            break;
        }
        let unit: Vec<Scalar> = (0..n).map(|i| if i == j { k.one() } else { k.zero() }).collect();
        if !span.contains_vector(&unit) {
            span = span.sum(&Subspace::from_vectors(k, n, vec![unit.clone()]).expect("length n")).expect("same ambient");
            e_prime.push(unit);
        }
    }
    let mut e = Matrix::zeros(k, n, n);
    let mut image = Matrix::zeros(k, n, n);
    for (col, v) in e_cols.iter().enumerate() {
        for i in 0..n {
            e.set(i, col, v[i].clone());
        }
    }
    for (offset, v) in e_prime.iter().enumerate() {
        for i in 0..n {
            image.set(i, r + offset, v[i].clone());
        }
    }
    let c = image.mul(&e.inverse().expect("e is a basis")).expect("square");
    let d = c.mul(&Matrix::identity(k, n).sub(&a.mul(b).expect("square"))).expect("square").add(b);
    assert!(!k.is_zero(&d.determinant().expect("square")), "complement must make C(1-AB)+B invertible");
    Ok(c)
}

/// Builds `(D, phi)` with `D = C(1 - AB) + B` from cofactors satisfying
/// `A (f o phi) = f(x + a)` and `B f(x + a) = f o phi`; then
/// `D f(x + a) = f o phi`.
pub fn witness_from_cofactors(
    f: &PolySystem,
    a: &[Scalar],
    a_mat: &PolyMatrix,
    b_mat: &PolyMatrix,
    phi: &[TruncPoly],
) -> Result<ContactElement, ContactError> {
    let ring = f.ring();
    check_automorphism(ring, phi)?;
    let shifted = f.taylor_shift(a)?;
    let composed = f.compose(phi)?;
    if a_mat.apply(composed.polys())? != shifted.polys() {
        return Err(ContactError::PreconditionFailed("A (f o phi) != f(x + a)".into()));
    }
    if b_mat.apply(shifted.polys())? != composed.polys() {
        return Err(ContactError::PreconditionFailed("B f(x + a) != f o phi".into()));
    }
    let c = mather_complement(&a_mat.constant_part(), &b_mat.constant_part())?;
    let n = f.len();
    let c = PolyMatrix::from_constant(ring, &c);
    let d = c.mul(&PolyMatrix::identity(ring, n).sub(&a_mat.mul(b_mat)?)?)?.add(b_mat)?;
    debug_assert_eq!(d.apply(shifted.polys())?, composed.polys());
    ContactElement::new(d, phi.to_vec())
}

/// The element `(D^-1, phi)` carrying the jet at the origin to the jet at
/// `a`, given the output `(D, phi)` of [`witness_from_cofactors`].
pub fn shift_witness(cofactor_witness: &ContactElement) -> Result<ContactElement, ContactError> {
    ContactElement::new(cofactor_witness.matrix().inverse()?, cofactor_witness.phi().to_vec())
}

/// Checks that every entry of `f` vanishes at `a`.
pub fn check_on_variety(f: &PolySystem, a: &[Scalar]) -> Result<(), ContactError> {
    if !f.vanishes_at(a)? {
        let k = f.field();
        let shown: Vec<String> = a.iter().map(|c| k.format(c)).collect();
        return Err(ContactError::PointNotOnVariety(format!("({})", shown.join(", "))));
    }
    Ok(())
}

/// True iff `g . f(x + a1) = f(x + a2)` exactly in `O_{N,beta}`.
pub fn verify_equivalence_witness(
    f: &PolySystem,
    a1: &[Scalar],
    a2: &[Scalar],
    g: &ContactElement,
) -> Result<bool, ContactError> {
    check_on_variety(f, a1)?;
    check_on_variety(f, a2)?;
    let source = f.taylor_shift(a1)?;
    let target = f.taylor_shift(a2)?;
    Ok(g.act(&source)? == target)
}
