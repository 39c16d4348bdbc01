//! Dense exact linear algebra over a [`Field`].
//!
//! Elimination always pivots on the first nonzero entry (rows scanned top to
//! bottom, columns left to right), so echelon forms and kernel bases are
//! reproducible bit for bit.

use thiserror::Error;

use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from rows of length `cols`.
    pub fn from_rows(field: &Field, cols: usize, rows: Vec<Vec<Scalar>>) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {i} has length {}, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r);
        }
        Ok(Matrix { field: field.clone(), rows: n, cols, data })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let k = &self.field;
        let mut out = Matrix::zeros(k, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if k.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if k.is_zero(b) {
                        continue;
                    }
                    let v = k.add(out.get(i, j), &k.mul(a, b));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(&self.field, self.row(i), v)).collect())
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let k = &self.field;
        Matrix {
            field: k.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| k.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let k = &self.field;
        Matrix {
            field: k.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| k.sub(a, b)).collect(),
        }
    }

    /// Reduces to reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        self.rref_limited(self.cols)
    }

    /// Like [`Matrix::rref`] but only pivots in the first `limit` columns;
    /// the remaining columns are carried along (augmented part).
    pub fn rref_limited(&mut self, limit: usize) -> Vec<usize> {
        let k = self.field.clone();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit.min(cols) {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !k.is_zero(self.get(i, c))) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = k.inv(self.get(r, c)).expect("pivot is nonzero");
            if !k.is_one(&inv) {
                for j in c..cols {
                    let v = k.mul(self.get(r, j), &inv);
                    self.set(r, j, v);
                }
            }
            let pivot_row: Vec<Scalar> = self.row(r)[c..].to_vec();
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c).clone();
                if k.is_zero(&factor) {
                    continue;
                }
                for (off, pv) in pivot_row.iter().enumerate() {
                    if k.is_zero(pv) {
                        continue;
                    }
                    let j = c + off;
                    let v = k.sub(self.get(i, j), &k.mul(&factor, pv));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right null space `{x : A x = 0}`, one vector per free
    /// column in increasing column order.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let mut r = self.clone();
        let pivots = r.rref();
        kernel_from_rref(&r, &pivots, r.cols)
    }

    /// Basis of the left null space `{y : y A = 0}`.
    pub fn left_kernel(&self) -> Vec<Vec<Scalar>> {
        self.transpose().kernel()
    }

    pub fn determinant(&self) -> Result<Scalar, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let k = self.field.clone();
        let n = self.rows;
        let mut m = self.clone();
        let mut det = k.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !k.is_zero(m.get(i, c))) else {
                return Ok(k.zero());
            };
            if pr != c {
                for j in 0..n {
                    m.data.swap(pr * n + j, c * n + j);
                }
                det = k.neg(&det);
            }
            let piv = m.get(c, c).clone();
            det = k.mul(&det, &piv);
            let inv = k.inv(&piv).expect("nonzero pivot");
            for i in c + 1..n {
                let factor = k.mul(m.get(i, c), &inv);
                if k.is_zero(&factor) {
                    continue;
                }
                for j in c..n {
                    let v = k.sub(m.get(i, j), &k.mul(&factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let k = &self.field;
        let mut aug = Matrix::zeros(k, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, k.one());
        }
        let pivots = aug.rref_limited(n);
        if pivots.len() < n {
            return None;
        }
        let mut inv = Matrix::zeros(k, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(inv)
    }
}

pub(crate) fn dot(k: &Field, a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = k.zero();
    for (x, y) in a.iter().zip(b) {
        if k.is_zero(x) || k.is_zero(y) {
            continue;
        }
        acc = k.add(&acc, &k.mul(x, y));
    }
    acc
}

/// Kernel of the first `ncols` columns of an echelon matrix.
fn kernel_from_rref(r: &Matrix, pivots: &[usize], ncols: usize) -> Vec<Vec<Scalar>> {
    let k = &r.field;
    let mut is_pivot = vec![None; ncols];
    for (row, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(row);
    }
    (0..ncols)
        .filter(|&c| is_pivot[c].is_none())
        .map(|free| {
            let mut v = vec![k.zero(); ncols];
            v[free] = k.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = k.neg(r.get(row, free));
            }
            v
        })
        .collect()
}

/// Outcome of [`solve_linear`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    /// A particular solution (free variables set to zero) and the kernel.
    Solved { x: Vec<Scalar>, kernel: Subspace },
    /// `certificate` is a left null vector `y` with `y A = 0`, `y b != 0`,
    /// normalised so its first nonzero entry is 1.
    Infeasible { certificate: Vec<Scalar> },
}

impl LinearSolution {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LinearSolution::Solved { .. })
    }
}

/// Solves `A x = b` exactly.
pub fn solve_linear(a: &Matrix, b: &[Scalar]) -> Result<LinearSolution, LinalgError> {
    if b.len() != a.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows
        )));
    }
    let k = a.field.clone();
    let n = a.cols;
    let mut aug = Matrix::zeros(&k, a.rows, n + 1);
    for i in 0..a.rows {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n, b[i].clone());
    }
    let pivots = aug.rref_limited(n);
    let inconsistent = (pivots.len()..a.rows).any(|i| !k.is_zero(aug.get(i, n)));
    if inconsistent {
        let certificate = a
            .left_kernel()
            .into_iter()
            .find(|y| !k.is_zero(&dot(&k, y, b)))
            .map(|y| normalise(&k, y))
            .expect("an inconsistent system has a separating left null vector");
        return Ok(LinearSolution::Infeasible { certificate });
    }
    let mut x = vec![k.zero(); n];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = aug.get(row, n).clone();
    }
    let kernel_vectors = kernel_from_rref(&aug, &pivots, n);
    let kernel = Subspace::from_vectors(&k, n, kernel_vectors).expect("lengths agree");
    Ok(LinearSolution::Solved { x, kernel })
}

fn normalise(k: &Field, mut v: Vec<Scalar>) -> Vec<Scalar> {
    if let Some(lead) = v.iter().find(|s| !k.is_zero(s)).cloned() {
        let inv = k.inv(&lead).expect("nonzero");
        for s in v.iter_mut() {
            *s = k.mul(s, &inv);
        }
    }
    v
}

/// A linear subspace of `k^n`, stored as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceOp {
    Sum,
    Intersect,
    Contains,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubspaceResult {
    Space(Subspace),
    Bool(bool),
}

impl Subspace {
    pub fn zero(field: &Field, ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zeros(field, 0, ambient), pivots: Vec::new() }
    }

    pub fn full(field: &Field, ambient: usize) -> Self {
        Self::from_matrix(Matrix::identity(field, ambient))
    }

    pub fn from_vectors(field: &Field, ambient: usize, vectors: Vec<Vec<Scalar>>) -> Result<Self, LinalgError> {
        let m = Matrix::from_rows(field, ambient, vectors)?;
        Ok(Self::from_matrix(m))
    }

    /// Row space of `m`.
    pub fn from_matrix(mut m: Matrix) -> Self {
        let pivots = m.rref();
        let r = pivots.len();
        m.data.truncate(r * m.cols);
        m.rows = r;
        Subspace { ambient: m.cols, basis: m, pivots }
    }

    pub fn field(&self) -> &Field {
        &self.basis.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }

    /// Reduced row echelon basis.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Normal form of `v` modulo the subspace (pivot coordinates cleared).
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let k = self.field();
        let mut out = v.to_vec();
        for (row, &c) in self.pivots.iter().enumerate() {
            let factor = out[c].clone();
            if k.is_zero(&factor) {
                continue;
            }
            for (j, b) in self.basis.row(row).iter().enumerate() {
                if !k.is_zero(b) {
                    out[j] = k.sub(&out[j], &k.mul(&factor, b));
                }
            }
        }
        out
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> bool {
        let k = self.field();
        v.len() == self.ambient && self.reduce(v).iter().all(|s| k.is_zero(s))
    }

    fn same_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::DimensionMismatch(format!(
                "ambient dimensions {} and {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.same_ambient(other)?;
        let mut rows = self.basis.row_vecs();
        rows.extend(other.basis.row_vecs());
        Subspace::from_vectors(self.field(), self.ambient, rows)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.same_ambient(other)?;
        let k = self.field().clone();
        let (du, dv) = (self.dim(), other.dim());
        // columns u_1..u_du, -v_1..-v_dv
        let mut m = Matrix::zeros(&k, self.ambient, du + dv);
        for i in 0..du {
            for (j, s) in self.basis.row(i).iter().enumerate() {
                m.set(j, i, s.clone());
            }
        }
        for i in 0..dv {
            for (j, s) in other.basis.row(i).iter().enumerate() {
                m.set(j, du + i, k.neg(s));
            }
        }
        let vectors = m
            .kernel()
            .into_iter()
            .map(|coeffs| {
                let mut w = vec![k.zero(); self.ambient];
                for (i, c) in coeffs[..du].iter().enumerate() {
                    if k.is_zero(c) {
                        continue;
                    }
                    for (j, s) in self.basis.row(i).iter().enumerate() {
                        w[j] = k.add(&w[j], &k.mul(c, s));
                    }
                }
                w
            })
            .collect();
        Subspace::from_vectors(&k, self.ambient, vectors)
    }

    /// True when every basis vector of `other` lies in `self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.same_ambient(other)?;
        Ok((0..other.dim()).all(|i| self.contains_vector(other.basis.row(i))))
    }

    pub fn apply(&self, other: &Subspace, op: SubspaceOp) -> Result<SubspaceResult, LinalgError> {
        Ok(match op {
            SubspaceOp::Sum => SubspaceResult::Space(self.sum(other)?),
            SubspaceOp::Intersect => SubspaceResult::Space(self.intersect(other)?),
            SubspaceOp::Contains => SubspaceResult::Bool(self.contains(other)?),
        })
    }

    /// Coordinates that are not pivots; the corresponding unit vectors span
    /// a complement.
    pub fn complement_coordinates(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.ambient).filter(|&c| !is_pivot[c]).collect()
    }
}
