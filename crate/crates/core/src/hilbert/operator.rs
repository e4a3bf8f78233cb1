// Copyright 2026 The multisuccessor Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::{HilbertError, SparseVec, State, DENSE_CAP, MAX_DIM};
use crate::scalar::Real;

/// Linear operator on a power-of-two dimensional space.
///
/// Leaves are dense matrices, diagonals, phased permutations and sparse
/// column maps; the factored forms (Kronecker product, composition, sum,
/// scalar multiple) stay lazy and are only ever applied to vectors. Cloning
/// is cheap, children are shared.
#[derive(Clone, Debug)]
pub struct Operator<T> {
    dim: usize,
    repr: Repr<T>,
}

#[derive(Clone, Debug)]
enum Repr<T> {
    Identity,
    /// Row-major `dim × dim`.
    Dense(Arc<Vec<Complex<T>>>),
    Diagonal(Arc<Vec<Complex<T>>>),
    /// `op·e_i = phases[i]·e_{image[i]}`, `image` a bijection.
    Permutation { image: Arc<Vec<usize>>, phases: Arc<Vec<Complex<T>>> },
    /// Column `j` lists the nonzero entries `(row, value)` of `op·e_j`.
    Columns(Arc<Vec<Vec<(usize, Complex<T>)>>>),
    /// High-order factor first.
    Kron(Arc<Operator<T>>, Arc<Operator<T>>),
    /// Matrix order: `factors[0]·factors[1]·…`, the last factor acts first.
    Product(Arc<Vec<Operator<T>>>),
    Sum(Arc<Vec<Operator<T>>>),
    Scaled(Complex<T>, Arc<Operator<T>>),
}

/// Coarse description of an operator's top-level representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReprKind {
    Identity,
    Dense,
    Diagonal,
    Permutation,
    Columns,
    Factored,
}

fn check_dim(dim: usize) -> Result<(), HilbertError> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(HilbertError::NotPowerOfTwo(dim));
    }
    if dim > MAX_DIM {
        return Err(HilbertError::TooLarge(dim));
    }
    Ok(())
}

impl<T: Real> Operator<T> {
    pub fn identity(dim: usize) -> Result<Self, HilbertError> {
        check_dim(dim)?;
        Ok(Operator { dim, repr: Repr::Identity })
    }

    /// Row-major dense matrix.
    pub fn dense(dim: usize, entries: Vec<Complex<T>>) -> Result<Self, HilbertError> {
        check_dim(dim)?;
        if dim > DENSE_CAP {
            return Err(HilbertError::TooLarge(dim));
        }
        if entries.len() != dim * dim {
            return Err(HilbertError::DimensionMismatch(entries.len(), dim * dim));
        }
        if let Some(i) = entries.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(HilbertError::NonFinite(i));
        }
        Ok(Operator { dim, repr: Repr::Dense(Arc::new(entries)) })
    }

    pub fn diagonal(entries: Vec<Complex<T>>) -> Result<Self, HilbertError> {
        check_dim(entries.len())?;
        Ok(Operator { dim: entries.len(), repr: Repr::Diagonal(Arc::new(entries)) })
    }

    /// Diagonal 0/1 projection onto the basis indices selected by `keep`.
    pub fn basis_projection(dim: usize, keep: impl Fn(usize) -> bool) -> Result<Self, HilbertError> {
        let diag = (0..dim)
            .map(|i| if keep(i) { Complex::one() } else { Complex::zero() })
            .collect();
        Self::diagonal(diag)
    }

    /// Phased permutation `e_i ↦ phases[i]·e_{image[i]}`.
    pub fn permutation(image: Vec<usize>, phases: Vec<Complex<T>>) -> Result<Self, HilbertError> {
        let dim = image.len();
        check_dim(dim)?;
        if phases.len() != dim {
            return Err(HilbertError::DimensionMismatch(phases.len(), dim));
        }
        let mut seen = vec![false; dim];
        for &j in &image {
            if j >= dim || std::mem::replace(&mut seen[j], true) {
                return Err(HilbertError::NotBijective);
            }
        }
        let tol = T::default_tol();
        if phases.iter().any(|p| (p.norm() - T::one()).abs() > tol) {
            return Err(HilbertError::NotUnitModulus);
        }
        Ok(Operator { dim, repr: Repr::Permutation { image: Arc::new(image), phases: Arc::new(phases) } })
    }

    /// Phase-free permutation from an index map.
    pub fn index_permutation(image: Vec<usize>) -> Result<Self, HilbertError> {
        let phases = vec![Complex::one(); image.len()];
        Self::permutation(image, phases)
    }

    /// Basis map `e_i ↦ e_{image[i]}` that need not be injective.
    pub fn index_map(image: Vec<usize>) -> Result<Self, HilbertError> {
        let dim = image.len();
        check_dim(dim)?;
        if image.iter().any(|&j| j >= dim) {
            return Err(HilbertError::IndexOutOfRange { index: dim, dim });
        }
        let cols = image.into_iter().map(|j| vec![(j, Complex::one())]).collect();
        Ok(Operator { dim, repr: Repr::Columns(Arc::new(cols)) })
    }

    /// Operator given by its sparse columns.
    pub fn from_columns(columns: Vec<Vec<(usize, Complex<T>)>>) -> Result<Self, HilbertError> {
        let dim = columns.len();
        check_dim(dim)?;
        if columns.iter().flatten().any(|e| e.0 >= dim) {
            return Err(HilbertError::IndexOutOfRange { index: dim, dim });
        }
        Ok(Operator { dim, repr: Repr::Columns(Arc::new(columns)) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> ReprKind {
        match self.repr {
            Repr::Identity => ReprKind::Identity,
            Repr::Dense(_) => ReprKind::Dense,
            Repr::Diagonal(_) => ReprKind::Diagonal,
            Repr::Permutation { .. } => ReprKind::Permutation,
            Repr::Columns(_) => ReprKind::Columns,
            _ => ReprKind::Factored,
        }
    }

    /// `self·other`: `other` acts first.
    pub fn compose(&self, other: &Self) -> Result<Self, HilbertError> {
        if self.dim != other.dim {
            return Err(HilbertError::DimensionMismatch(self.dim, other.dim));
        }
        Self::product(vec![self.clone(), other.clone()])
    }

    /// Composition in matrix order: the last factor acts first.
    pub fn product(factors: Vec<Self>) -> Result<Self, HilbertError> {
        let dim = factors.first().ok_or(HilbertError::Empty)?.dim;
        if let Some(f) = factors.iter().find(|f| f.dim != dim) {
            return Err(HilbertError::DimensionMismatch(dim, f.dim));
        }
        let mut flat = Vec::with_capacity(factors.len());
        for f in factors {
            match f.repr {
                Repr::Identity => {}
                Repr::Product(inner) => flat.extend(inner.iter().cloned()),
                _ => flat.push(f),
            }
        }
        if flat.is_empty() {
            return Self::identity(dim);
        }
        if flat.len() == 1 {
            return Ok(flat.pop().unwrap());
        }
        Ok(Operator { dim, repr: Repr::Product(Arc::new(flat)) })
    }

    pub fn sum(terms: Vec<Self>) -> Result<Self, HilbertError> {
        let dim = terms.first().ok_or(HilbertError::Empty)?.dim;
        if let Some(t) = terms.iter().find(|t| t.dim != dim) {
            return Err(HilbertError::DimensionMismatch(dim, t.dim));
        }
        Ok(Operator { dim, repr: Repr::Sum(Arc::new(terms)) })
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Operator { dim: self.dim, repr: Repr::Scaled(c, Arc::new(self.clone())) }
    }

    /// `identity − self`.
    pub fn complement(&self) -> Result<Self, HilbertError> {
        Self::sum(vec![Self::identity(self.dim)?, self.scaled(-Complex::<T>::one())])
    }

    /// Kronecker product with `self` as the high-order index block.
    pub fn tensor(&self, other: &Self) -> Result<Self, HilbertError> {
        let dim = self.dim.checked_mul(other.dim).ok_or(HilbertError::TooLarge(usize::MAX))?;
        check_dim(dim)?;
        if matches!(self.repr, Repr::Identity) && matches!(other.repr, Repr::Identity) {
            return Self::identity(dim);
        }
        Ok(Operator { dim, repr: Repr::Kron(Arc::new(self.clone()), Arc::new(other.clone())) })
    }

    /// Tensor product of a list of factors, leftmost is the high-order block.
    pub fn tensor_all(factors: &[Self]) -> Result<Self, HilbertError> {
        let (first, rest) = factors.split_first().ok_or(HilbertError::Empty)?;
        rest.iter().try_fold(first.clone(), |acc, f| acc.tensor(f))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let dim = self.dim;
        let repr = match &self.repr {
            Repr::Identity => Repr::Identity,
            Repr::Dense(m) => {
                let mut out = vec![Complex::zero(); dim * dim];
                for r in 0..dim {
                    for c in 0..dim {
                        out[c * dim + r] = m[r * dim + c].conj();
                    }
                }
                Repr::Dense(Arc::new(out))
            }
            Repr::Diagonal(d) => Repr::Diagonal(Arc::new(d.iter().map(|x| x.conj()).collect())),
            Repr::Permutation { image, phases } => {
                let mut inv = vec![0; dim];
                let mut ph = vec![Complex::zero(); dim];
                for (i, &j) in image.iter().enumerate() {
                    inv[j] = i;
                    ph[j] = phases[i].conj();
                }
                Repr::Permutation { image: Arc::new(inv), phases: Arc::new(ph) }
            }
            Repr::Columns(cols) => {
                let mut out = vec![Vec::new(); dim];
                for (j, col) in cols.iter().enumerate() {
                    for &(i, v) in col {
                        out[i].push((j, v.conj()));
                    }
                }
                Repr::Columns(Arc::new(out))
            }
            Repr::Kron(a, b) => Repr::Kron(Arc::new(a.adjoint()), Arc::new(b.adjoint())),
            Repr::Product(fs) => Repr::Product(Arc::new(fs.iter().rev().map(|f| f.adjoint()).collect())),
            Repr::Sum(ts) => Repr::Sum(Arc::new(ts.iter().map(|t| t.adjoint()).collect())),
            Repr::Scaled(c, op) => Repr::Scaled(c.conj(), Arc::new(op.adjoint())),
        };
        Operator { dim, repr }
    }

    /// `self·other·self†`.
    pub fn conjugate(&self, other: &Self) -> Result<Self, HilbertError> {
        Self::product(vec![self.clone(), other.clone(), self.adjoint()])
    }

    pub fn apply(&self, s: &State<T>) -> Result<State<T>, HilbertError> {
        if s.dim() != self.dim {
            return Err(HilbertError::DimensionMismatch(self.dim, s.dim()));
        }
        Ok(State::from_sparse_vec(&self.apply_sparse(&s.to_sparse())))
    }

    pub fn try_apply_sparse(&self, x: &SparseVec<T>) -> Result<SparseVec<T>, HilbertError> {
        if x.dim() != self.dim {
            return Err(HilbertError::DimensionMismatch(self.dim, x.dim()));
        }
        Ok(self.apply_sparse(x))
    }

    /// `self·e_index` as a sparse vector.
    pub fn column(&self, index: usize) -> SparseVec<T> {
        self.apply_sparse(&SparseVec::basis(self.dim, index))
    }

    /// Applies to a sparse vector; panics on a dimension mismatch.
    pub fn apply_sparse(&self, x: &SparseVec<T>) -> SparseVec<T> {
        assert_eq!(x.dim(), self.dim, "operator/vector dimension mismatch");
        let dim = self.dim;
        match &self.repr {
            Repr::Identity => x.clone(),
            Repr::Dense(m) => {
                let mut acc = vec![Complex::<T>::zero(); dim];
                for &(j, xj) in x.entries() {
                    for (i, slot) in acc.iter_mut().enumerate() {
                        *slot += m[i * dim + j] * xj;
                    }
                }
                SparseVec::from_entries(dim, acc.into_iter().enumerate().collect())
            }
            Repr::Diagonal(d) => {
                SparseVec::from_entries(dim, x.entries().iter().map(|&(i, a)| (i, d[i] * a)).collect())
            }
            Repr::Permutation { image, phases } => SparseVec::from_entries(
                dim,
                x.entries().iter().map(|&(i, a)| (image[i], phases[i] * a)).collect(),
            ),
            Repr::Columns(cols) => {
                let mut out = Vec::new();
                for &(j, a) in x.entries() {
                    out.extend(cols[j].iter().map(|&(i, v)| (i, v * a)));
                }
                SparseVec::from_entries(dim, out)
            }
            Repr::Kron(a, b) => apply_kron(a, b, x),
            Repr::Product(fs) => {
                let mut v = x.clone();
                for f in fs.iter().rev() {
                    v = f.apply_sparse(&v);
                    if v.nnz() == 0 {
                        break;
                    }
                }
                v
            }
            Repr::Sum(ts) => {
                let mut out = Vec::new();
                for t in ts.iter() {
                    out.extend(t.apply_sparse(x).into_entries());
                }
                SparseVec::from_entries(dim, out)
            }
            Repr::Scaled(c, op) => op.apply_sparse(x).scale(*c),
        }
    }

    /// Dense matrix built column by column through [`Operator::apply_sparse`].
    pub fn to_dense(&self) -> Result<Vec<Complex<T>>, HilbertError> {
        if self.dim > DENSE_CAP {
            return Err(HilbertError::TooLarge(self.dim));
        }
        let dim = self.dim;
        let mut out = vec![Complex::zero(); dim * dim];
        for j in 0..dim {
            for &(i, v) in self.column(j).entries() {
                out[i * dim + j] = v;
            }
        }
        Ok(out)
    }

    /// Dense matrix built structurally: leaves are expanded and combined with
    /// dense matrix products, Kronecker products and sums. Independent of the
    /// sparse application path, so the two can cross-check each other.
    pub fn dense_reference(&self) -> Result<Vec<Complex<T>>, HilbertError> {
        if self.dim > DENSE_CAP {
            return Err(HilbertError::TooLarge(self.dim));
        }
        let dim = self.dim;
        Ok(match &self.repr {
            Repr::Identity => {
                let mut m = vec![Complex::zero(); dim * dim];
                for i in 0..dim {
                    m[i * dim + i] = Complex::one();
                }
                m
            }
            Repr::Dense(m) => m.as_ref().clone(),
            Repr::Diagonal(d) => {
                let mut m = vec![Complex::zero(); dim * dim];
                for i in 0..dim {
                    m[i * dim + i] = d[i];
                }
                m
            }
            Repr::Permutation { image, phases } => {
                let mut m = vec![Complex::zero(); dim * dim];
                for (j, &i) in image.iter().enumerate() {
                    m[i * dim + j] = phases[j];
                }
                m
            }
            Repr::Columns(cols) => {
                let mut m = vec![Complex::zero(); dim * dim];
                for (j, col) in cols.iter().enumerate() {
                    for &(i, v) in col {
                        m[i * dim + j] += v;
                    }
                }
                m
            }
            Repr::Kron(a, b) => {
                let (ma, mb) = (a.dense_reference()?, b.dense_reference()?);
                let (da, db) = (a.dim, b.dim);
                let mut m = vec![Complex::zero(); dim * dim];
                for ra in 0..da {
                    for ca in 0..da {
                        let x = ma[ra * da + ca];
                        if x.is_zero() {
                            continue;
                        }
                        for rb in 0..db {
                            for cb in 0..db {
                                m[(ra * db + rb) * dim + ca * db + cb] = x * mb[rb * db + cb];
                            }
                        }
                    }
                }
                m
            }
            Repr::Product(fs) => {
                let mut acc = fs[0].dense_reference()?;
                for f in &fs[1..] {
                    acc = matmul(&acc, &f.dense_reference()?, dim);
                }
                acc
            }
            Repr::Sum(ts) => {
                let mut acc = vec![Complex::zero(); dim * dim];
                for t in ts.iter() {
                    for (a, b) in acc.iter_mut().zip(t.dense_reference()?) {
                        *a += b;
                    }
                }
                acc
            }
            Repr::Scaled(c, op) => op.dense_reference()?.into_iter().map(|v| v * c).collect(),
        })
    }

    /// Dense copy of this operator as a single leaf.
    pub fn materialize(&self) -> Result<Self, HilbertError> {
        Self::dense(self.dim, self.to_dense()?)
    }
}

fn matmul<T: Real>(a: &[Complex<T>], b: &[Complex<T>], dim: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let x = a[i * dim + k];
            if x.is_zero() {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += x * b[k * dim + j];
            }
        }
    }
    out
}

// Reshape x as a (da × db) array, apply b along rows then a along columns.
fn apply_kron<T: Real>(a: &Operator<T>, b: &Operator<T>, x: &SparseVec<T>) -> SparseVec<T> {
    let (da, db) = (a.dim, b.dim);
    let dim = da * db;
    let mut staged: Vec<(usize, usize, Complex<T>)> = Vec::with_capacity(x.nnz());
    if matches!(b.repr, Repr::Identity) {
        staged.extend(x.entries().iter().map(|&(i, v)| (i % db, i / db, v)));
    } else {
        let entries = x.entries();
        let mut start = 0;
        while start < entries.len() {
            let row = entries[start].0 / db;
            let mut end = start;
            while end < entries.len() && entries[end].0 / db == row {
                end += 1;
            }
            let sub = SparseVec::from_entries(db, entries[start..end].iter().map(|&(i, v)| (i % db, v)).collect());
            for &(c, v) in b.apply_sparse(&sub).entries() {
                staged.push((c, row, v));
            }
            start = end;
        }
    }
    if matches!(a.repr, Repr::Identity) {
        return SparseVec::from_entries(dim, staged.into_iter().map(|(c, r, v)| (r * db + c, v)).collect());
    }
    staged.sort_by_key(|e| (e.0, e.1));
    let mut out = Vec::with_capacity(staged.len());
    let mut start = 0;
    while start < staged.len() {
        let col = staged[start].0;
        let mut end = start;
        while end < staged.len() && staged[end].0 == col {
            end += 1;
        }
        let sub = SparseVec::from_entries(da, staged[start..end].iter().map(|&(_, r, v)| (r, v)).collect());
        out.extend(a.apply_sparse(&sub).entries().iter().map(|&(r, v)| (r * db + col, v)));
        start = end;
    }
    SparseVec::from_entries(dim, out)
}
