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

//! Finite-dimensional complex linear algebra: states, operators, tensor
//! composition, and the structural predicates the model checks rely on.
//!
//! Index convention: with `k` registers of `n` sites each, register `r`
//! occupies the index block of stride `2^(n·(k−1−r))`, and within a
//! register bit `j` of the basis index is site `j`. Sites of a composite
//! space are numbered by global bit position.

mod operator;
mod schmidt;
mod sparse;
mod state;

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

pub use operator::{Operator, ReprKind};
pub use schmidt::{schmidt_rank, Bipartition};
pub use sparse::SparseVec;
pub use state::{tensor_states, State};

use crate::scalar::Real;

/// Largest dimension any operator or state may have.
pub const MAX_DIM: usize = 1 << 20;

/// Largest dimension that may be materialized as a dense matrix.
pub const DENSE_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {0} is not a positive power of two")]
    NotPowerOfTwo(usize),
    #[error("dimension {0} exceeds the configured maximum")]
    TooLarge(usize),
    #[error("amplitude {0} is not finite")]
    NonFinite(usize),
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("index map is not a bijection")]
    NotBijective,
    #[error("permutation phase is not of unit modulus")]
    NotUnitModulus,
    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),
    #[error("empty operand list")]
    Empty,
}

fn same_dim<T: Real>(f: &Operator<T>, g: &Operator<T>) -> Result<(), HilbertError> {
    if f.dim() != g.dim() {
        return Err(HilbertError::DimensionMismatch(f.dim(), g.dim()));
    }
    Ok(())
}

fn basis_deviation<T: Real>(v: &SparseVec<T>, index: usize) -> T {
    let one = SparseVec::basis(v.dim(), index);
    v.max_abs_diff(&one)
}

/// `max_j ‖(f − g)·e_j‖_max`, i.e. the entrywise max-norm of `f − g`.
pub fn max_deviation<T: Real>(f: &Operator<T>, g: &Operator<T>) -> Result<T, HilbertError> {
    same_dim(f, g)?;
    Ok((0..f.dim()).fold(T::zero(), |worst, j| worst.max(f.column(j).max_abs_diff(&g.column(j)))))
}

pub fn approx_eq<T: Real>(f: &Operator<T>, g: &Operator<T>, tol: T) -> Result<bool, HilbertError> {
    same_dim(f, g)?;
    Ok((0..f.dim()).all(|j| f.column(j).max_abs_diff(&g.column(j)) <= tol))
}

/// `‖op†·op − I‖_max ≤ tol`.
pub fn is_unitary<T: Real>(op: &Operator<T>, tol: T) -> bool {
    let adj = op.adjoint();
    (0..op.dim()).all(|j| basis_deviation(&adj.apply_sparse(&op.column(j)), j) <= tol)
}

/// `‖op² − op‖_max ≤ tol` and `‖op† − op‖_max ≤ tol`.
pub fn is_projection<T: Real>(op: &Operator<T>, tol: T) -> bool {
    let adj = op.adjoint();
    (0..op.dim()).all(|j| {
        let col = op.column(j);
        op.apply_sparse(&col).max_abs_diff(&col) <= tol && adj.column(j).max_abs_diff(&col) <= tol
    })
}

/// `‖fg − gf‖_max ≤ tol`.
pub fn commutes<T: Real>(f: &Operator<T>, g: &Operator<T>, tol: T) -> Result<bool, HilbertError> {
    same_dim(f, g)?;
    Ok((0..f.dim()).all(|j| {
        let fg = f.apply_sparse(&g.column(j));
        let gf = g.apply_sparse(&f.column(j));
        fg.max_abs_diff(&gf) <= tol
    }))
}

/// `op^power` as a factored product.
pub fn power<T: Real>(op: &Operator<T>, power: usize) -> Result<Operator<T>, HilbertError> {
    if power == 0 {
        return Operator::identity(op.dim());
    }
    Operator::product(vec![op.clone(); power])
}

pub fn trace<T: Real>(op: &Operator<T>) -> Complex<T> {
    (0..op.dim()).fold(Complex::zero(), |acc, j| acc + op.column(j).get(j))
}

/// Checks that `op` maps every basis vector to a distinct basis vector with
/// coefficient exactly one (within `tol`) and returns the induced index map.
pub fn as_index_permutation<T: Real>(op: &Operator<T>, tol: T) -> Option<Vec<usize>> {
    let one = Complex::<T>::one();
    let mut image = Vec::with_capacity(op.dim());
    let mut seen = vec![false; op.dim()];
    for j in 0..op.dim() {
        let col = op.column(j);
        let (i, c) = col.as_basis(T::one() - tol)?;
        if (c - one).norm() > tol || col.nnz() > 1 && col.max_abs_diff(&SparseVec::basis(op.dim(), i)) > tol {
            return None;
        }
        if std::mem::replace(&mut seen[i], true) {
            return None;
        }
        image.push(i);
    }
    Some(image)
}

/// Cycle lengths of a permutation given as an index map, in order of first element.
pub fn cycle_lengths(image: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; image.len()];
    let mut out = Vec::new();
    for start in 0..image.len() {
        if seen[start] {
            continue;
        }
        let (mut len, mut i) = (0, start);
        while !seen[i] {
            seen[i] = true;
            i = image[i];
            len += 1;
        }
        out.push(len);
    }
    out
}
