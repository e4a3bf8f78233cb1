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

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Sparse amplitude vector, sorted by basis index with no duplicates.
///
/// All operator application runs on this type. Basis inputs to the
/// factored arithmetic operators keep a support of a handful of entries
/// through every factor, which keeps exhaustive checks on 4096-dimensional
/// spaces cheap.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVec<T> {
    dim: usize,
    entries: Vec<(usize, Complex<T>)>,
}

impl<T: Real> SparseVec<T> {
    pub fn zero(dim: usize) -> Self {
        SparseVec { dim, entries: Vec::new() }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        SparseVec { dim, entries: vec![(index, Complex::one())] }
    }

    /// Builds from unordered entries, summing duplicates and pruning.
    pub fn from_entries(dim: usize, mut entries: Vec<(usize, Complex<T>)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, Complex<T>)> = Vec::with_capacity(entries.len());
        for (idx, amp) in entries {
            debug_assert!(idx < dim);
            match merged.last_mut() {
                Some(last) if last.0 == idx => last.1 += amp,
                _ => merged.push((idx, amp)),
            }
        }
        let cut = T::prune_tol();
        merged.retain(|e| e.1.norm() > cut);
        SparseVec { dim, entries: merged }
    }

    pub fn from_dense(amps: &[Complex<T>]) -> Self {
        let entries = amps
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| (i, *a))
            .collect();
        SparseVec { dim: amps.len(), entries }
    }

    pub fn to_dense(&self) -> Vec<Complex<T>> {
        let mut out = vec![Complex::zero(); self.dim];
        for &(i, a) in &self.entries {
            out[i] = a;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, Complex<T>)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: usize) -> Complex<T> {
        match self.entries.binary_search_by_key(&index, |e| e.0) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => Complex::zero(),
        }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let entries = self.entries.iter().map(|&(i, a)| (i, a * c)).collect();
        SparseVec::from_entries(self.dim, entries)
    }

    pub fn norm_sqr(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, e| acc + e.1.norm_sqr())
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let (mut i, mut j) = (0, 0);
        let mut acc = Complex::zero();
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i], other.entries[j]);
            if a.0 == b.0 {
                acc += a.1.conj() * b.1;
                i += 1;
                j += 1;
            } else if a.0 < b.0 {
                i += 1;
            } else {
                j += 1;
            }
        }
        acc
    }

    /// Max-norm distance between two vectors of equal dimension.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let (mut i, mut j) = (0, 0);
        let mut worst = T::zero();
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() || j < b.len() {
            let d = if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                i += 1;
                a[i - 1].1.norm()
            } else if i >= a.len() || b[j].0 < a[i].0 {
                j += 1;
                b[j - 1].1.norm()
            } else {
                i += 1;
                j += 1;
                (a[i - 1].1 - b[j - 1].1).norm()
            };
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    /// If the vector is `c·e_k` with `|c|²` at least `fidelity`, returns `(k, c)`.
    pub fn as_basis(&self, fidelity: T) -> Option<(usize, Complex<T>)> {
        let total = self.norm_sqr();
        let &(idx, amp) = self
            .entries
            .iter()
            .max_by(|x, y| x.1.norm_sqr().partial_cmp(&y.1.norm_sqr()).unwrap())?;
        if amp.norm_sqr() >= fidelity && total - amp.norm_sqr() <= T::one() - fidelity {
            Some((idx, amp))
        } else {
            None
        }
    }

    /// Kronecker product with `self` as the high-order block.
    pub fn kron(&self, other: &Self) -> Self {
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        for &(i, a) in &self.entries {
            for &(j, b) in &other.entries {
                entries.push((i * other.dim + j, a * b));
            }
        }
        SparseVec { dim: self.dim * other.dim, entries }
    }

    pub(crate) fn into_entries(self) -> Vec<(usize, Complex<T>)> {
        self.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    #[test]
    fn duplicates_merge_and_cancel() {
        let v = SparseVec::<f64>::from_entries(
            4,
            vec![(2, C::new(1.0, 0.0)), (0, C::new(0.5, 0.0)), (2, C::new(-1.0, 0.0))],
        );
        assert_eq!(v.entries(), &[(0, C::new(0.5, 0.0))]);
    }

    #[test]
    fn inner_and_diff() {
        let a = SparseVec::<f64>::from_entries(4, vec![(1, C::new(0.0, 1.0)), (3, C::new(1.0, 0.0))]);
        let b = SparseVec::<f64>::basis(4, 1);
        assert_eq!(a.inner(&b), C::new(0.0, -1.0));
        assert!((a.max_abs_diff(&b) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.max_abs_diff(&a), 0.0);
    }

    #[test]
    fn kron_index_order() {
        let a = SparseVec::<f64>::basis(4, 1);
        let b = SparseVec::<f64>::basis(4, 0);
        assert_eq!(a.kron(&b), SparseVec::basis(16, 4));
    }

    #[test]
    fn as_basis_rejects_superposition() {
        let h = 0.5f64.sqrt();
        let v = SparseVec::<f64>::from_entries(4, vec![(1, C::new(h, 0.0)), (2, C::new(h, 0.0))]);
        assert!(v.as_basis(0.999).is_none());
        assert_eq!(SparseVec::<f64>::basis(4, 3).as_basis(0.999).unwrap().0, 3);
    }
}
