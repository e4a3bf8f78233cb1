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

use super::{HilbertError, SparseVec};
use crate::scalar::Real;

/// Dense complex amplitude vector over a power-of-two dimensional space.
///
/// Construction checks that the dimension is a power of two and that every
/// amplitude is finite. Normalization is checked separately with
/// [`State::is_normalized`] because projections legitimately produce
/// sub-normalized vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct State<T> {
    amps: Vec<Complex<T>>,
}

impl<T: Real> State<T> {
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self, HilbertError> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(HilbertError::NotPowerOfTwo(amps.len()));
        }
        if let Some(i) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(HilbertError::NonFinite(i));
        }
        Ok(State { amps })
    }

    /// Like [`State::from_amplitudes`] but also requires unit norm.
    pub fn normalized(amps: Vec<Complex<T>>) -> Result<Self, HilbertError> {
        let s = Self::from_amplitudes(amps)?;
        let norm = s.norm();
        if (norm - T::one()).abs() > T::default_tol() {
            return Err(HilbertError::NotNormalized(norm.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(s)
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self, HilbertError> {
        if !dim.is_power_of_two() {
            return Err(HilbertError::NotPowerOfTwo(dim));
        }
        if index >= dim {
            return Err(HilbertError::IndexOutOfRange { index, dim });
        }
        let mut amps = vec![Complex::zero(); dim];
        amps[index] = Complex::one();
        Ok(State { amps })
    }

    /// Real amplitudes, mostly for writing examples and tests.
    pub fn from_real(values: &[f64]) -> Result<Self, HilbertError> {
        Self::from_amplitudes(values.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect())
    }

    pub fn from_sparse_vec(v: &SparseVec<T>) -> Self {
        State { amps: v.to_dense() }
    }

    pub fn to_sparse(&self) -> SparseVec<T> {
        SparseVec::from_dense(&self.amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Number of two-level sites, log2 of the dimension.
    pub fn sites(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr()).sqrt()
    }

    pub fn is_normalized(&self, tol: T) -> bool {
        (self.norm() - T::one()).abs() <= tol
    }

    /// ⟨self|other⟩, conjugate-linear in the first argument.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>, HilbertError> {
        if self.dim() != other.dim() {
            return Err(HilbertError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Tensor product with `self` as the high-order index block.
    pub fn tensor(&self, other: &Self) -> Result<Self, HilbertError> {
        let dim = self
            .dim()
            .checked_mul(other.dim())
            .filter(|&d| d <= super::MAX_DIM)
            .ok_or(HilbertError::TooLarge(usize::MAX))?;
        let mut amps = Vec::with_capacity(dim);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(State { amps })
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        State { amps: self.amps.iter().map(|a| a * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, HilbertError> {
        if self.dim() != other.dim() {
            return Err(HilbertError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(State { amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect() })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T, HilbertError> {
        if self.dim() != other.dim() {
            return Err(HilbertError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm())))
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.max_abs_diff(other).map(|d| d <= tol).unwrap_or(false)
    }
}

/// Tensor product of a sequence of states, leftmost is the highest-order block.
pub fn tensor_states<T: Real>(states: &[State<T>]) -> Result<State<T>, HilbertError> {
    let (first, rest) = states.split_first().ok_or(HilbertError::Empty)?;
    rest.iter().try_fold(first.clone(), |acc, s| acc.tensor(s))
}
