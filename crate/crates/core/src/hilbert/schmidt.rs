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

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;

use super::{HilbertError, State};
use crate::scalar::Real;

/// Split of the sites of a composite space into two nonempty parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    left: BTreeSet<usize>,
    right: BTreeSet<usize>,
}

impl Bipartition {
    /// `left` is one side, the remaining sites of `0..sites` the other.
    pub fn new(left: impl IntoIterator<Item = usize>, sites: usize) -> Result<Self, HilbertError> {
        let left: BTreeSet<usize> = left.into_iter().collect();
        if let Some(&s) = left.iter().find(|&&s| s >= sites) {
            return Err(HilbertError::InvalidBipartition(format!("site {s} outside 0..{sites}")));
        }
        let right: BTreeSet<usize> = (0..sites).filter(|s| !left.contains(s)).collect();
        if left.is_empty() || right.is_empty() {
            return Err(HilbertError::InvalidBipartition("both sides must be nonempty".into()));
        }
        Ok(Bipartition { left, right })
    }

    pub fn single_site(site: usize, sites: usize) -> Result<Self, HilbertError> {
        Self::new([site], sites)
    }

    /// All cuts separating one site from the rest.
    pub fn single_site_cuts(sites: usize) -> Vec<Self> {
        (0..sites).filter_map(|s| Self::single_site(s, sites).ok()).collect()
    }

    pub fn left(&self) -> &BTreeSet<usize> {
        &self.left
    }

    pub fn right(&self) -> &BTreeSet<usize> {
        &self.right
    }

    pub fn sites(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

fn gather(index: usize, sites: &BTreeSet<usize>) -> usize {
    sites.iter().enumerate().fold(0, |acc, (k, &s)| acc | (((index >> s) & 1) << k))
}

/// Number of singular values above `tol` of the amplitude array reshaped
/// to `(2^|left| × 2^|right|)` across `cut`.
pub fn schmidt_rank<T: Real>(s: &State<T>, cut: &Bipartition, tol: T) -> Result<usize, HilbertError> {
    if cut.sites() != s.sites() {
        return Err(HilbertError::InvalidBipartition(format!(
            "cut covers {} sites, state has {}",
            cut.sites(),
            s.sites()
        )));
    }
    let rows = 1usize << cut.left.len();
    let cols = 1usize << cut.right.len();
    let mut m = DMatrix::<Complex<f64>>::from_element(rows, cols, Complex::zero());
    for (i, a) in s.amplitudes().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let re = a.re.to_f64().unwrap_or(f64::NAN);
        let im = a.im.to_f64().unwrap_or(f64::NAN);
        m[(gather(i, &cut.left), gather(i, &cut.right))] = Complex::new(re, im);
    }
    let tol = tol.to_f64().unwrap_or(0.0);
    Ok(m.singular_values().iter().filter(|&&sv| sv > tol).count())
}
