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

//! Number encodings: the standard product encoding, and the entangled
//! encoding obtained by conjugating the product model with a Bell-type
//! unitary. Both decode states back to integers; entanglement of the
//! encoded states is certified by Schmidt rank.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::hilbert::{schmidt_rank, Bipartition, HilbertError, Operator, SparseVec, State};
use crate::scalar::Real;
use crate::successor::{build_product_model, Model, ModelError, ModelKind};

/// Decoding requires `|⟨encoded|s⟩|²` at least this large.
pub const DECODE_FIDELITY: f64 = 0.999;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodingError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("the entangled encoding needs n >= 2: with a single site the images are not entangled (got n = {0})")]
    TooFewSites(usize),
    #[error("number {value} outside 0..{limit}")]
    OutOfRange { value: u64, limit: u64 },
    #[error("state is outside the encoding (best overlap {0:.6})")]
    NotEncoded(f64),
}

/// Bijection between `0..2^n` and orthonormal model states.
#[derive(Clone, Debug)]
pub struct Encoding<T> {
    n: usize,
    kind: ModelKind,
    states: Vec<State<T>>,
    sparse: Vec<SparseVec<T>>,
    // numeric value carried by family state k
    family_values: Vec<u64>,
    model: Model<T>,
}

/// Bell-type unitary mapping `|s⟩ ↦ (|s⟩+|s̄⟩)/√2` and `|s̄⟩ ↦ (|s⟩−|s̄⟩)/√2`
/// for each bit string `s` whose highest bit (the place of `a_n`) is 0,
/// `s̄` its complement.
///
/// Factored as `C·(H ⊗ I)·C` where `C` flips every lower bit when the top
/// bit is set, and `H` is the Hadamard on the top bit.
pub fn build_entangling_unitary<T: Real>(n: usize) -> Result<Operator<T>, EncodingError> {
    if n == 0 || n > crate::successor::MAX_BITS {
        return Err(ModelError::BitsOutOfRange(n).into());
    }
    let dim = 1usize << n;
    let top = dim >> 1;
    let low = top - 1;
    let fan_out = Operator::index_permutation((0..dim).map(|x| if x & top != 0 { x ^ low } else { x }).collect())?;
    let h = T::lit(0.5).sqrt();
    let c = |x: T| Complex::new(x, T::zero());
    let hadamard = Operator::dense(2, vec![c(h), c(h), c(h), c(-h)])?;
    let middle = hadamard.tensor(&Operator::identity(top)?)?;
    Ok(Operator::product(vec![fan_out.clone(), middle, fan_out])?)
}

/// Product model conjugated by the entangling unitary: every `V_a`, `P_{a,p}`
/// and `U_a` becomes `U·X·U†` and the number states become `U|t⟩`.
pub fn build_entangled_model<T: Real>(n: usize) -> Result<Model<T>, EncodingError> {
    let product = build_product_model(n)?;
    let u = build_entangling_unitary(n)?;
    Ok(product.conjugated(&u, ModelKind::Entangled)?)
}

pub fn build_product_encoding<T: Real>(n: usize) -> Result<Encoding<T>, EncodingError> {
    Encoding::from_model(build_product_model(n)?)
}

pub fn build_entangled_encoding<T: Real>(n: usize) -> Result<Encoding<T>, EncodingError> {
    if n < 2 {
        return Err(EncodingError::TooFewSites(n));
    }
    Encoding::from_model(build_entangled_model(n)?)
}

/// Encoding of the requested kind; `Custom` is not constructible here.
pub fn build_encoding<T: Real>(kind: ModelKind, n: usize) -> Result<Encoding<T>, EncodingError> {
    match kind {
        ModelKind::Product => build_product_encoding(n),
        ModelKind::Entangled => build_entangled_encoding(n),
        ModelKind::Custom => Err(ModelError::Unverified("custom encodings are built from a model".into()).into()),
    }
}

impl<T: Real> Encoding<T> {
    /// Number `k` is the model state with the binary digits of `k`.
    pub fn from_model(model: Model<T>) -> Result<Self, EncodingError> {
        let n = model.n();
        let count = 1u64 << n;
        let states = (0..count).map(|k| model.state_of_value(k)).collect::<Result<Vec<_>, _>>()?;
        let sparse = states.iter().map(|s| s.to_sparse()).collect();
        let family_values =
            (0..model.dim()).map(|k| model.value_of(&model.family_state(k))).collect::<Result<Vec<_>, _>>()?;
        Ok(Encoding { n, kind: model.kind(), states, sparse, family_values, model })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn model(&self) -> &Model<T> {
        &self.model
    }

    pub fn count(&self) -> u64 {
        1 << self.n
    }

    pub fn states(&self) -> &[State<T>] {
        &self.states
    }

    fn check_range(&self, k: u64) -> Result<(), EncodingError> {
        if k >= self.count() {
            return Err(EncodingError::OutOfRange { value: k, limit: self.count() });
        }
        Ok(())
    }

    pub fn encode(&self, k: u64) -> Result<State<T>, EncodingError> {
        self.check_range(k)?;
        Ok(self.states[k as usize].clone())
    }

    pub fn encode_sparse(&self, k: u64) -> Result<&SparseVec<T>, EncodingError> {
        self.check_range(k)?;
        Ok(&self.sparse[k as usize])
    }

    /// Tensor product of encoded numbers, first value in the high-order register.
    pub fn encode_registers(&self, values: &[u64]) -> Result<SparseVec<T>, EncodingError> {
        let (first, rest) = values.split_first().ok_or(HilbertError::Empty)?;
        rest.iter().try_fold(self.encode_sparse(*first)?.clone(), |acc, &v| Ok(acc.kron(self.encode_sparse(v)?)))
    }

    /// Decodes by maximal overlap against the encoding table.
    pub fn decode(&self, s: &State<T>) -> Result<u64, EncodingError> {
        if s.dim() != self.model.dim() {
            return Err(HilbertError::DimensionMismatch(s.dim(), self.model.dim()).into());
        }
        let v = s.to_sparse();
        let (best, overlap) = self
            .sparse
            .iter()
            .enumerate()
            .map(|(k, e)| (k, e.inner(&v).norm_sqr()))
            .fold((0, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if overlap < T::lit(DECODE_FIDELITY) {
            return Err(EncodingError::NotEncoded(overlap.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(best as u64)
    }

    /// Decodes by undoing the family map and reading the basis index.
    pub fn decode_adjoint(&self, s: &State<T>) -> Result<u64, EncodingError> {
        if s.dim() != self.model.dim() {
            return Err(HilbertError::DimensionMismatch(s.dim(), self.model.dim()).into());
        }
        let back = self.model.family().adjoint().apply_sparse(&s.to_sparse());
        self.read_basis(&back).map(|k| self.family_values[k])
    }

    fn read_basis(&self, v: &SparseVec<T>) -> Result<usize, EncodingError> {
        match v.as_basis(T::lit(DECODE_FIDELITY)) {
            Some((k, _)) => Ok(k),
            None => {
                let best = v.entries().iter().fold(T::zero(), |m, e| m.max(e.1.norm_sqr()));
                Err(EncodingError::NotEncoded(best.to_f64().unwrap_or(f64::NAN)))
            }
        }
    }

    /// Decodes a product of `registers` encoded numbers.
    pub fn decode_registers(&self, s: &SparseVec<T>, registers: usize) -> Result<Vec<u64>, EncodingError> {
        let expected = self.model.dim().pow(registers as u32);
        if s.dim() != expected {
            return Err(HilbertError::DimensionMismatch(s.dim(), expected).into());
        }
        let adj = self.model.family().adjoint();
        let undo = Operator::tensor_all(&vec![adj; registers])?;
        let idx = self.read_basis(&undo.apply_sparse(s))?;
        let mask = self.model.dim() - 1;
        Ok((0..registers)
            .rev()
            .map(|r| self.family_values[(idx >> (r * self.n)) & mask])
            .collect())
    }

    /// Schmidt rank of every encoded state across every single-site cut.
    pub fn certify_entanglement(&self) -> Result<EntanglementCertificate, EncodingError> {
        let tol = T::classify_tol();
        let cuts = Bipartition::single_site_cuts(self.n);
        let mut ranks = Vec::with_capacity(self.states.len());
        for s in &self.states {
            ranks.push(cuts.iter().map(|c| schmidt_rank(s, c, tol)).collect::<Result<Vec<_>, _>>()?);
        }
        Ok(EntanglementCertificate::from_ranks(ranks))
    }

    /// Amplitude table for external inspection.
    pub fn table(&self) -> EncodingTable {
        EncodingTable {
            n: self.n,
            kind: self.kind,
            states: self
                .states
                .iter()
                .map(|s| {
                    s.amplitudes()
                        .iter()
                        .map(|a| [a.re.to_f64().unwrap_or(f64::NAN), a.im.to_f64().unwrap_or(f64::NAN)])
                        .collect()
                })
                .collect(),
        }
    }

    /// Gram matrix deviation from the identity over the encoded states.
    pub fn orthonormality_defect(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.sparse.iter().enumerate() {
            for (j, b) in self.sparse.iter().enumerate() {
                let target = if i == j { Complex::one() } else { Complex::zero() };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntanglementVerdict {
    AllProduct,
    AllEntangled,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntanglementCertificate {
    /// `ranks[k][site]`: Schmidt rank of number `k` across the cut isolating `site`.
    pub ranks: Vec<Vec<usize>>,
    pub verdict: EntanglementVerdict,
}

impl EntanglementCertificate {
    pub fn from_ranks(ranks: Vec<Vec<usize>>) -> Self {
        let entangled = |r: &Vec<usize>| r.iter().any(|&x| x > 1);
        let verdict = if ranks.iter().all(|r| !entangled(r)) {
            EntanglementVerdict::AllProduct
        } else if ranks.iter().all(entangled) {
            EntanglementVerdict::AllEntangled
        } else {
            EntanglementVerdict::Mixed
        };
        EntanglementCertificate { ranks, verdict }
    }

    /// True if every rank in the table equals `rank`.
    pub fn uniform(&self, rank: usize) -> bool {
        self.ranks.iter().flatten().all(|&r| r == rank)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EncodingTable {
    pub n: usize,
    pub kind: ModelKind,
    /// `states[k]` lists `[re, im]` per basis index.
    pub states: Vec<Vec<[f64; 2]>>,
}
