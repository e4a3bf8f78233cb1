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

//! Addition, doubling and multiplication built as factored products of the
//! model's controlled successor, projection and flip operators.
//!
//! All builders work on any verified model; on the entangled model they
//! produce the entangled-basis operators without ever referencing the
//! entangling unitary directly.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::hilbert::{HilbertError, Operator, State};
use crate::representations::{Encoding, EncodingError};
use crate::scalar::Real;
use crate::successor::{BitFunction, ModelError, VerifiedModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithmeticError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("operator acts on {found} registers, expected {expected}")]
    WrongLayout { found: usize, expected: usize },
    #[error("encoding has n = {found}, operator was built for n = {expected}")]
    WidthMismatch { found: usize, expected: usize },
}

/// `k` registers of `n` sites each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RegisterLayout {
    pub k: usize,
    pub n: usize,
}

impl RegisterLayout {
    pub fn dim(&self) -> usize {
        1 << (self.k * self.n)
    }

    pub fn register_dim(&self) -> usize {
        1 << self.n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    /// Controlled additions and doublings count one each.
    Coarse,
    /// Controlled additions count their controlled-`V` factors.
    Fine,
}

/// Elementary-factor counts recorded while an operator is assembled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FactorCount {
    pub coarse: usize,
    pub fine: usize,
}

impl FactorCount {
    fn add(&mut self, coarse: usize, fine: usize) {
        self.coarse += coarse;
        self.fine += fine;
    }

    pub fn get(&self, g: Granularity) -> usize {
        match g {
            Granularity::Coarse => self.coarse,
            Granularity::Fine => self.fine,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArithmeticKind {
    Addition,
    Doubling,
    MultiplicationTriple,
    MultiplicationQuadruple,
}

#[derive(Clone, Debug)]
pub struct ArithmeticOperator<T> {
    pub kind: ArithmeticKind,
    pub layout: RegisterLayout,
    pub op: Operator<T>,
    pub factors: FactorCount,
}

impl<T: Real> ArithmeticOperator<T> {
    pub fn factor_count(&self, g: Granularity) -> usize {
        self.factors.get(g)
    }

    /// Encodes `values` register by register, applies the operator and
    /// decodes every output register.
    pub fn apply_numbers(&self, enc: &Encoding<T>, values: &[u64]) -> Result<Vec<u64>, ArithmeticError> {
        if values.len() != self.layout.k {
            return Err(ArithmeticError::WrongLayout { found: values.len(), expected: self.layout.k });
        }
        if enc.n() != self.layout.n {
            return Err(ArithmeticError::WidthMismatch { found: enc.n(), expected: self.layout.n });
        }
        let out = self.op.apply_sparse(&enc.encode_registers(values)?);
        Ok(enc.decode_registers(&out, self.layout.k)?)
    }
}

/// `P_α ⊗ I + P_γ ⊗ target`: applies `target` to the trailing registers when
/// the control digit reads γ.
fn controlled<T: Real>(alpha: &Operator<T>, gamma: &Operator<T>, target: &Operator<T>) -> Result<Operator<T>, HilbertError> {
    let id = Operator::identity(target.dim())?;
    Operator::sum(vec![alpha.tensor(&id)?, gamma.tensor(target)?])
}

/// `∏_a (P_{a,α} ⊗ I + P_{a,γ} ⊗ V_a)` on two registers: `|β⟩|β′⟩ ↦ |β⟩|β+β′⟩`.
pub fn build_addition<T: Real>(m: &VerifiedModel<T>) -> Result<ArithmeticOperator<T>, ArithmeticError> {
    let vs = m.ordered_successors()?;
    let rs = m.ordered_readouts()?;
    let mut factors = FactorCount::default();
    let mut ops = Vec::with_capacity(vs.len());
    for (v, r) in vs.iter().zip(&rs) {
        ops.push(controlled(&r.alpha, &r.gamma, v)?);
        factors.add(1, 1);
    }
    Ok(ArithmeticOperator {
        kind: ArithmeticKind::Addition,
        layout: RegisterLayout { k: 2, n: m.n() },
        op: Operator::product(ops)?,
        factors,
    })
}

/// Second register of `|β⟩|β′⟩` under addition, via the digits of `β′`:
/// `∏_a (V_a)^{s′(a)}·β`.
pub fn addition_alternate<T: Real>(
    m: &VerifiedModel<T>,
    beta: &State<T>,
    beta_prime: &State<T>,
) -> Result<State<T>, ArithmeticError> {
    let digits = m.classify(beta_prime)?;
    m.classify(beta)?;
    let mut v = beta.to_sparse();
    for (label, bit) in digits.iter() {
        if bit {
            v = m.successor(label)?.apply_sparse(&v);
        }
    }
    Ok(State::from_sparse_vec(&v))
}

/// Doubling `W·|β⟩ = |β+β⟩` on one register.
///
/// The family action is derived from the model: each family state is
/// classified and its image rebuilt as `∏_{j<n, s_j=1} V_{a_{j+1}}·|β₀⟩`.
/// Doubling modulo `2^n` is two-to-one, so `W` is not unitary.
pub fn build_doubling<T: Real>(m: &VerifiedModel<T>) -> Result<ArithmeticOperator<T>, ArithmeticError> {
    let order = m.require_ordering()?;
    let vs = m.ordered_successors()?;
    let zero = m.zero_state()?.to_sparse();
    let fam_adj = m.family().adjoint();
    let fidelity = T::one() - T::classify_tol();
    let mut image = Vec::with_capacity(m.dim());
    for k in 0..m.dim() {
        let digits = m.classify_sparse(&m.family_state(k))?.ordered(&order);
        let mut v = zero.clone();
        for j in 0..order.len() - 1 {
            if digits[j] == 1 {
                v = vs[j + 1].apply_sparse(&v);
            }
        }
        let (idx, _) = fam_adj
            .apply_sparse(&v)
            .as_basis(fidelity)
            .ok_or_else(|| ModelError::NotClassifiable(order[0].clone()))?;
        image.push(idx);
    }
    let op = Operator::product(vec![m.family().clone(), Operator::index_map(image)?, fam_adj])?;
    Ok(ArithmeticOperator {
        kind: ArithmeticKind::Doubling,
        layout: RegisterLayout { k: 1, n: m.n() },
        op,
        factors: FactorCount { coarse: 1, fine: 1 },
    })
}

/// Digits of `W^h` applied to `bits`, together with the closed product form
/// `∏_{j ≤ n−h', s_j=1} V_{a_{j+h'}}·|β₀⟩` evaluated at `h' = h−1` and `h' = h`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedFormCheck {
    pub h: usize,
    /// Digits of `2^h·value mod 2^n`.
    pub direct: BitFunction,
    /// Closed form read as `W^h`, i.e. evaluated at `h' = h−1`; absent for `h = 0`.
    pub closed_form_at_h: Option<BitFunction>,
    /// Closed form evaluated at `h' = h`, nominally `W^(h+1)`.
    pub closed_form_at_h_plus_one: BitFunction,
    pub matches_at_h: bool,
    pub matches_at_h_plus_one: bool,
}

fn closed_form_product<T: Real>(m: &VerifiedModel<T>, shift: usize, bits: &[u8]) -> Result<BitFunction, ArithmeticError> {
    let vs = m.ordered_successors()?;
    let n = vs.len();
    let mut v = m.zero_state()?.to_sparse();
    for j in 0..n.saturating_sub(shift) {
        if bits[j] == 1 {
            v = vs[j + shift].apply_sparse(&v);
        }
    }
    Ok(m.classify_sparse(&v)?)
}

pub fn doubling_power_closed_form<T: Real>(
    m: &VerifiedModel<T>,
    h: usize,
    bits: &BitFunction,
) -> Result<ClosedFormCheck, ArithmeticError> {
    let order = m.require_ordering()?;
    let n = order.len();
    let value = bits.value(&order);
    let mask = (1u64 << n) - 1;
    let direct_value = if h >= n { 0 } else { (value << h) & mask };
    let direct = BitFunction::from_value(&order, direct_value);
    let digits = bits.ordered(&order);
    let closed_form_at_h = if h == 0 { None } else { Some(closed_form_product(m, h - 1, &digits)?) };
    let closed_form_at_h_plus_one = closed_form_product(m, h, &digits)?;
    Ok(ClosedFormCheck {
        h,
        matches_at_h: closed_form_at_h.as_ref().map(|b| *b == direct).unwrap_or(true),
        matches_at_h_plus_one: closed_form_at_h_plus_one == direct,
        direct,
        closed_form_at_h,
        closed_form_at_h_plus_one,
    })
}

fn multiplication_core<T: Real>(
    m: &VerifiedModel<T>,
    cleanup: bool,
) -> Result<(Operator<T>, FactorCount), ArithmeticError> {
    let rs = m.ordered_readouts()?;
    let add = build_addition(m)?;
    let w = build_doubling(m)?;
    let single = Operator::identity(m.dim())?;
    let w2 = Operator::tensor_all(&[single.clone(), w.op.clone(), single])?;
    let mut counts = FactorCount::default();
    // application order: C_1, W_2, C_2, …, W_2, C_n [, W_2]
    let mut sequence = Vec::new();
    for (j, r) in rs.iter().enumerate() {
        if j > 0 {
            sequence.push(w2.clone());
            counts.add(1, 1);
        }
        sequence.push(controlled(&r.alpha, &r.gamma, &add.op)?);
        counts.add(1, add.factors.fine);
    }
    if cleanup {
        sequence.push(w2);
        counts.add(1, 1);
    }
    sequence.reverse();
    Ok((Operator::product(sequence)?, counts))
}

/// Multiplication on three registers:
/// `|β⟩|β′⟩|β″⟩ ↦ |β⟩|β₀⟩|β″ + β×β′⟩`.
///
/// Controlled additions of register 2 into register 3, one per digit of
/// register 1, with a doubling of register 2 between consecutive digits and
/// one final doubling that returns register 2 to the zero state.
pub fn build_multiplication_triple<T: Real>(m: &VerifiedModel<T>) -> Result<ArithmeticOperator<T>, ArithmeticError> {
    build_multiplication_triple_with(m, true)
}

/// As [`build_multiplication_triple`]; with `cleanup = false` only `n − 1`
/// doublings are applied and register 2 ends holding `2^(n−1)·β′`.
pub fn build_multiplication_triple_with<T: Real>(
    m: &VerifiedModel<T>,
    cleanup: bool,
) -> Result<ArithmeticOperator<T>, ArithmeticError> {
    let (op, factors) = multiplication_core(m, cleanup)?;
    Ok(ArithmeticOperator {
        kind: ArithmeticKind::MultiplicationTriple,
        layout: RegisterLayout { k: 3, n: m.n() },
        op,
        factors,
    })
}

/// Index permutation exchanging registers `a` and `b` of `k` registers.
pub fn register_swap<T: Real>(k: usize, n: usize, a: usize, b: usize) -> Result<Operator<T>, HilbertError> {
    let dim = 1usize << (k * n);
    let mask = (1usize << n) - 1;
    let (sa, sb) = ((k - 1 - a) * n, (k - 1 - b) * n);
    let image = (0..dim)
        .map(|x| {
            let (ra, rb) = ((x >> sa) & mask, (x >> sb) & mask);
            (x & !(mask << sa) & !(mask << sb)) | (ra << sb) | (rb << sa)
        })
        .collect();
    Operator::index_permutation(image)
}

/// Unitary multiplication on four registers,
/// `|β⟩|β′⟩|β″⟩|β₀⟩ ↦ |β⟩|β′⟩|β″ + β×β′⟩|β₀⟩`.
///
/// On the subspace where register 4 holds the zero state: add register 2
/// into register 4 (an exact copy there), run the triple multiplication on
/// registers 1–3, then exchange registers 2 and 4. That map sends the
/// subspace bijectively onto itself; on its complement the operator acts
/// as the identity, so the whole operator is unitary.
pub fn build_multiplication_unitary<T: Real>(m: &VerifiedModel<T>) -> Result<ArithmeticOperator<T>, ArithmeticError> {
    let n = m.n();
    let single = Operator::identity(m.dim())?;
    let add = build_addition(m)?;
    let (core, core_counts) = multiplication_core(m, true)?;

    let swap34 = register_swap(4, n, 2, 3)?;
    let copy = Operator::product(vec![
        swap34.clone(),
        Operator::tensor_all(&[single.clone(), add.op.clone(), single.clone()])?,
        swap34,
    ])?;
    let swap24 = register_swap(4, n, 1, 3)?;

    let alphas: Vec<Operator<T>> = m.ordered_readouts()?.iter().map(|r| r.alpha.clone()).collect();
    let zero_proj = Operator::product(alphas)?;
    let upper = Operator::identity(m.dim().pow(3))?;
    let on_zero = upper.tensor(&zero_proj)?;
    let off_zero = upper.tensor(&zero_proj.complement()?)?;

    let active = Operator::product(vec![on_zero.clone(), swap24, core.tensor(&single)?, copy, on_zero])?;
    let mut factors = core_counts;
    factors.add(1, add.factors.fine);
    factors.add(1, 1);
    Ok(ArithmeticOperator {
        kind: ArithmeticKind::MultiplicationQuadruple,
        layout: RegisterLayout { k: 4, n },
        op: Operator::sum(vec![active, off_zero])?,
        factors,
    })
}

/// Outcome of an exhaustive comparison against modular integer arithmetic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub cases: usize,
    /// `(inputs, outputs)` for every mismatching case.
    pub mismatches: Vec<(Vec<u64>, Vec<u64>)>,
    /// Largest amplitude deviation from the expected output state.
    pub max_deviation: f64,
}

impl OracleOutcome {
    pub fn pass(&self, tol: f64) -> bool {
        self.mismatches.is_empty() && self.max_deviation < tol
    }
}

fn run_oracle<T: Real>(
    enc: &Encoding<T>,
    op: &ArithmeticOperator<T>,
    inputs: impl Iterator<Item = Vec<u64>>,
    expected: impl Fn(&[u64]) -> Vec<u64>,
) -> Result<OracleOutcome, ArithmeticError> {
    if enc.n() != op.layout.n {
        return Err(ArithmeticError::WidthMismatch { found: enc.n(), expected: op.layout.n });
    }
    let mut out = OracleOutcome { cases: 0, mismatches: Vec::new(), max_deviation: 0.0 };
    for input in inputs {
        let want = expected(&input);
        let image = op.op.apply_sparse(&enc.encode_registers(&input)?);
        let target = enc.encode_registers(&want)?;
        let dev = image.max_abs_diff(&target).to_f64().unwrap_or(f64::INFINITY);
        out.max_deviation = out.max_deviation.max(dev);
        let got = enc.decode_registers(&image, op.layout.k).unwrap_or_default();
        if got != want {
            out.mismatches.push((input, got));
        }
        out.cases += 1;
    }
    Ok(out)
}

/// All `4^n` pairs against `(x, y) ↦ (x, x + y mod 2^n)`.
pub fn verify_addition<T: Real>(enc: &Encoding<T>, add: &ArithmeticOperator<T>) -> Result<OracleOutcome, ArithmeticError> {
    expect_layout(add, 2)?;
    let count = enc.count();
    let mask = count - 1;
    let pairs = (0..count).flat_map(move |x| (0..count).map(move |y| vec![x, y]));
    run_oracle(enc, add, pairs, |v| vec![v[0], (v[0] + v[1]) & mask])
}

/// All states against `x ↦ 2x mod 2^n`.
pub fn verify_doubling<T: Real>(enc: &Encoding<T>, w: &ArithmeticOperator<T>) -> Result<OracleOutcome, ArithmeticError> {
    expect_layout(w, 1)?;
    let mask = enc.count() - 1;
    run_oracle(enc, w, (0..enc.count()).map(|x| vec![x]), |v| vec![(2 * v[0]) & mask])
}

/// Triple multiplication; with `accumulate` every third-register start value
/// is tried, otherwise register 3 starts at zero.
pub fn verify_multiplication_triple<T: Real>(
    enc: &Encoding<T>,
    mul: &ArithmeticOperator<T>,
    accumulate: bool,
) -> Result<OracleOutcome, ArithmeticError> {
    expect_layout(mul, 3)?;
    let count = enc.count();
    let mask = count - 1;
    let acc_range = if accumulate { count } else { 1 };
    let triples = (0..count)
        .flat_map(move |x| (0..count).flat_map(move |y| (0..acc_range).map(move |z| vec![x, y, z])));
    run_oracle(enc, mul, triples, |v| vec![v[0], 0, (v[2] + v[0] * v[1]) & mask])
}

/// Quadruple multiplication over every `(β, β′, β″)` with register 4 at zero.
pub fn verify_multiplication_quadruple<T: Real>(
    enc: &Encoding<T>,
    mul: &ArithmeticOperator<T>,
) -> Result<OracleOutcome, ArithmeticError> {
    expect_layout(mul, 4)?;
    let count = enc.count();
    let mask = count - 1;
    let quads = (0..count)
        .flat_map(move |x| (0..count).flat_map(move |y| (0..count).map(move |z| vec![x, y, z, 0])));
    run_oracle(enc, mul, quads, |v| vec![v[0], v[1], (v[2] + v[0] * v[1]) & mask, 0])
}

fn expect_layout<T>(op: &ArithmeticOperator<T>, k: usize) -> Result<(), ArithmeticError> {
    if op.layout.k != k {
        return Err(ArithmeticError::WrongLayout { found: op.layout.k, expected: k });
    }
    Ok(())
}

/// Unitarity by exhaustive application to the model's family basis of the
/// composite space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitarityOutcome {
    pub cases: usize,
    /// Every family basis state maps to a distinct family basis state.
    pub bijection: bool,
    /// `max |G − I|` of the Gram matrix of the images.
    pub gram_defect: f64,
}

impl UnitarityOutcome {
    pub fn pass(&self, tol: f64) -> bool {
        self.bijection && self.gram_defect <= tol
    }
}

pub fn verify_unitary_exhaustive<T: Real>(
    enc: &Encoding<T>,
    op: &ArithmeticOperator<T>,
) -> Result<UnitarityOutcome, ArithmeticError> {
    let k = op.layout.k;
    let fam = Operator::tensor_all(&vec![enc.model().family().clone(); k])?;
    let fam_adj = fam.adjoint();
    let dim = op.layout.dim();
    let fidelity = T::one() - T::classify_tol();
    let mut seen = vec![false; dim];
    let mut bijection = true;
    // basis index -> (image number, amplitude)
    let mut touching: BTreeMap<usize, Vec<(usize, Complex<T>)>> = BTreeMap::new();
    for i in 0..dim {
        let img = op.op.apply_sparse(&fam.column(i));
        match fam_adj.apply_sparse(&img).as_basis(fidelity) {
            Some((j, _)) if !std::mem::replace(&mut seen[j], true) => {}
            _ => bijection = false,
        }
        for &(t, a) in img.entries() {
            touching.entry(t).or_default().push((i, a));
        }
    }
    let mut gram: BTreeMap<(usize, usize), Complex<T>> = BTreeMap::new();
    for list in touching.values() {
        for &(i, a) in list {
            for &(j, b) in list {
                *gram.entry((i, j)).or_insert_with(Complex::zero) += a.conj() * b;
            }
        }
    }
    let mut defect = T::zero();
    for i in 0..dim {
        if !gram.contains_key(&(i, i)) {
            defect = T::one();
        }
    }
    for (&(i, j), g) in &gram {
        let target = if i == j { Complex::one() } else { Complex::zero() };
        defect = defect.max((g - target).norm());
    }
    Ok(UnitarityOutcome { cases: dim, bijection, gram_defect: defect.to_f64().unwrap_or(f64::INFINITY) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{approx_eq, commutes, is_unitary, SparseVec};
    use crate::representations::{build_entangled_encoding, build_product_encoding};

    fn verified(enc: &Encoding<f64>) -> VerifiedModel<f64> {
        enc.model().clone().verify().unwrap()
    }

    #[test]
    fn addition_examples() {
        let enc = build_product_encoding::<f64>(2).unwrap();
        let m = verified(&enc);
        let add = build_addition(&m).unwrap();
        assert_eq!(add.apply_numbers(&enc, &[2, 3]).unwrap(), vec![2, 1]);
        for y in 0..4 {
            assert_eq!(add.apply_numbers(&enc, &[0, y]).unwrap(), vec![0, y]);
        }
        assert_eq!(add.factor_count(Granularity::Fine), 2);
        assert!(is_unitary(&add.op, 1e-10));

        let enc = build_entangled_encoding::<f64>(2).unwrap();
        let add = build_addition(&verified(&enc)).unwrap();
        assert_eq!(add.apply_numbers(&enc, &[1, 2]).unwrap(), vec![1, 3]);
    }

    #[test]
    fn addition_factors_commute() {
        for n in 1..=3 {
            let m = build_product_encoding::<f64>(n).map(|e| verified(&e)).unwrap();
            let add = build_addition(&m).unwrap();
            let rs = m.ordered_readouts().unwrap();
            let vs = m.ordered_successors().unwrap();
            let fs: Vec<_> = rs.iter().zip(&vs).map(|(r, v)| controlled(&r.alpha, &r.gamma, v).unwrap()).collect();
            for i in 0..fs.len() {
                for j in i + 1..fs.len() {
                    let (a, b) = (fs[i].materialize().unwrap(), fs[j].materialize().unwrap());
                    assert!(commutes(&a, &b, 1e-12).unwrap());
                }
            }
            assert_eq!(add.layout.dim(), 1 << (2 * n));
        }
    }

    #[test]
    fn alternate_form_agrees() {
        let enc = build_product_encoding::<f64>(3).unwrap();
        let m = verified(&enc);
        let add = build_addition(&m).unwrap();
        let e = |k| enc.encode(k).unwrap();
        assert_eq!(addition_alternate(&m, &e(5), &e(6)).unwrap(), e(3));
        assert_eq!(addition_alternate(&m, &e(5), &e(0)).unwrap(), e(5));
        for x in 0..8 {
            for y in 0..8 {
                let alt = addition_alternate(&m, &e(x), &e(y)).unwrap();
                let full = add.apply_numbers(&enc, &[x, y]).unwrap();
                assert_eq!(enc.decode(&alt).unwrap(), full[1]);
            }
        }
    }

    #[test]
    fn doubling_examples() {
        let enc = build_product_encoding::<f64>(3).unwrap();
        let m = verified(&enc);
        let w = build_doubling(&m).unwrap();
        assert_eq!(w.apply_numbers(&enc, &[0]).unwrap(), vec![0]);
        assert_eq!(w.apply_numbers(&enc, &[3]).unwrap(), vec![6]);
        assert_eq!(w.apply_numbers(&enc, &[5]).unwrap(), vec![2]);
        assert!(!is_unitary(&w.op, 1e-10));
        let w3 = crate::hilbert::power(&w.op, 3).unwrap();
        for b in 0..8 {
            let out = w3.apply(&enc.encode(b).unwrap()).unwrap();
            assert_eq!(enc.decode(&out).unwrap(), 0);
        }
    }

    #[test]
    fn closed_form_examples() {
        let enc = build_product_encoding::<f64>(3).unwrap();
        let m = verified(&enc);
        let order = m.require_ordering().unwrap();
        let five = BitFunction::from_value(&order, 5);
        let c0 = doubling_power_closed_form(&m, 0, &five).unwrap();
        assert_eq!(c0.direct, five);
        let c1 = doubling_power_closed_form(&m, 1, &five).unwrap();
        assert_eq!(c1.direct.ordered(&order), vec![0, 1, 0]);
        assert!(c1.matches_at_h_plus_one);
        assert!(!c1.matches_at_h);
        for v in 0..8 {
            let c = doubling_power_closed_form(&m, 3, &BitFunction::from_value(&order, v)).unwrap();
            assert_eq!(c.direct.value(&order), 0);
        }
    }

    #[test]
    fn multiplication_triple_examples() {
        let enc = build_product_encoding::<f64>(3).unwrap();
        let m = verified(&enc);
        let mul = build_multiplication_triple(&m).unwrap();
        assert_eq!(mul.apply_numbers(&enc, &[3, 5, 0]).unwrap(), vec![3, 0, 7]);
        assert_eq!(mul.apply_numbers(&enc, &[3, 5, 2]).unwrap(), vec![3, 0, 1]);
        assert_eq!(mul.apply_numbers(&enc, &[0, 5, 4]).unwrap(), vec![0, 0, 4]);
        assert_eq!(mul.apply_numbers(&enc, &[6, 0, 4]).unwrap(), vec![6, 0, 4]);
        assert_eq!(mul.factor_count(Granularity::Fine), 3 * 3 + 3);
        assert_eq!(mul.factor_count(Granularity::Coarse), 6);
        let literal = build_multiplication_triple_with(&m, false).unwrap();
        // register 2 keeps 2^(n-1)·β′ without the final doubling
        assert_eq!(literal.apply_numbers(&enc, &[3, 5, 0]).unwrap(), vec![3, 4, 7]);
    }

    #[test]
    fn multiplication_quadruple_examples() {
        let enc = build_product_encoding::<f64>(2).unwrap();
        let m = verified(&enc);
        let mul = build_multiplication_unitary(&m).unwrap();
        assert_eq!(mul.apply_numbers(&enc, &[3, 2, 0, 0]).unwrap(), vec![3, 2, 2, 0]);
        for x in 0..4 {
            for z in 0..4 {
                assert_eq!(mul.apply_numbers(&enc, &[x, 0, z, 0]).unwrap(), vec![x, 0, z, 0]);
            }
        }
        assert!(is_unitary(&mul.op, 1e-10));
        let u = verify_unitary_exhaustive(&enc, &mul).unwrap();
        assert!(u.pass(1e-8), "{u:?}");
    }

    #[test]
    fn quadruple_on_superposition_stays_normalized() {
        let enc = build_product_encoding::<f64>(2).unwrap();
        let mul = build_multiplication_unitary(&verified(&enc)).unwrap();
        let mut entries = Vec::new();
        for x in 0..4 {
            for y in 0..4 {
                entries.extend(enc.encode_registers(&[x, y, 0, 0]).unwrap().entries().to_vec());
            }
        }
        let amp = Complex::new(0.25, 0.0);
        let input = SparseVec::from_entries(256, entries.into_iter().map(|(i, a)| (i, a * amp)).collect());
        let out = mul.op.apply_sparse(&input);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        for x in 0..4u64 {
            for y in 0..4u64 {
                let img = enc.encode_registers(&[x, y, (x * y) % 4, 0]).unwrap();
                assert!((out.inner(&img).norm() - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn register_swap_moves_fields() {
        let s: Operator<f64> = register_swap(3, 2, 0, 2).unwrap();
        // registers (1, 2, 3) -> (3, 2, 1)
        let idx = (1 << 4) | (2 << 2) | 3;
        assert_eq!(s.column(idx), SparseVec::basis(64, (3 << 4) | (2 << 2) | 1));
    }

    #[test]
    fn entangled_addition_matches_conjugated_product_addition() {
        for n in 2..=3 {
            let pe = build_product_encoding::<f64>(n).unwrap();
            let ee = build_entangled_encoding::<f64>(n).unwrap();
            let p_add = build_addition(&verified(&pe)).unwrap();
            let e_add = build_addition(&verified(&ee)).unwrap();
            let u = crate::representations::build_entangling_unitary::<f64>(n).unwrap();
            let uu = u.tensor(&u).unwrap();
            let conj = uu.conjugate(&p_add.op).unwrap();
            assert!(approx_eq(&conj, &e_add.op, 1e-10).unwrap(), "n={n}");
        }
    }
}
