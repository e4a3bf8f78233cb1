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

//! Exhaustive check of the nine first-order number axioms on a finite
//! model, with the successor `S = V_{a_1}` and the order taken from decoded
//! values.
//!
//! ```text
//! 1. Sw ≠ 0                 2. Sw = Sy → w = y
//! 3. w + 0 = w              4. w + Sy = S(w + y)
//! 5. w × 0 = 0              6. w × Sy = (w × y) + w
//! 7. ¬(w < 0)               8. w < y ∨ w = y ∨ y < w
//! 9. w < Sy ↔ (w < y ∨ w = y)
//! ```

use serde::Serialize;
use thiserror::Error;

use crate::arithmetic::{ArithmeticError, ArithmeticKind, ArithmeticOperator};
use crate::representations::{Encoding, EncodingError};
use crate::scalar::Real;
use crate::successor::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AxiomError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
    #[error("expected {expected} operator, got {found:?}")]
    WrongOperator { expected: &'static str, found: ArithmeticKind },
}

/// How instances that run past `2^n − 1` are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WrapPolicy {
    /// Every instance is checked; wrap-around failures are reported.
    Strict,
    /// Instances in which `Sw` or `Sy` wraps to zero are skipped and counted.
    #[default]
    ExcludeWrap,
}

impl std::fmt::Display for WrapPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WrapPolicy::Strict => "strict",
            WrapPolicy::ExcludeWrap => "exclude-wrap",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomVerdict {
    pub axiom: u8,
    pub statement: &'static str,
    pub pass: bool,
    /// Integer witnesses of failing instances: `[w]` or `[w, y]`.
    pub counterexamples: Vec<Vec<u64>>,
    /// Instances skipped under [`WrapPolicy::ExcludeWrap`].
    pub exclusions: usize,
    /// Every counterexample involves a wrapping successor.
    pub failures_at_wrap: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub n: usize,
    pub policy: WrapPolicy,
    pub axioms: Vec<AxiomVerdict>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.axioms.iter().all(|a| a.pass)
    }

    pub fn get(&self, axiom: u8) -> Option<&AxiomVerdict> {
        self.axioms.iter().find(|a| a.axiom == axiom)
    }
}

const STATEMENTS: [&str; 9] = [
    "Sw != 0",
    "Sw = Sy -> w = y",
    "w + 0 = w",
    "w + Sy = S(w + y)",
    "w * 0 = 0",
    "w * Sy = (w * y) + w",
    "not (w < 0)",
    "w < y or w = y or y < w",
    "w < Sy <-> (w < y or w = y)",
];

/// `i < j` on the numbers decoded from the encoded states `i` and `j`.
pub fn order_relation<T: Real>(enc: &Encoding<T>, i: u64, j: u64) -> Result<bool, EncodingError> {
    let a = enc.decode_registers(enc.encode_sparse(i)?, 1)?[0];
    let b = enc.decode_registers(enc.encode_sparse(j)?, 1)?[0];
    Ok(a < b)
}

/// Integer tables of `S`, `+` and `×` read off the operators.
struct Tables {
    count: u64,
    value: Vec<u64>,
    succ: Vec<u64>,
    add: Vec<u64>,
    mul: Vec<u64>,
}

impl Tables {
    fn build<T: Real>(
        enc: &Encoding<T>,
        add: &ArithmeticOperator<T>,
        mul: &ArithmeticOperator<T>,
    ) -> Result<Self, AxiomError> {
        let count = enc.count();
        let s = enc.model().successor_op()?;
        let mut t = Tables { count, value: Vec::new(), succ: Vec::new(), add: Vec::new(), mul: Vec::new() };
        for w in 0..count {
            let state = enc.encode_sparse(w)?;
            t.value.push(enc.decode_registers(state, 1)?[0]);
            t.succ.push(enc.decode_registers(&s.apply_sparse(state), 1)?[0]);
        }
        for w in 0..count {
            for y in 0..count {
                t.add.push(add.apply_numbers(enc, &[w, y])?[1]);
                let prod = match mul.kind {
                    ArithmeticKind::MultiplicationTriple => mul.apply_numbers(enc, &[w, y, 0])?[2],
                    _ => mul.apply_numbers(enc, &[w, y, 0, 0])?[2],
                };
                t.mul.push(prod);
            }
        }
        Ok(t)
    }

    fn add(&self, w: u64, y: u64) -> u64 {
        self.add[(w * self.count + y) as usize]
    }

    fn mul(&self, w: u64, y: u64) -> u64 {
        self.mul[(w * self.count + y) as usize]
    }

    fn succ(&self, w: u64) -> u64 {
        self.succ[w as usize]
    }

    fn lt(&self, w: u64, y: u64) -> bool {
        self.value[w as usize] < self.value[y as usize]
    }

    fn wraps(&self, w: u64) -> bool {
        self.value[w as usize] == self.count - 1
    }
}

struct Tally {
    verdict: AxiomVerdict,
    policy: WrapPolicy,
}

impl Tally {
    fn new(axiom: u8, policy: WrapPolicy) -> Self {
        Tally {
            verdict: AxiomVerdict {
                axiom,
                statement: STATEMENTS[axiom as usize - 1],
                pass: true,
                counterexamples: Vec::new(),
                exclusions: 0,
                failures_at_wrap: true,
            },
            policy,
        }
    }

    fn check(&mut self, holds: bool, wraps: bool, witness: Vec<u64>) {
        if wraps && self.policy == WrapPolicy::ExcludeWrap {
            self.verdict.exclusions += 1;
            return;
        }
        if !holds {
            self.verdict.pass = false;
            self.verdict.failures_at_wrap &= wraps;
            self.verdict.counterexamples.push(witness);
        }
    }

    fn finish(mut self) -> AxiomVerdict {
        if self.verdict.counterexamples.is_empty() {
            self.verdict.failures_at_wrap = false;
        }
        self.verdict
    }
}

/// Checks all nine axioms over every state or pair of states.
///
/// Axioms 2–6 have no wrap-sensitive instances under modular semantics and
/// are never excluded. Axiom 1 is wrap-sensitive at `w = 2^n − 1` and axiom
/// 9 at `y = 2^n − 1`. Axiom 7 has no instance that needs excluding once the
/// order is read from decoded values.
pub fn check_axioms<T: Real>(
    enc: &Encoding<T>,
    add: &ArithmeticOperator<T>,
    mul: &ArithmeticOperator<T>,
    policy: WrapPolicy,
) -> Result<AxiomReport, AxiomError> {
    if add.kind != ArithmeticKind::Addition {
        return Err(AxiomError::WrongOperator { expected: "addition", found: add.kind });
    }
    if !matches!(mul.kind, ArithmeticKind::MultiplicationTriple | ArithmeticKind::MultiplicationQuadruple) {
        return Err(AxiomError::WrongOperator { expected: "multiplication", found: mul.kind });
    }
    let t = Tables::build(enc, add, mul)?;
    let zero = (0..t.count).find(|&w| t.value[w as usize] == 0).unwrap_or(0);
    let mut tallies: Vec<Tally> = (1..=9).map(|a| Tally::new(a, policy)).collect();
    for w in 0..t.count {
        let sw = t.succ(w);
        tallies[0].check(sw != zero, t.wraps(w), vec![w, sw]);
        tallies[2].check(t.add(w, zero) == w, false, vec![w]);
        tallies[4].check(t.mul(w, zero) == zero, false, vec![w]);
        tallies[6].check(!t.lt(w, zero), false, vec![w]);
        for y in 0..t.count {
            let sy = t.succ(y);
            tallies[1].check(sw != sy || w == y, false, vec![w, y]);
            tallies[3].check(t.add(w, sy) == t.succ(t.add(w, y)), false, vec![w, y]);
            tallies[5].check(t.mul(w, sy) == t.add(t.mul(w, y), w), false, vec![w, y]);
            tallies[7].check(t.lt(w, y) || w == y || t.lt(y, w), false, vec![w, y]);
            tallies[8].check(t.lt(w, sy) == (t.lt(w, y) || w == y), t.wraps(y), vec![w, y]);
        }
    }
    Ok(AxiomReport { n: enc.n(), policy, axioms: tallies.into_iter().map(Tally::finish).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{build_addition, build_multiplication_triple};
    use crate::representations::{build_entangled_encoding, build_product_encoding};

    fn report(enc: &Encoding<f64>, policy: WrapPolicy) -> AxiomReport {
        let m = enc.model().clone().verify().unwrap();
        let add = build_addition(&m).unwrap();
        let mul = build_multiplication_triple(&m).unwrap();
        check_axioms(enc, &add, &mul, policy).unwrap()
    }

    #[test]
    fn exclude_wrap_n3() {
        let r = report(&build_product_encoding(3).unwrap(), WrapPolicy::ExcludeWrap);
        assert!(r.all_pass(), "{r:?}");
        assert_eq!(r.get(1).unwrap().exclusions, 1);
        assert_eq!(r.get(9).unwrap().exclusions, 8);
        for a in 2..=8 {
            assert_eq!(r.get(a).unwrap().exclusions, 0);
        }
    }

    #[test]
    fn strict_n3() {
        let r = report(&build_product_encoding(3).unwrap(), WrapPolicy::Strict);
        let a1 = r.get(1).unwrap();
        assert!(!a1.pass);
        assert_eq!(a1.counterexamples, vec![vec![7, 0]]);
        assert!(a1.failures_at_wrap);
        let a9 = r.get(9).unwrap();
        assert_eq!(a9.counterexamples.len(), 8);
        assert!(a9.counterexamples.iter().all(|c| c[1] == 7));
        for a in 2..=8 {
            assert!(r.get(a).unwrap().pass);
        }
    }

    #[test]
    fn entangled_report_matches_product() {
        for policy in [WrapPolicy::Strict, WrapPolicy::ExcludeWrap] {
            let p = report(&build_product_encoding(3).unwrap(), policy);
            let e = report(&build_entangled_encoding(3).unwrap(), policy);
            assert_eq!(p, e);
        }
    }

    #[test]
    fn order_examples() {
        let enc = build_product_encoding::<f64>(4).unwrap();
        for k in 1..16 {
            assert!(order_relation(&enc, 0, k).unwrap());
        }
        assert!(!order_relation(&enc, 5, 5).unwrap());
        for w in 0..16 {
            for y in 0..15 {
                let lhs = order_relation(&enc, w, y + 1).unwrap();
                let rhs = order_relation(&enc, w, y).unwrap() || w == y;
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn rejects_swapped_operators() {
        let enc = build_product_encoding::<f64>(2).unwrap();
        let m = enc.model().clone().verify().unwrap();
        let add = build_addition(&m).unwrap();
        let err = check_axioms(&enc, &add, &add, WrapPolicy::Strict).unwrap_err();
        assert!(matches!(err, AxiomError::WrongOperator { .. }));
    }

    #[test]
    fn json_shape() {
        let r = report(&build_product_encoding(2).unwrap(), WrapPolicy::ExcludeWrap);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["policy"], "exclude-wrap");
        assert_eq!(v["axioms"].as_array().unwrap().len(), 9);
        assert_eq!(v["axioms"][0]["exclusions"], 1);
    }
}
