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

use multisuccessor::arithmetic::{build_addition, build_multiplication_triple};
use multisuccessor::hilbert::{schmidt_rank, tensor_states, Bipartition, Operator, SparseVec, State};
use multisuccessor::profiler::{
    count_resources, fit_scaling, profile, time_estimate, Granularity, Op, ResourceTrace, Scheme, Verdict,
};
use multisuccessor::representations::{build_encoding, Encoding};
use multisuccessor::successor::{build_product_model, build_product_model_in_order, ModelKind};
use num_complex::Complex;
use proptest::prelude::*;

fn encoding(entangled: bool, n: usize) -> Encoding<f64> {
    let kind = if entangled { ModelKind::Entangled } else { ModelKind::Product };
    build_encoding(kind, n).unwrap()
}

fn amplitude() -> impl Strategy<Value = Complex<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn addition_is_commutative_and_associative(entangled: bool, n in 2usize..=5, x: u64, y: u64, z: u64) {
        let enc = encoding(entangled, n);
        let m = enc.model().clone().verify().unwrap();
        let add = build_addition(&m).unwrap();
        let mask = (1u64 << n) - 1;
        let (x, y, z) = (x & mask, y & mask, z & mask);
        let sum = |a, b| add.apply_numbers(&enc, &[a, b]).unwrap()[1];
        prop_assert_eq!(sum(x, y), sum(y, x));
        prop_assert_eq!(sum(sum(x, y), z), sum(x, sum(y, z)));
        prop_assert_eq!(sum(x, y), (x + y) & mask);
    }

    #[test]
    fn multiplication_distributes(n in 1usize..=3, x: u64, y: u64, z: u64) {
        let enc = encoding(false, n);
        let m = enc.model().clone().verify().unwrap();
        let add = build_addition(&m).unwrap();
        let mul = build_multiplication_triple(&m).unwrap();
        let mask = (1u64 << n) - 1;
        let (x, y, z) = (x & mask, y & mask, z & mask);
        let sum = |a, b| add.apply_numbers(&enc, &[a, b]).unwrap()[1];
        let prod = |a, b| mul.apply_numbers(&enc, &[a, b, 0]).unwrap()[2];
        prop_assert_eq!(prod(x, sum(y, z)), sum(prod(x, y), prod(x, z)));
        prop_assert_eq!(prod(x, y), prod(y, x));
    }

    #[test]
    fn successor_powers_count_up(entangled: bool, n in 2usize..=6, k in 0u64..64) {
        let enc = encoding(entangled, n);
        let s = enc.model().successor_op().unwrap();
        let k = k % (1 << n);
        let mut v = enc.encode_sparse(0).unwrap().clone();
        for _ in 0..k {
            v = s.apply_sparse(&v);
        }
        prop_assert_eq!(enc.decode_registers(&v, 1).unwrap(), vec![k]);
    }

    #[test]
    fn insertion_order_does_not_matter(seed in proptest::collection::vec(0usize..100, 4)) {
        let n = 4;
        let mut order: Vec<usize> = (0..n).collect();
        for (i, s) in seed.iter().enumerate() {
            order.swap(i, s % n);
        }
        let a = build_product_model_in_order::<f64>(n, &order).unwrap();
        let b = build_product_model::<f64>(n).unwrap();
        prop_assert_eq!(a.derive_ordering().unwrap(), b.derive_ordering().unwrap());
        prop_assert!(a.check_all_properties().all_pass());
    }

    #[test]
    fn sparse_round_trip(amps in proptest::collection::vec(amplitude(), 16)) {
        let v = SparseVec::from_dense(&amps);
        let back = v.to_dense();
        for (a, b) in amps.iter().zip(&back) {
            prop_assert!((a - b).norm() <= f64::EPSILON);
        }
        prop_assert!(v.entries().windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn adjoint_reverses_products(p in Just((0..8usize).collect::<Vec<_>>()).prop_shuffle(),
                                 q in Just((0..8usize).collect::<Vec<_>>()).prop_shuffle()) {
        let a = Operator::<f64>::index_permutation(p).unwrap();
        let b = Operator::<f64>::index_permutation(q).unwrap();
        let lhs = a.compose(&b).unwrap().adjoint();
        let rhs = b.adjoint().compose(&a.adjoint()).unwrap();
        prop_assert!(multisuccessor::hilbert::approx_eq(&lhs, &rhs, 1e-12).unwrap());
    }

    #[test]
    fn product_states_have_rank_one(sites in proptest::collection::vec((amplitude(), amplitude()), 2..=5)) {
        let singles: Vec<State<f64>> = sites
            .iter()
            .filter_map(|(a, b)| {
                let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
                (norm > 1e-3).then(|| State::normalized(vec![a / norm, b / norm]).unwrap())
            })
            .collect();
        prop_assume!(singles.len() >= 2);
        let s = tensor_states(&singles).unwrap();
        let n = singles.len();
        for cut in Bipartition::single_site_cuts(n) {
            prop_assert_eq!(schmidt_rank(&s, &cut, 1e-8).unwrap(), 1);
        }
    }

    #[test]
    fn power_laws_fit_their_degree(a in 0.5..5.0f64, k in 1.0..3.0f64) {
        let traces: Vec<ResourceTrace> = (1..=12)
            .map(|n| ResourceTrace { scheme: Scheme::Unary, op: Op::Add, n, granularity: Granularity::Fine, count: a * (n as f64).powf(k) })
            .collect();
        let fit = fit_scaling(&traces).unwrap();
        match fit.verdict {
            Verdict::Polynomial { degree } => prop_assert!((degree - k).abs() < 1e-9),
            v => prop_assert!(false, "{:?}", v),
        }
        let cm = fit.cost_model.unwrap();
        for t in &traces {
            prop_assert!((time_estimate(&cm, t.n) / t.count - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn exponentials_fit_their_base(a in 0.5..5.0f64, base in 1.5..4.0f64) {
        let traces: Vec<ResourceTrace> = (1..=12)
            .map(|n| ResourceTrace { scheme: Scheme::Unary, op: Op::Add, n, granularity: Granularity::Fine, count: a * base.powi(n as i32) })
            .collect();
        match fit_scaling(&traces).unwrap().verdict {
            Verdict::Exponential { base: b } => prop_assert!((b - base).abs() < 1e-9),
            v => prop_assert!(false, "{:?}", v),
        }
    }
}

#[test]
fn counts_are_monotone() {
    for scheme in [Scheme::Multisuccessor, Scheme::Unary, Scheme::Squarewell] {
        for op in [Op::S, Op::Add, Op::Mul] {
            for g in [Granularity::Fine, Granularity::Coarse] {
                let c: Vec<f64> = profile(scheme, op, 1..=20, g).unwrap().iter().map(|t| t.count).collect();
                assert!(c.windows(2).all(|w| w[0] <= w[1]), "{scheme} {op}");
            }
        }
    }
}

#[test]
fn verdicts_stable_under_shift() {
    for scheme in [Scheme::Multisuccessor, Scheme::Unary, Scheme::Squarewell] {
        for op in [Op::Add, Op::Mul] {
            let a = fit_scaling(&profile(scheme, op, 3..=12, Granularity::Fine).unwrap()).unwrap();
            let b = fit_scaling(&profile(scheme, op, 5..=14, Granularity::Fine).unwrap()).unwrap();
            assert_eq!(a.verdict.name(), b.verdict.name(), "{scheme} {op}");
        }
    }
}

#[test]
fn fitted_unary_cost_model_reproduces_counts() {
    let traces = profile(Scheme::Unary, Op::Add, 5..=12, Granularity::Fine).unwrap();
    let cm = fit_scaling(&traces).unwrap().cost_model.unwrap();
    for t in &traces {
        let rel = (time_estimate(&cm, t.n) - t.count).abs() / t.count;
        assert!(rel < 0.05, "n={} rel={rel}", t.n);
    }
    assert!(count_resources(Scheme::Unary, Op::Add, 12, Granularity::Fine).unwrap().count == 4095.0);
}

#[test]
fn single_precision_model() {
    for n in 1..=4 {
        let m = build_product_model::<f32>(n).unwrap();
        assert!(m.check_all_properties().all_pass(), "n={n}");
        let enc = Encoding::from_model(m).unwrap();
        let add = build_addition(&enc.model().clone().verify().unwrap()).unwrap();
        let mask = (1u64 << n) - 1;
        for x in 0..=mask {
            assert_eq!(add.apply_numbers(&enc, &[x, mask]).unwrap()[1], (x + mask) & mask);
        }
    }
    let e = build_encoding::<f32>(ModelKind::Entangled, 3).unwrap();
    assert!(e.model().check_all_properties().all_pass());
}
