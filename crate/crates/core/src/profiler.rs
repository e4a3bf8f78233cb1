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

//! Elementary-operation counts for `S`, `+` and `×` under three number
//! encodings, and polynomial-versus-exponential classification of how
//! those counts grow with the bit count `n`.
//!
//! * `multisuccessor`: the binary model of this crate; counts come from the
//!   factored operators.
//! * `unary`: a particle on a lattice of `2^n` sites; every operation is a
//!   sequence of single-site shifts.
//! * `squarewell`: binary digits stored in wells of width `d_j = d_1·2^(1−j)`;
//!   acting on well `j` costs `4^(j−1)` energy units.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

pub use crate::arithmetic::Granularity;
use crate::arithmetic::{build_addition, build_multiplication_triple, ArithmeticError};
use crate::successor::{build_product_model, ModelError};

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("n must be at least 1")]
    ZeroWidth,
    #[error("fit needs at least {needed} distinct n values, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("duplicate n = {0} in fit input")]
    DuplicateN(usize),
    #[error("count at n = {n} is not positive: {count}")]
    NonPositive { n: usize, count: f64 },
    #[error("fit input mixes schemes or operations")]
    MixedTraces,
    #[error("invalid cost model: {0}")]
    InvalidCostModel(&'static str),
    #[error("unknown {what} '{value}'")]
    Unknown { what: &'static str, value: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Multisuccessor,
    Unary,
    Squarewell,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Op {
    S,
    #[serde(rename = "add")]
    Add,
    #[serde(rename = "mul")]
    Mul,
}

/// Which operand the count is taken for, where that matters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CostCase {
    #[default]
    Worst,
    Best,
    /// Expectation over uniformly distributed operands.
    Average,
}

macro_rules! named_enum {
    ($t:ty, $what:literal, $($v:path => $s:literal),+) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($v => $s),+ })
            }
        }
        impl FromStr for $t {
            type Err = ProfileError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($s => Ok($v),)+
                    _ => Err(ProfileError::Unknown { what: $what, value: s.to_string() }),
                }
            }
        }
    };
}

named_enum!(Scheme, "scheme", Scheme::Multisuccessor => "multisuccessor", Scheme::Unary => "unary", Scheme::Squarewell => "squarewell");
named_enum!(Op, "operation", Op::S => "S", Op::Add => "add", Op::Mul => "mul");
named_enum!(CostCase, "cost case", CostCase::Worst => "worst", CostCase::Best => "best", CostCase::Average => "average");

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResourceTrace {
    pub scheme: Scheme,
    pub op: Op,
    pub n: usize,
    pub granularity: Granularity,
    /// Operation count, or energy units for `squarewell`.
    pub count: f64,
}

fn pow2(n: usize) -> f64 {
    2f64.powi(n as i32)
}

/// `Σ_{j=1}^{n} 4^(j−1)`: one action on every well.
fn all_wells(n: usize) -> f64 {
    (4f64.powi(n as i32) - 1.0) / 3.0
}

/// Worst-case count; see [`count_resources_case`].
pub fn count_resources(scheme: Scheme, op: Op, n: usize, granularity: Granularity) -> Result<ResourceTrace, ProfileError> {
    count_resources_case(scheme, op, n, granularity, CostCase::Worst)
}

pub fn count_resources_case(
    scheme: Scheme,
    op: Op,
    n: usize,
    granularity: Granularity,
    case: CostCase,
) -> Result<ResourceTrace, ProfileError> {
    if n == 0 {
        return Err(ProfileError::ZeroWidth);
    }
    let nf = n as f64;
    let max = pow2(n) - 1.0;
    let count = match (scheme, op) {
        (_, Op::S) if scheme != Scheme::Squarewell => 1.0,
        (Scheme::Multisuccessor, Op::Add) => nf,
        (Scheme::Multisuccessor, Op::Mul) => match granularity {
            Granularity::Fine => nf * nf + nf,
            Granularity::Coarse => 2.0 * nf,
        },
        (Scheme::Unary, Op::Add) => match case {
            CostCase::Worst => max,
            CostCase::Best => 0.0,
            CostCase::Average => max / 2.0,
        },
        (Scheme::Unary, Op::Mul) => match case {
            CostCase::Worst => max * max,
            CostCase::Best => 0.0,
            CostCase::Average => (max / 2.0) * (max / 2.0),
        },
        // the carry chain flips well j iff wells 1..j−1 all hold 1
        (Scheme::Squarewell, Op::S) => match case {
            CostCase::Worst => all_wells(n),
            CostCase::Best => 1.0,
            CostCase::Average => max,
        },
        (Scheme::Squarewell, Op::Add) => all_wells(n),
        // n controlled additions and n doublings, each touching every well
        (Scheme::Squarewell, Op::Mul) => 2.0 * nf * all_wells(n),
        _ => unreachable!(),
    };
    Ok(ResourceTrace { scheme, op, n, granularity, count })
}

/// Factor count reported by the operator builders on the product model.
pub fn measured_multisuccessor(op: Op, n: usize, granularity: Granularity) -> Result<usize, ProfileError> {
    let m = build_product_model::<f64>(n)?.verify()?;
    Ok(match op {
        Op::S => {
            m.successor_op()?;
            1
        }
        Op::Add => build_addition(&m)?.factor_count(granularity),
        Op::Mul => build_multiplication_triple(&m)?.factor_count(granularity),
    })
}

/// A particle on `2^n` lattice sites, moved one site per `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryLattice {
    sites: u64,
    position: u64,
    steps: u64,
}

impl UnaryLattice {
    pub fn new(n: usize, position: u64) -> Self {
        let sites = 1u64 << n;
        UnaryLattice { sites, position: position % sites, steps: 0 }
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Moves to the adjoining site.
    pub fn shift(&mut self) {
        self.position = (self.position + 1) % self.sites;
        self.steps += 1;
    }

    pub fn add(&mut self, y: u64) {
        for _ in 0..y {
            self.shift();
        }
    }

    /// From position zero, adds `x` to the particle `y` times.
    pub fn multiply(n: usize, x: u64, y: u64) -> Self {
        let mut l = UnaryLattice::new(n, 0);
        for _ in 0..y {
            l.add(x);
        }
        l
    }
}

/// Width of well `j` (from 1) when each well is half as wide as the last.
pub fn squarewell_width(j: u32, d1: f64) -> f64 {
    d1 * 2f64.powi(1 - j as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares `y = slope·x + intercept`. A constant `y` is fitted
/// exactly and gets `r2 = 1`.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> Regression {
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2 = if ss_tot <= f64::EPSILON * my.abs().max(1.0) { 1.0 } else { 1.0 - ss_res / ss_tot };
    Regression { slope, intercept, r2 }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Verdict {
    Polynomial { degree: f64 },
    Exponential { base: f64 },
    Inconclusive,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Polynomial { .. } => "polynomial",
            Verdict::Exponential { .. } => "exponential",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    Polynomial,
    Exponential,
}

/// `t = c⁻¹·n^k` or `t = c⁻¹·K^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CostModel {
    pub kind: CostKind,
    pub c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub big_k: Option<f64>,
}

impl CostModel {
    pub fn polynomial(c: f64, k: f64) -> Result<Self, ProfileError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(ProfileError::InvalidCostModel("c must be positive"));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(ProfileError::InvalidCostModel("k must be positive"));
        }
        Ok(CostModel { kind: CostKind::Polynomial, c, k: Some(k), big_k: None })
    }

    pub fn exponential(c: f64, big_k: f64) -> Result<Self, ProfileError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(ProfileError::InvalidCostModel("c must be positive"));
        }
        if !(big_k > 1.0 && big_k.is_finite()) {
            return Err(ProfileError::InvalidCostModel("K must exceed 1"));
        }
        Ok(CostModel { kind: CostKind::Exponential, c, k: None, big_k: Some(big_k) })
    }
}

pub fn time_estimate(cm: &CostModel, n: usize) -> f64 {
    let nf = n as f64;
    match (cm.k, cm.big_k) {
        (Some(k), _) => nf.powf(k) / cm.c,
        (None, Some(big_k)) => big_k.powf(nf) / cm.c,
        (None, None) => f64::NAN,
    }
}

/// `R = c·n^(1−k)` or `R = c·n·K^(−n)`.
pub fn rate(cm: &CostModel, n: usize) -> f64 {
    let nf = n as f64;
    match (cm.k, cm.big_k) {
        (Some(k), _) => cm.c * nf.powf(1.0 - k),
        (None, Some(big_k)) => cm.c * nf * big_k.powf(-nf),
        (None, None) => f64::NAN,
    }
}

pub const MIN_FIT_POINTS: usize = 5;
pub const MIN_R2: f64 = 0.99;

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub scheme: Scheme,
    pub op: Op,
    pub verdict: Verdict,
    /// `R²` of the winning regression.
    pub r2: f64,
    /// `ln count` against `ln n`.
    pub log_log: Regression,
    /// `ln count` against `n`.
    pub log_linear: Regression,
    /// From the winning regression over the whole range.
    pub cost_model: Option<CostModel>,
}

/// Classifies the growth of `traces` by comparing the fits of `ln count`
/// against `ln n` and against `n`.
///
/// The reported degree or base is the slope over the upper half of the
/// n-range, which is where lower-order terms matter least.
pub fn fit_scaling(traces: &[ResourceTrace]) -> Result<ScalingFit, ProfileError> {
    let first = traces.first().ok_or(ProfileError::TooFewPoints { needed: MIN_FIT_POINTS, found: 0 })?;
    if traces.iter().any(|t| t.scheme != first.scheme || t.op != first.op) {
        return Err(ProfileError::MixedTraces);
    }
    let mut pts: Vec<(usize, f64)> = traces.iter().map(|t| (t.n, t.count)).collect();
    pts.sort_by_key(|p| p.0);
    for w in pts.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(ProfileError::DuplicateN(w[0].0));
        }
    }
    if pts.len() < MIN_FIT_POINTS {
        return Err(ProfileError::TooFewPoints { needed: MIN_FIT_POINTS, found: pts.len() });
    }
    if let Some(&(n, count)) = pts.iter().find(|p| p.1 <= 0.0 || p.1.is_nan()) {
        return Err(ProfileError::NonPositive { n, count });
    }
    let ns: Vec<f64> = pts.iter().map(|p| p.0 as f64).collect();
    let ln_n: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let ln_c: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let log_log = linear_regression(&ln_n, &ln_c);
    let log_linear = linear_regression(&ns, &ln_c);

    let tail = pts.len() / 2;
    let (polynomial, r2) = if log_log.r2 >= log_linear.r2 { (true, log_log.r2) } else { (false, log_linear.r2) };
    let (verdict, cost_model) = if r2 < MIN_R2 {
        (Verdict::Inconclusive, None)
    } else if polynomial {
        let degree = linear_regression(&ln_n[tail..], &ln_c[tail..]).slope;
        (Verdict::Polynomial { degree }, CostModel::polynomial((-log_log.intercept).exp(), log_log.slope).ok())
    } else {
        let base = linear_regression(&ns[tail..], &ln_c[tail..]).slope.exp();
        (
            Verdict::Exponential { base },
            CostModel::exponential((-log_linear.intercept).exp(), log_linear.slope.exp()).ok(),
        )
    };
    Ok(ScalingFit { scheme: first.scheme, op: first.op, verdict, r2, log_log, log_linear, cost_model })
}

#[derive(Serialize)]
struct FitParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    base: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost_model: Option<CostModel>,
}

impl Serialize for ScalingFit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            scheme: Scheme,
            op: Op,
            verdict: &'static str,
            params: FitParams,
            r2: f64,
        }
        let (degree, base) = match self.verdict {
            Verdict::Polynomial { degree } => (Some(degree), None),
            Verdict::Exponential { base } => (None, Some(base)),
            Verdict::Inconclusive => (None, None),
        };
        Out {
            scheme: self.scheme,
            op: self.op,
            verdict: self.verdict.name(),
            params: FitParams { degree, base, cost_model: self.cost_model },
            r2: self.r2,
        }
        .serialize(s)
    }
}

/// Traces for every `n` in `range`.
pub fn profile(
    scheme: Scheme,
    op: Op,
    range: std::ops::RangeInclusive<usize>,
    granularity: Granularity,
) -> Result<Vec<ResourceTrace>, ProfileError> {
    range.map(|n| count_resources(scheme, op, n, granularity)).collect()
}

fn format_count(c: f64) -> String {
    if c.fract() == 0.0 && c.abs() < 9.007_199_254_740_992e15 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    }
}

/// `scheme,op,n,granularity,count` with a header row.
pub fn write_csv<W: Write>(out: W, traces: &[ResourceTrace]) -> Result<(), ProfileError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scheme", "op", "n", "granularity", "count"])?;
    for t in traces {
        let gran = match t.granularity {
            Granularity::Coarse => "coarse",
            Granularity::Fine => "fine",
        };
        w.write_record([t.scheme.to_string(), t.op.to_string(), t.n.to_string(), gran.to_string(), format_count(t.count)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_examples() {
        let c = |s, o, n| count_resources(s, o, n, Granularity::Fine).unwrap().count;
        assert_eq!(c(Scheme::Multisuccessor, Op::Add, 4), 4.0);
        assert_eq!(c(Scheme::Unary, Op::Add, 4), 15.0);
        assert_eq!(c(Scheme::Squarewell, Op::Add, 3), 21.0);
        assert_eq!(c(Scheme::Multisuccessor, Op::Mul, 3), 12.0);
        assert_eq!(count_resources(Scheme::Multisuccessor, Op::Mul, 3, Granularity::Coarse).unwrap().count, 6.0);
        let best = count_resources_case(Scheme::Squarewell, Op::S, 3, Granularity::Fine, CostCase::Best).unwrap();
        assert_eq!(best.count, 1.0);
        assert_eq!(c(Scheme::Squarewell, Op::S, 3), 21.0);
        assert!(count_resources(Scheme::Unary, Op::S, 0, Granularity::Fine).is_err());
    }

    #[test]
    fn squarewell_average_successor_matches_enumeration() {
        for n in 1..=8usize {
            let mut total = 0.0;
            for v in 0u64..1 << n {
                // wells flipped by +1: the trailing ones and the next zero
                let flipped = ((v ^ (v + 1)) & ((1 << n) - 1)).count_ones() as i32;
                total += (0..flipped).map(|j| 4f64.powi(j)).sum::<f64>();
            }
            let avg = count_resources_case(Scheme::Squarewell, Op::S, n, Granularity::Fine, CostCase::Average).unwrap();
            assert!((total / pow2(n) - avg.count).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn lattice_simulation_matches_unary_counts() {
        for n in 1..=8 {
            let max = (1u64 << n) - 1;
            let mut l = UnaryLattice::new(n, 0);
            l.add(max);
            assert_eq!(l.position(), max);
            assert_eq!(l.steps() as f64, count_resources(Scheme::Unary, Op::Add, n, Granularity::Fine).unwrap().count);
            let m = UnaryLattice::multiply(n, max, max);
            assert_eq!(m.position(), (max * max) % (1 << n));
            assert_eq!(m.steps() as f64, count_resources(Scheme::Unary, Op::Mul, n, Granularity::Fine).unwrap().count);
        }
    }

    #[test]
    fn fit_examples() {
        let line: Vec<ResourceTrace> = profile(Scheme::Multisuccessor, Op::Add, 1..=10, Granularity::Fine).unwrap();
        match fit_scaling(&line).unwrap().verdict {
            Verdict::Polynomial { degree } => assert!((degree - 1.0).abs() < 0.05),
            v => panic!("{v:?}"),
        }
        let unary = profile(Scheme::Unary, Op::Add, 1..=12, Granularity::Fine).unwrap();
        match fit_scaling(&unary).unwrap().verdict {
            Verdict::Exponential { base } => assert!((base - 2.0).abs() < 0.05),
            v => panic!("{v:?}"),
        }
        let mul = profile(Scheme::Multisuccessor, Op::Mul, 2..=12, Granularity::Fine).unwrap();
        match fit_scaling(&mul).unwrap().verdict {
            Verdict::Polynomial { degree } => assert!((degree - 2.0).abs() < 0.15, "{degree}"),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn fit_rejects_bad_input() {
        let short = profile(Scheme::Unary, Op::Add, 1..=4, Granularity::Fine).unwrap();
        assert!(matches!(fit_scaling(&short), Err(ProfileError::TooFewPoints { .. })));
        let mut mixed = profile(Scheme::Unary, Op::Add, 1..=6, Granularity::Fine).unwrap();
        mixed.push(count_resources(Scheme::Unary, Op::Mul, 7, Granularity::Fine).unwrap());
        assert!(matches!(fit_scaling(&mixed), Err(ProfileError::MixedTraces)));
        let mut dup = profile(Scheme::Unary, Op::Add, 1..=6, Granularity::Fine).unwrap();
        dup.push(dup[0]);
        assert!(matches!(fit_scaling(&dup), Err(ProfileError::DuplicateN(1))));
    }

    #[test]
    fn noisy_counts_are_inconclusive() {
        let traces: Vec<ResourceTrace> = [5.0, 1.0, 9.0, 2.0, 7.0, 1.5, 8.0]
            .iter()
            .enumerate()
            .map(|(i, &count)| ResourceTrace { scheme: Scheme::Unary, op: Op::Add, n: i + 1, granularity: Granularity::Fine, count })
            .collect();
        let fit = fit_scaling(&traces).unwrap();
        assert_eq!(fit.verdict, Verdict::Inconclusive);
        assert!(fit.cost_model.is_none());
    }

    #[test]
    fn formulas() {
        let p = CostModel::polynomial(1.0, 1.0).unwrap();
        assert_eq!(time_estimate(&p, 7), 7.0);
        assert_eq!(rate(&p, 7), 1.0);
        let e = CostModel::exponential(1.0, 2.0).unwrap();
        assert_eq!(time_estimate(&e, 10), 1024.0);
        assert_eq!(rate(&e, 10), 10.0 / 1024.0);
        assert!(CostModel::exponential(1.0, 1.0).is_err());
        assert!(CostModel::polynomial(0.0, 1.0).is_err());
        assert_eq!(squarewell_width(1, 3.0), 3.0);
        assert_eq!(squarewell_width(4, 8.0), 1.0);
    }

    #[test]
    fn csv_output() {
        let traces = profile(Scheme::Unary, Op::Add, 1..=3, Granularity::Coarse).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &traces).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "scheme,op,n,granularity,count\nunary,add,1,coarse,1\nunary,add,2,coarse,3\nunary,add,3,coarse,7\n"
        );
    }

    #[test]
    fn json_fit_shape() {
        let fit = fit_scaling(&profile(Scheme::Squarewell, Op::Add, 1..=8, Granularity::Fine).unwrap()).unwrap();
        let v = serde_json::to_value(&fit).unwrap();
        assert_eq!(v["scheme"], "squarewell");
        assert_eq!(v["op"], "add");
        assert_eq!(v["verdict"], "exponential");
        assert!((v["params"]["base"].as_f64().unwrap() - 4.0).abs() < 0.05);
    }

    #[test]
    fn names_round_trip() {
        for s in [Scheme::Multisuccessor, Scheme::Unary, Scheme::Squarewell] {
            assert_eq!(s.to_string().parse::<Scheme>().unwrap(), s);
        }
        for o in [Op::S, Op::Add, Op::Mul] {
            assert_eq!(o.to_string().parse::<Op>().unwrap(), o);
        }
        assert!("cubic".parse::<Scheme>().is_err());
    }
}
