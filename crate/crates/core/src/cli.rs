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

//! Batch front end: `msm <command> [options]`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on a
//! usage or configuration error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arithmetic::{
    build_addition, build_doubling, build_multiplication_triple, build_multiplication_unitary, verify_addition,
    verify_doubling, verify_multiplication_quadruple, verify_multiplication_triple, verify_unitary_exhaustive,
    Granularity, OracleOutcome,
};
use crate::axioms::{check_axioms, WrapPolicy};
use crate::profiler::{self, CostCase, Op, Scheme, Verdict};
use crate::representations::{build_entangled_model, Encoding, EntanglementVerdict};
use crate::successor::{build_product_model, ModelKind, VerifiedModel};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest `n` per number of registers an operator acts on.
pub const CAP_SINGLE: usize = 10;
pub const CAP_PAIR: usize = 6;
pub const CAP_TRIPLE: usize = 4;
pub const CAP_QUADRUPLE: usize = 3;
pub const CAP_PROFILE: usize = 64;

const MAX_WITNESSES: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "msm", version, about = "Multisuccessor arithmetic models: build, verify, profile")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a model and print its ordering and number states.
    Build(ModelOpts),
    /// Check the twelve operator properties.
    VerifyProperties(ModelOpts),
    /// Check the nine number axioms.
    VerifyAxioms(AxiomOpts),
    /// Compare arithmetic operators against modular integer arithmetic.
    VerifyArithmetic(ArithmeticOpts),
    /// Schmidt ranks of every number state across every single-site cut.
    CertifyEntanglement(ModelOpts),
    /// Resource counts and scaling fit for one scheme and operation.
    Profile(ProfileOpts),
    /// Properties, axioms and every arithmetic oracle within the caps.
    Report(AxiomOpts),
}

#[derive(Args, Debug, Clone)]
struct OutputOpts {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ModelOpts {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = EncodingArg::Product)]
    encoding: EncodingArg,
    /// Tolerance of the operator property checks.
    #[arg(long)]
    tol: Option<f64>,
    /// Amplitude tolerance of the arithmetic oracles.
    #[arg(long)]
    oracle_tol: Option<f64>,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Args, Debug, Clone)]
struct AxiomOpts {
    #[command(flatten)]
    model: ModelOpts,
    #[arg(long, value_enum, default_value_t = PolicyArg::ExcludeWrap)]
    policy: PolicyArg,
}

#[derive(Args, Debug, Clone)]
struct ArithmeticOpts {
    #[command(flatten)]
    model: ModelOpts,
    #[arg(long, value_enum, default_value_t = ArithOp::All)]
    op: ArithOp,
}

#[derive(Args, Debug, Clone)]
struct ProfileOpts {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long, value_enum)]
    op: OpArg,
    /// Single value or inclusive range `lo..hi`.
    #[arg(long)]
    n: NRange,
    #[arg(long, value_enum, default_value_t = GranularityArg::Fine)]
    granularity: GranularityArg,
    #[arg(long, value_enum, default_value_t = CaseArg::Worst)]
    case: CaseArg,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum EncodingArg {
    Product,
    Entangled,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PolicyArg {
    Strict,
    ExcludeWrap,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ArithOp {
    Add,
    Double,
    Mul,
    MulUnitary,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SchemeArg {
    Multisuccessor,
    Unary,
    Squarewell,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OpArg {
    #[value(name = "S", alias = "s")]
    S,
    Add,
    Mul,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum GranularityArg {
    Fine,
    Coarse,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CaseArg {
    Worst,
    Best,
    Average,
}

/// Inclusive range of register widths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad n '{t}': {e}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo == 0 || lo > hi {
            return Err(format!("empty or zero range '{s}'"));
        }
        Ok(NRange { lo, hi })
    }
}

/// Echo of the options a report was produced with. The output path is left
/// out so that reports written to different files compare equal.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_range: Option<NRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub encoding: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub granularity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub format: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub tag: String,
    pub pass: bool,
    pub witnesses: Vec<Value>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub total_ms: f64,
    pub phases: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub config: RunConfig,
    /// Sorted by name.
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
    pub timings: Timings,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "{} {} [{}] {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.tag, c.detail);
        }
        for k in &self.skipped {
            let _ = writeln!(s, "SKIP {k}");
        }
        s
    }
}

/// A usage or configuration problem; exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

struct Session {
    report: Report,
    started: Instant,
}

impl Session {
    fn new(config: RunConfig) -> Self {
        Session {
            report: Report {
                version: VERSION,
                config,
                checks: Vec::new(),
                skipped: Vec::new(),
                data: None,
                timings: Timings::default(),
            },
            started: Instant::now(),
        }
    }

    fn phase<R>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> R) -> R {
        let t = Instant::now();
        let r = f(self);
        self.report.timings.phases.insert(name.to_string(), t.elapsed().as_secs_f64() * 1e3);
        r
    }

    fn check(&mut self, name: impl Into<String>, tag: &str, pass: bool, witnesses: Vec<Value>, detail: impl Into<String>) {
        self.report.checks.push(CheckResult {
            name: name.into(),
            tag: tag.to_string(),
            pass,
            witnesses,
            detail: detail.into(),
        });
    }

    fn finish(mut self) -> Report {
        self.report.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.report.timings.total_ms = self.started.elapsed().as_secs_f64() * 1e3;
        self.report
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("msm: error: {msg}");
            2
        }
    }
}

fn execute(cmd: Command) -> Result<i32, UsageError> {
    match cmd {
        Command::Profile(p) => run_profile(p),
        Command::Build(m) => model_command("build", m, None, None),
        Command::VerifyProperties(m) => model_command("verify-properties", m, None, None),
        Command::CertifyEntanglement(m) => model_command("certify-entanglement", m, None, None),
        Command::VerifyAxioms(a) => model_command("verify-axioms", a.model, Some(a.policy), None),
        Command::VerifyArithmetic(a) => model_command("verify-arithmetic", a.model, None, Some(a.op)),
        Command::Report(a) => model_command("report", a.model, Some(a.policy), None),
    }
}

fn cap_for(command: &str, op: Option<ArithOp>) -> usize {
    match (command, op) {
        ("verify-axioms" | "report", _) => CAP_TRIPLE,
        ("verify-arithmetic", Some(ArithOp::Add)) => CAP_PAIR,
        ("verify-arithmetic", Some(ArithOp::Double)) => CAP_SINGLE,
        ("verify-arithmetic", Some(ArithOp::Mul)) => CAP_TRIPLE,
        ("verify-arithmetic", _) => CAP_QUADRUPLE,
        _ => CAP_SINGLE,
    }
}

fn policy_of(p: PolicyArg) -> WrapPolicy {
    match p {
        PolicyArg::Strict => WrapPolicy::Strict,
        PolicyArg::ExcludeWrap => WrapPolicy::ExcludeWrap,
    }
}

fn kebab<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn model_command(command: &str, m: ModelOpts, policy: Option<PolicyArg>, op: Option<ArithOp>) -> Result<i32, UsageError> {
    let cap = cap_for(command, op);
    if m.n == 0 || m.n > cap {
        return Err(usage(format!("{command}: n = {} outside 1..={cap}", m.n)));
    }
    if m.encoding == EncodingArg::Entangled && m.n < 2 {
        return Err(usage(format!("{command}: the entangled encoding needs n >= 2")));
    }
    if m.out.format == Format::Csv {
        return Err(usage(format!("{command}: csv output is only available for profile")));
    }
    for t in [m.tol, m.oracle_tol].into_iter().flatten() {
        if !(t > 0.0 && t.is_finite()) {
            return Err(usage(format!("tolerance must be positive, got {t}")));
        }
    }
    let config = RunConfig {
        command: command.to_string(),
        n: Some(m.n),
        encoding: Some(kebab(&m.encoding)),
        policy: policy.map(|p| kebab(&p)),
        op: op.map(|o| kebab(&o)),
        format: kebab(&m.out.format),
        tolerance: m.tol,
        oracle_tolerance: m.oracle_tol,
        ..RunConfig::default()
    };
    let mut s = Session::new(config);
    let ctx = s.phase("build", |_| Context::build(&m))?;
    match command {
        "build" => {
            s.check("build", "model", true, Vec::new(), format!("{} model with n = {}, all properties pass", ctx.kind, m.n));
            s.report.data = Some(ctx.describe());
        }
        "verify-properties" => s.phase("properties", |s| ctx.properties(s)),
        "certify-entanglement" => s.phase("entanglement", |s| ctx.entanglement(s))?,
        "verify-axioms" => s.phase("axioms", |s| ctx.axioms(s, policy_of(policy.unwrap())))?,
        "verify-arithmetic" => ctx.arithmetic(&mut s, op.unwrap_or(ArithOp::All))?,
        "report" => {
            s.phase("properties", |s| ctx.properties(s));
            s.phase("axioms", |s| ctx.axioms(s, policy_of(policy.unwrap())))?;
            let op = if m.n <= CAP_QUADRUPLE { ArithOp::All } else { ArithOp::Mul };
            ctx.arithmetic(&mut s, op)?;
            if m.n > CAP_QUADRUPLE {
                s.report.skipped.push(format!("multiplication-quadruple: n exceeds {CAP_QUADRUPLE}"));
            }
        }
        _ => unreachable!(),
    }
    emit(s.finish(), &m.out)
}

fn emit(report: Report, out: &OutputOpts) -> Result<i32, UsageError> {
    let body = match out.format {
        Format::Text => report.to_text(),
        _ => report.to_json(),
    };
    write_out(out, body.as_bytes())?;
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn write_out(out: &OutputOpts, bytes: &[u8]) -> Result<(), UsageError> {
    match &out.output {
        Some(p) => std::fs::write(p, bytes).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).map_err(|e| usage(format!("cannot write output: {e}")))
        }
    }
}

struct Context {
    kind: ModelKind,
    n: usize,
    enc: Encoding<f64>,
    model: VerifiedModel<f64>,
    oracle_tol: f64,
}

fn witness_list<T: Serialize>(items: impl IntoIterator<Item = T>) -> Vec<Value> {
    items.into_iter().take(MAX_WITNESSES).map(|w| serde_json::to_value(w).unwrap_or(Value::Null)).collect()
}

impl Context {
    fn build(m: &ModelOpts) -> Result<Self, UsageError> {
        let model = match m.encoding {
            EncodingArg::Product => build_product_model::<f64>(m.n)?,
            EncodingArg::Entangled => build_entangled_model::<f64>(m.n)?,
        };
        let model = match m.tol {
            Some(t) => model.with_tolerance(t),
            None => model,
        };
        let enc = Encoding::from_model(model)?;
        let model = enc.model().clone().verify().map_err(|e| usage(format!("successor::verify: {e}")))?;
        Ok(Context { kind: enc.kind(), n: m.n, enc, model, oracle_tol: m.oracle_tol.unwrap_or(1e-8) })
    }

    fn describe(&self) -> Value {
        let order: Vec<String> = self.model.require_ordering().unwrap_or_default().iter().map(|l| l.to_string()).collect();
        let states: Vec<Value> = (0..self.enc.count())
            .map(|k| {
                let v = self.enc.encode_sparse(k).expect("k < 2^n");
                Value::Array(v.entries().iter().map(|(i, a)| json!([i, a.re, a.im])).collect())
            })
            .collect();
        json!({ "n": self.n, "kind": self.kind, "ordering": order, "states": states })
    }

    fn properties(&self, s: &mut Session) {
        for c in &self.model.report().checks {
            let detail = match &c.subject {
                Some(l) => format!("{} (subject {l})", c.detail),
                None => c.detail.clone(),
            };
            let detail = if c.pass { detail } else { format!("successor::check_all_properties: {detail}") };
            s.check(format!("property-{:02}", c.property), "operator-property", c.pass, witness_list(&c.witnesses), detail);
        }
    }

    fn entanglement(&self, s: &mut Session) -> Result<(), UsageError> {
        let cert = self.enc.certify_entanglement()?;
        let (expected_rank, expected) = match self.kind {
            ModelKind::Entangled => (2, EntanglementVerdict::AllEntangled),
            _ => (1, EntanglementVerdict::AllProduct),
        };
        let off: Vec<usize> = (0..cert.ranks.len()).filter(|&k| cert.ranks[k].iter().any(|&r| r != expected_rank)).collect();
        let pass = cert.verdict == expected && off.is_empty();
        let detail = if pass {
            format!("{} numbers, Schmidt rank {expected_rank} on every single-site cut", cert.ranks.len())
        } else {
            format!("representations::certify_entanglement: {} numbers off rank {expected_rank}", off.len())
        };
        s.check("entanglement-certificate", "entanglement", pass, witness_list(&off), detail);
        if self.n <= 6 {
            s.report.data = Some(json!({ "verdict": cert.verdict, "ranks": cert.ranks }));
        } else {
            s.report.data = Some(json!({ "verdict": cert.verdict }));
        }
        Ok(())
    }

    fn axioms(&self, s: &mut Session, policy: WrapPolicy) -> Result<(), UsageError> {
        let add = build_addition(&self.model)?;
        let mul = build_multiplication_triple(&self.model)?;
        let r = check_axioms(&self.enc, &add, &mul, policy)?;
        for a in &r.axioms {
            let mut detail = format!("{}; exclusions {}", a.statement, a.exclusions);
            if !a.pass {
                detail = format!(
                    "axioms::check_axioms: {} counterexamples{}; {detail}",
                    a.counterexamples.len(),
                    if a.failures_at_wrap { ", all at wrap-around" } else { "" }
                );
            }
            s.check(format!("axiom-{}", a.axiom), "number-axiom", a.pass, witness_list(&a.counterexamples), detail);
        }
        Ok(())
    }

    fn oracle(&self, s: &mut Session, name: &str, operation: &str, outcome: OracleOutcome) {
        let pass = outcome.pass(self.oracle_tol);
        let detail = if pass {
            format!("{} cases, all match, amplitude deviation below {:e}", outcome.cases, self.oracle_tol)
        } else if outcome.mismatches.is_empty() {
            format!("arithmetic::{operation}: amplitude deviation above {:e}", self.oracle_tol)
        } else {
            format!("arithmetic::{operation}: {} of {} cases mismatch", outcome.mismatches.len(), outcome.cases)
        };
        s.check(name, "arithmetic-oracle", pass, witness_list(&outcome.mismatches), detail);
    }

    fn arithmetic(&self, s: &mut Session, op: ArithOp) -> Result<(), UsageError> {
        let n = self.n;
        let all = op == ArithOp::All;
        if all || op == ArithOp::Add {
            let r = s.phase("addition", |_| build_addition(&self.model).and_then(|a| verify_addition(&self.enc, &a)))?;
            self.oracle(s, "addition-oracle", "build_addition", r);
        }
        if all || op == ArithOp::Double {
            let w = build_doubling(&self.model)?;
            let r = s.phase("doubling", |_| verify_doubling(&self.enc, &w))?;
            self.oracle(s, "doubling-oracle", "build_doubling", r);
            let failing = s.phase("doubling-power", |_| self.doubling_power(&w))?;
            let detail = if failing.is_empty() {
                format!("W^{n} and W^{} send all {} states to zero", n + 1, self.enc.count())
            } else {
                format!("arithmetic::build_doubling: {} states not annihilated", failing.len())
            };
            s.check("doubling-power", "closed-form", failing.is_empty(), witness_list(&failing), detail);
        }
        if all || op == ArithOp::Mul {
            let r = s.phase("multiplication", |_| {
                build_multiplication_triple(&self.model).and_then(|m| verify_multiplication_triple(&self.enc, &m, true))
            })?;
            self.oracle(s, "multiplication-oracle", "build_multiplication_triple", r);
        }
        if (all || op == ArithOp::MulUnitary) && n <= CAP_QUADRUPLE {
            let q = build_multiplication_unitary(&self.model)?;
            let r = s.phase("multiplication-quadruple", |_| verify_multiplication_quadruple(&self.enc, &q))?;
            self.oracle(s, "multiplication-quadruple-oracle", "build_multiplication_unitary", r);
            let u = s.phase("multiplication-quadruple-unitarity", |_| verify_unitary_exhaustive(&self.enc, &q))?;
            let pass = u.pass(self.oracle_tol);
            let detail = if pass {
                format!("{} basis states, bijective, Gram matrix within {:e} of identity", u.cases, self.oracle_tol)
            } else {
                format!("arithmetic::build_multiplication_unitary: bijection {}, Gram defect above tolerance", u.bijection)
            };
            s.check("multiplication-quadruple-unitarity", "unitarity", pass, Vec::new(), detail);
        }
        Ok(())
    }

    /// Numbers whose states survive `W^n` or `W^(n+1)`.
    fn doubling_power(&self, w: &crate::arithmetic::ArithmeticOperator<f64>) -> Result<Vec<u64>, UsageError> {
        let zero = self.model.zero_state()?.to_sparse();
        let mut failing = Vec::new();
        for b in 0..self.enc.count() {
            let mut v = self.enc.encode_sparse(b)?.clone();
            let mut ok = true;
            for h in 1..=self.n + 1 {
                v = w.op.apply_sparse(&v);
                if h >= self.n && v.max_abs_diff(&zero) > self.oracle_tol {
                    ok = false;
                }
            }
            if !ok {
                failing.push(b);
            }
        }
        Ok(failing)
    }
}

fn run_profile(p: ProfileOpts) -> Result<i32, UsageError> {
    if p.n.hi > CAP_PROFILE {
        return Err(usage(format!("profile: n = {} outside 1..={CAP_PROFILE}", p.n.hi)));
    }
    let scheme = match p.scheme {
        SchemeArg::Multisuccessor => Scheme::Multisuccessor,
        SchemeArg::Unary => Scheme::Unary,
        SchemeArg::Squarewell => Scheme::Squarewell,
    };
    let op = match p.op {
        OpArg::S => Op::S,
        OpArg::Add => Op::Add,
        OpArg::Mul => Op::Mul,
    };
    let granularity = match p.granularity {
        GranularityArg::Fine => Granularity::Fine,
        GranularityArg::Coarse => Granularity::Coarse,
    };
    let case = match p.case {
        CaseArg::Worst => CostCase::Worst,
        CaseArg::Best => CostCase::Best,
        CaseArg::Average => CostCase::Average,
    };
    let config = RunConfig {
        command: "profile".into(),
        n_range: Some(p.n),
        scheme: Some(scheme.to_string()),
        op: Some(op.to_string()),
        granularity: Some(kebab(&granularity)),
        case: Some(case.to_string()),
        format: kebab(&p.out.format),
        ..RunConfig::default()
    };
    let mut s = Session::new(config);
    let traces = (p.n.lo..=p.n.hi)
        .map(|n| profiler::count_resources_case(scheme, op, n, granularity, case))
        .collect::<Result<Vec<_>, _>>()?;

    if scheme == Scheme::Multisuccessor {
        let mut off = Vec::new();
        let top = p.n.hi.min(6);
        s.phase("builder-agreement", |_| -> Result<(), UsageError> {
            for t in traces.iter().filter(|t| t.n <= top) {
                let measured = profiler::measured_multisuccessor(op, t.n, granularity)?;
                if measured as f64 != t.count {
                    off.push(json!([t.n, measured]));
                }
            }
            Ok(())
        })?;
        if p.n.lo <= top {
            let detail = if off.is_empty() {
                format!("counts equal builder factor counts for n = {}..={top}", p.n.lo)
            } else {
                "profiler::count_resources: counts differ from builder factor counts".to_string()
            };
            s.check("builder-agreement", "resource-count", off.is_empty(), off, detail);
        }
    }

    let fit = if traces.len() >= profiler::MIN_FIT_POINTS {
        let fit = profiler::fit_scaling(&traces)?;
        let pass = fit.verdict != Verdict::Inconclusive;
        let detail = match fit.verdict {
            Verdict::Polynomial { degree } => format!("polynomial, degree {degree:.3}"),
            Verdict::Exponential { base } => format!("exponential, base {base:.3}"),
            Verdict::Inconclusive => format!("profiler::fit_scaling: inconclusive, best R^2 {:.4}", fit.r2),
        };
        s.check("scaling-fit", "scaling", pass, Vec::new(), detail);
        Some(fit)
    } else {
        s.report.skipped.push(format!("scaling-fit: needs {} distinct n", profiler::MIN_FIT_POINTS));
        None
    };

    let report = s.finish();
    match p.out.format {
        Format::Csv => {
            let mut buf = Vec::new();
            profiler::write_csv(&mut buf, &traces)?;
            write_out(&p.out, &buf)?;
            eprint!("{}", report.to_text());
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        _ => {
            let mut report = report;
            report.data = Some(json!({ "traces": traces, "fit": fit }));
            emit(report, &p.out)
        }
    }
}
