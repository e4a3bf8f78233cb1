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

use std::process::{Command, Output};

use serde_json::Value;

fn msm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msm")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_properties_passes() {
    let out = msm(&["verify-properties", "--n", "4", "--encoding", "product"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 12);
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["n"], 4);
    assert!(v["timings"]["total_ms"].is_number());
}

#[test]
fn entangled_multiplication_oracle() {
    let out = msm(&["verify-arithmetic", "--n", "3", "--encoding", "entangled", "--op", "mul"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["checks"][0]["name"], "multiplication-oracle");
    assert!(v["checks"][0]["detail"].as_str().unwrap().starts_with("512 cases"));
}

#[test]
fn unary_profile_csv() {
    let out = msm(&["profile", "--scheme", "unary", "--op", "add", "--n", "1..12", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let counts: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    let want: Vec<String> = (1..=12).map(|n| ((1u64 << n) - 1).to_string()).collect();
    assert_eq!(counts, want);
    assert!(String::from_utf8(out.stderr).unwrap().contains("exponential"));
}

#[test]
fn profile_json_carries_fit() {
    let out = msm(&["profile", "--scheme", "multisuccessor", "--op", "mul", "--n", "2..8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["data"]["fit"]["verdict"], "polynomial");
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["builder-agreement", "scaling-fit"]);
}

#[test]
fn strict_axioms_exit_1_with_witnesses() {
    let out = msm(&["verify-axioms", "--n", "3", "--policy", "strict"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let a1 = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "axiom-1").unwrap();
    assert_eq!(a1["pass"], false);
    assert_eq!(a1["witnesses"], serde_json::json!([[7, 0]]));
    assert!(a1["detail"].as_str().unwrap().contains("axioms::check_axioms"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify-properties", "--n", "11"][..],
        &["verify-arithmetic", "--n", "7", "--op", "add"],
        &["verify-arithmetic", "--n", "4", "--op", "mul-unitary"],
        &["report", "--n", "5"],
        &["verify-properties", "--n", "3", "--bogus"],
        &["profile", "--scheme", "unary", "--op", "add", "--n", "0..3"],
        &["nonsense"],
    ] {
        assert_eq!(msm(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("report.json");
    let out = msm(&["verify-properties", "--n", "2", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_written_to_file_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let out = msm(&["report", "--n", "3", "--encoding", "entangled", "--output", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timings");
        bodies.push(v);
    }
    assert_eq!(bodies[0], bodies[1]);
    let names: Vec<&str> = bodies[0]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(names.contains(&"multiplication-quadruple-unitarity"));
}

#[test]
fn certify_and_build() {
    let out = msm(&["certify-entanglement", "--n", "3", "--encoding", "entangled"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["data"]["verdict"], "all-entangled");
    let out = msm(&["certify-entanglement", "--n", "3"]);
    assert_eq!(json(&out)["data"]["verdict"], "all-product");
    let out = msm(&["build", "--n", "2", "--encoding", "entangled"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["data"]["ordering"], serde_json::json!(["+1", "+2"]));
    assert_eq!(v["data"]["states"].as_array().unwrap().len(), 4);
}

#[test]
fn text_format() {
    let out = msm(&["verify-arithmetic", "--n", "2", "--op", "add", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("PASS addition-oracle"));
    assert!(!text.contains('\r'));
}

#[test]
fn help_exits_0() {
    assert_eq!(msm(&["--help"]).status.code(), Some(0));
    assert_eq!(msm(&["--version"]).status.code(), Some(0));
}
