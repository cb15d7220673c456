// Copyright 2026 The seqfair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use serde_json::Value;
use std::process::{Command, Output};

fn seqfair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqfair")).args(args).env_remove("SEQFAIR_BUDGET").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn labels(v: &Value) -> Vec<u64> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

#[test]
fn run_examples() {
    let out = seqfair(&["run", "--instance", "example-1", "--mechanism", "mnw-off", "--format", "json-lines"]);
    assert_eq!(code(&out), 0);
    assert_eq!(labels(&json_lines(&out)[0]["outcome"]), [1]);
    let out = seqfair(&["run", "--instance", "example-2", "--mechanism", "lmin-off:rrs", "--format", "json-lines"]);
    assert_eq!(labels(&json_lines(&out)[0]["outcome"]), [3, 2]);
    let out = seqfair(&["run", "--instance", "example-1", "--mechanism", "rr-off", "--permutation", "2,1"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("outcome:   (c6)"));
}

#[test]
fn single_agent_runs_pick_the_argmax() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.json");
    std::fs::write(&path, r#"{"schema":1,"n":1,"m":3,"T":3,"valuations":[[[1,5,2]],[["7/2",0,3]],[[0,0,"1/9"]]]}"#)
        .unwrap();
    let file = path.to_str().unwrap();
    for mech in ["rr-off", "mnw-off", "lmin-off", "lmin-off:rrs", "lmin-off:prop", "rr-on", "mnw-on", "lmin-on"] {
        let out = seqfair(&["run", "--instance", file, "--mechanism", mech, "--format", "json-lines"]);
        assert_eq!(code(&out), 0, "{mech}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(labels(&json_lines(&out)[0]["outcome"]), [2, 1, 3], "{mech}");
    }
}

#[test]
fn check_exit_codes() {
    assert_eq!(
        code(&seqfair(&["check", "--instance", "example-1", "--outcome", "3", "--property", "prop", "--alpha", "1"])),
        0
    );
    assert_eq!(code(&seqfair(&["check", "--instance", "example-1", "--outcome", "c1", "--property", "mpp"])), 1);
    assert_eq!(code(&seqfair(&["check", "--instance", "example-1", "--outcome", "1,x", "--property", "prop"])), 2);
    assert_eq!(code(&seqfair(&["check", "--instance", "example-1", "--outcome", "7", "--property", "prop"])), 2);
    assert_eq!(code(&seqfair(&["check", "--instance", "example-1", "--outcome", "1,1", "--property", "prop"])), 2);
    assert_eq!(
        code(&seqfair(&["check", "--instance", "example-1", "--outcome", "1", "--property", "mpp", "--alpha", "1"])),
        2
    );
    assert_eq!(code(&seqfair(&["check", "--instance", "example-1", "--outcome", "1", "--property", "bogus"])), 2);
    let out = seqfair(&[
        "check",
        "--instance",
        "additive-lower-bound(n=3)",
        "--outcome",
        "1",
        "--property",
        "additive",
        "--beta",
        "2/3",
    ]);
    assert_eq!(code(&out), 0);
    let out = seqfair(&[
        "check",
        "--instance",
        "additive-lower-bound(n=3)",
        "--outcome",
        "1",
        "--property",
        "additive",
        "--beta",
        "1/2",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn oracle_reports() {
    let doc = &json_lines(&seqfair(&["oracle", "--instance", "example-1", "--format", "json-lines"]))[0];
    assert_eq!(doc["alpha"], "1");
    assert_eq!(labels(&doc["outcome"]), [3]);
    let doc = &json_lines(&seqfair(&["oracle", "--instance", "mpp-online-x", "--format", "json-lines"]))[0];
    assert_eq!(doc["alpha"], "1");
    assert_eq!(labels(&doc["outcome"]), [1, 2]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("opposed.json");
    std::fs::write(&path, r#"{"schema":1,"n":2,"m":2,"T":1,"valuations":[[[1,0],[0,1]]]}"#).unwrap();
    let doc = &json_lines(&seqfair(&["oracle", "--instance", path.to_str().unwrap(), "--format", "json-lines"]))[0];
    assert_eq!(doc["alpha"], "0");
}

#[test]
fn adversaries() {
    let out = seqfair(&["adversary", "rrs", "--alpha", "1", "--mechanism", "lmin-on", "--format", "json-lines"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_lines(&out)[0]["violation"], true);

    let out = seqfair(&["adversary", "prop1", "--k", "33", "--mechanism", "rr-on", "--format", "json-lines"]);
    let doc = &json_lines(&out)[0];
    assert_eq!(doc["final_slack"]["round"], 66);
    let negative = doc["final_slack"]["slack"].as_array().unwrap().iter().any(|s| s.as_str().unwrap().starts_with('-'));
    assert!(negative, "{doc}");

    let out = seqfair(&["adversary", "mpp-online", "--mechanism", "mnw-on", "--format", "json-lines"]);
    let doc = &json_lines(&out)[0];
    assert_eq!(doc["property"], "MPP");
    assert!(doc["branch"].is_string());

    assert_eq!(code(&seqfair(&["adversary", "nope", "--mechanism", "lmin-on"])), 2);
    assert_eq!(code(&seqfair(&["adversary", "rrs", "--mechanism", "mnw-off"])), 2);
    assert_eq!(code(&seqfair(&["adversary", "rrs", "--mechanism", "lmin-on", "--k", "3"])), 2);
}

#[test]
fn repro_targets() {
    for target in ["examples", "mnw-gap", "lower-bounds", "table3"] {
        let out = seqfair(&["repro", target, "--format", "json-lines"]);
        assert_eq!(code(&out), 0, "{target}");
        let rows = json_lines(&out);
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r["ok"] == true), "{target}");
    }
    let rows = json_lines(&seqfair(&["repro", "mnw-gap", "--format", "json-lines"]));
    let expected: Vec<&str> = rows.iter().map(|r| r["expected"].as_str().unwrap()).collect();
    assert_eq!(expected, ["1/3", "2/3", "1", "1/4", "1/2", "3/4"]);
    let text = String::from_utf8_lossy(&seqfair(&["repro", "table3"]).stdout).to_string();
    assert!(text.contains("12 rows, 0 mismatches"));
    assert_eq!(code(&seqfair(&["repro", "table9"])), 2);
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ex2.json");
    let file = path.to_str().unwrap();
    assert_eq!(code(&seqfair(&["export", "--instance", "example-2", "--output", file])), 0);
    let from_file = seqfair(&["run", "--instance", file, "--mechanism", "lmin-off:rrs", "--format", "json-lines"]);
    let named = seqfair(&["run", "--instance", "example-2", "--mechanism", "lmin-off:rrs", "--format", "json-lines"]);
    let (a, b) = (&json_lines(&from_file)[0], &json_lines(&named)[0]);
    assert_eq!(a["outcome"], b["outcome"]);
    assert_eq!(a["utilities"], b["utilities"]);
    let printed = seqfair(&["export", "--instance", "example-2"]);
    assert_eq!(String::from_utf8_lossy(&printed.stdout).trim(), std::fs::read_to_string(&path).unwrap().trim());
}

#[test]
fn budget_flag_and_env() {
    let args = ["check", "--instance", "mnw-gap(n=4,t=6)", "--outcome", "6,6,6,6,6,6", "--property", "po"];
    let out = Command::new(env!("CARGO_BIN_EXE_seqfair")).args(args).env("SEQFAIR_BUDGET", "100").output().unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("46656"));
    let mut with_flag = args.to_vec();
    with_flag.extend(["--budget", "100"]);
    assert_eq!(code(&seqfair(&with_flag)), 2);
    // within budget MNW's outcome is Pareto optimal
    assert_eq!(code(&seqfair(&args)), 0);
    let out = seqfair(&["run", "--instance", "mnw-gap(n=4,t=6)", "--mechanism", "rr-off", "--budget", "100"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("skipped, over budget"));
}

#[test]
fn errors_and_determinism() {
    assert_eq!(code(&seqfair(&["run", "--instance", "no-such-thing", "--mechanism", "mnw-off"])), 2);
    assert_eq!(code(&seqfair(&["run", "--instance", "example-1", "--mechanism", "mnw-sideways"])), 2);
    assert_eq!(
        code(&seqfair(&["run", "--instance", "example-1", "--mechanism", "rr-off", "--permutation", "1,2,3"])),
        2
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"schema\":1,\n\"n\":2,\"m\":2,\"T\":1,\n\"valuations\":[[[1,0],[0,\"z\"]]]}").unwrap();
    let out = seqfair(&["run", "--instance", path.to_str().unwrap(), "--mechanism", "mnw-off"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("valuations[0][1][1]"));

    let a = seqfair(&["experiment", "--max-rounds", "3", "--samples", "10", "--seed", "4", "--threads", "1"]);
    let b = seqfair(&["experiment", "--max-rounds", "3", "--samples", "10", "--seed", "4"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}
