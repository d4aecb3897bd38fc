// Copyright 2026 The toystab Authors
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

fn toystab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toystab"))
        .args(args)
        .env_remove("TOYSTAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = toystab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn code(args: &[&str]) -> i32 {
    toystab(args).status.code().expect("exit code")
}

fn frac(v: &Value) -> (i64, i64) {
    (v["num"].as_i64().unwrap(), v["den"].as_i64().unwrap())
}

#[test]
fn validate_reports_a_pure_pair() {
    let v = json(&["state", "validate", "+XZ\\n+ZX"]);
    assert_eq!(v["ok"], true);
    assert_eq!(v["n"], 2);
    assert_eq!(v["pure"], true);
}

#[test]
fn print_is_human_text() {
    let out = toystab(&["state", "print", "+ZI,+IX", "--elements"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n=2 rank=2 pure"));
    assert!(text.contains("+ZX"));
}

#[test]
fn ontic_dump_of_plus_z() {
    let v = json(&["ontic", "dump", "+Z"]);
    assert_eq!(v["n"], 1);
    assert_eq!(v["denominator_log2"], 1);
    assert_eq!(v["numerators"], serde_json::json!([1, 1, 0, 0]));
    assert_eq!(code(&["ontic", "dump", "ZZZ", "--cap", "2"]), 2);
}

#[test]
fn measure_lists_and_samples() {
    let v = json(&["measure", "+Z", "--observable", "X"]);
    let outs = v["outcomes"].as_array().unwrap();
    assert_eq!(outs.len(), 2);
    assert_eq!(frac(&outs[0]["probability"]), (1, 2));
    let a = toystab(&["measure", "+Z", "--observable", "X", "--sample", "--seed", "5"]).stdout;
    let b = toystab(&["measure", "+Z", "--observable", "X", "--sample", "--seed", "5"]).stdout;
    assert_eq!(a, b);
    assert_eq!(code(&["measure", "+Z", "--observable", "I"]), 2);
    assert_eq!(code(&["measure", "+Z", "--observable", "XX"]), 2);
    assert_eq!(code(&["measure", "+Z"]), 1);
}

#[test]
fn measurement_file_and_overlap() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("m.txt");
    std::fs::write(&good, "[up]\n+Z\n[down]\n-Z\n").unwrap();
    let v = json(&["measure", "+Z", "--branches", good.to_str().unwrap()]);
    assert_eq!(v["outcomes"][0]["label"], "up");
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "[a]\n+Z\n[b]\n+X\n").unwrap();
    assert_eq!(code(&["measure", "+Z", "--branches", bad.to_str().unwrap()]), 2);
}

#[test]
fn perm_trace_purify() {
    let v = json(&["perm", "apply", "+ZI,+IZ", "--perm", r#"[{"site":1,"perm":"H"},{"cx":[1,2]}]"#]);
    assert_eq!(v["state"]["generators"], serde_json::json!(["+XX", "+ZZ"]));
    assert_eq!(code(&["perm", "apply", "+Z", "--perm", r#"[{"site":3,"perm":"H"}]"#]), 2);
    assert_eq!(code(&["perm", "apply", "+Z", "--perm", "not json"]), 1);
    let v = json(&["trace", "+XX,+ZZ", "--keep", "1"]);
    assert_eq!(v["state"]["generators"], serde_json::json!([]));
    assert_eq!(code(&["trace", "+XX,+ZZ", "--keep", "3"]), 1);
    let v = json(&["purify", "+ZI"]);
    assert_eq!(v["purification"]["n"], 4);
}

#[test]
fn invalid_groups_exit_two() {
    assert_eq!(code(&["state", "validate", "XX,ZZ,-YY"]), 2);
    assert_eq!(code(&["state", "validate", "X,Z"]), 2);
    assert_eq!(code(&["state", "validate", "+XQ"]), 1);
    assert_eq!(code(&["state", "validate", ""]), 1);
}

#[test]
fn bit_commitment_demo() {
    let dir = tempfile::tempdir().unwrap();
    let enc = dir.path().join("enc.txt");
    std::fs::write(&enc, "[0]\n+XX\n+ZZ\n[1]\n-XX\n+ZZ\n").unwrap();
    let v = json(&["bc", "demo", "--encoding", enc.to_str().unwrap(), "--partition", "1"]);
    assert_eq!(frac(&v["acceptance_probability"]), (1, 1));
    assert_eq!(frac(&v["cheat_distance"]), (0, 1));
    let v = json(&["bc", "demo", "--encoding", enc.to_str().unwrap(), "--partition", "1", "--mode", "imperfect"]);
    assert_eq!(frac(&v["epsilon"]), (0, 1));
    let leaky = dir.path().join("leaky.txt");
    std::fs::write(&leaky, "[0]\n+ZI\n+IZ\n[1]\n+ZI\n-IZ\n").unwrap();
    assert_eq!(code(&["bc", "demo", "--encoding", leaky.to_str().unwrap(), "--partition", "1"]), 2);
    let missing = dir.path().join("one.txt");
    std::fs::write(&missing, "[0]\n+XX\n+ZZ\n").unwrap();
    assert_eq!(code(&["bc", "demo", "--encoding", missing.to_str().unwrap(), "--partition", "1"]), 1);
}

#[test]
fn error_correction_and_sharing() {
    let v = json(&["ec", "demo", "--code", "five", "--error", "X@3"]);
    assert_eq!(v["success"], true);
    let v = json(&["ec", "demo", "--code", "four", "--error", "erase@2", "--secret", "+ZI,+IX"]);
    assert_eq!(v["success"], true);
    assert_eq!(code(&["ec", "demo", "--error", "X@9"]), 1);
    assert_eq!(code(&["ec", "demo", "--code", "seven", "--error", "X@1"]), 1);
    let v = json(&["share", "reconstruct", "--players", "1,3,5", "--secret", "-Y"]);
    assert_eq!(v["reconstructed"]["generators"], serde_json::json!(["-Y"]));
    let v = json(&["share", "reconstruct", "--players", "2,4"]);
    assert_eq!(v["marginal_secret_independent"], true);
    let dealt = json(&["share", "deal", "--secret", "+X"]);
    let shares: Vec<String> =
        dealt["shares"]["generators"].as_array().unwrap().iter().map(|g| g.as_str().unwrap().to_string()).collect();
    let v = json(&["share", "reconstruct", "--shares", &shares.join(","), "--players", "3,4,5"]);
    assert_eq!(v["reconstructed"]["generators"], serde_json::json!(["+X"]));
    assert_eq!(code(&["share", "reconstruct", "--players", "6"]), 1);
}

#[test]
fn mbtc_run_all_branches() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("h.json");
    std::fs::write(&p, r#"{"graph":{"nodes":[1,2],"edges":[[1,2]]},"inputs":[1],"outputs":[2],"angles":{"1":0},"gflow":"auto"}"#)
        .unwrap();
    let v = json(&["mbtc", "run", p.to_str().unwrap(), "--input", "+Z"]);
    assert_eq!(v["deterministic"], true);
    assert_eq!(v["branches"].as_array().unwrap().len(), 2);
    assert_eq!(v["branches"][0]["output"]["generators"], serde_json::json!(["+X"]));
    let v = json(&["mbtc", "run", p.to_str().unwrap(), "--input", "+Z", "--branches", "sample", "--correction", "physical"]);
    assert_eq!(v["output"]["generators"], serde_json::json!(["+X"]));
    assert_eq!(code(&["mbtc", "run", p.to_str().unwrap()]), 2);
    let cyclic = dir.path().join("c.json");
    std::fs::write(&cyclic, r#"{"graph":{"nodes":[1,2],"edges":[[1,2]]},"inputs":[1],"outputs":[2],"angles":{"1":0},"gflow":{"g":{"1":[1]},"layers":{"1":0,"2":1}}}"#)
        .unwrap();
    assert_eq!(code(&["mbtc", "run", cyclic.to_str().unwrap(), "--input", "+Z"]), 2);
}

#[test]
fn bvc_honest_and_report_file() {
    let v = json(&["bvc", "simulate", "--deviation", "honest"]);
    assert_eq!(frac(&v["p_fail"]), (0, 1));
    assert_eq!(frac(&v["acceptance"]), (1, 1));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let run = toystab(&["bvc", "simulate", "--deviation", "flip-all", "--trials", "500", "--seed", "7", "--report", out.to_str().unwrap()]);
    assert!(run.status.success());
    assert!(String::from_utf8(run.stdout).unwrap().contains("deviation=flip-all"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["seed"], 7);
    assert_eq!(r["acceptance"]["estimate"], 0.0);
    assert_eq!(code(&["bvc", "simulate", "--deviation", "flip-at:99"]), 1);
    assert_eq!(code(&["bvc", "simulate", "--deviation", "teleport"]), 1);
    let with_input = r#"{"graph":{"nodes":[1,2],"edges":[[1,2]]},"inputs":[1],"outputs":[2],"angles":{"1":0}}"#;
    assert_eq!(code(&["bvc", "simulate", "--pattern", with_input]), 2);
}

#[test]
fn seed_comes_from_environment_and_is_echoed() {
    let out = Command::new(env!("CARGO_BIN_EXE_toystab"))
        .args(["measure", "+Z", "--observable", "X", "--sample"])
        .env("TOYSTAB_SEED", "11")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 11);
    let bad = Command::new(env!("CARGO_BIN_EXE_toystab")).args(["selftest"]).env("TOYSTAB_SEED", "x").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["bvc", "simulate", "--deviation", "extremal:2", "--trials", "300", "--seed", "3"];
    assert_eq!(toystab(&args).stdout, toystab(&args).stdout);
}

#[test]
fn selftest_passes() {
    let out = toystab(&["selftest"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"ok\": true"));
}

#[test]
fn unreadable_output_path_and_bad_flags() {
    assert_eq!(code(&["selftest", "--out", "/nonexistent/dir/x.json"]), 1);
    assert_eq!(code(&["state"]), 1);
    assert_eq!(code(&["--help"]), 0);
}
