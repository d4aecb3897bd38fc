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


//! Parser robustness: the fuzz corpus replayed on stable, plus generated
//! inputs close to each grammar. Parsers must return errors, never panic,
//! and accepted inputs must survive a print/parse round trip.

use std::path::PathBuf;

use proptest::prelude::*;
use toystab::algebra::{StabilizerGroup, ToyElement};
use toystab::bvc::{Deviation, Message};
use toystab::codes::CodeError;
use toystab::dynamics::{outcomes, Measurement};
use toystab::mbtc::{OpenGraph, Pattern};
use toystab::permutation::ToyPermutation;

fn element(text: &str) {
    if let Ok(g) = text.parse::<ToyElement>() {
        assert_eq!(g.to_string().parse::<ToyElement>().unwrap(), g);
    }
}

fn group(text: &str) {
    if let Ok(s) = text.parse::<StabilizerGroup>() {
        let lines: Vec<String> = s.generators().iter().map(ToString::to_string).collect();
        assert_eq!(StabilizerGroup::parse_with_n(&lines.join("\n"), Some(s.n())).unwrap(), s);
    }
}

fn permutation(n: usize, text: &str) {
    if let Ok(p) = ToyPermutation::from_json(n, text) {
        assert_eq!(ToyPermutation::from_json(n, &p.to_json().to_string()).unwrap(), p);
    }
}

fn measurement(n: usize, text: &str) {
    if let Ok(m) = Measurement::parse(n, text) {
        outcomes(&StabilizerGroup::maximally_mixed(n), &m).unwrap();
    }
}

fn pattern(text: &str) {
    if let Ok(p) = Pattern::from_json(text) {
        assert_eq!(Pattern::from_json(&p.to_json().to_string()).unwrap(), p);
    }
}

fn line3() -> Pattern {
    Pattern::with_uniform_angle(OpenGraph::line(3).without_inputs(), 0).unwrap()
}

fn deviation(p: &Pattern, text: &str) {
    if let Ok(d) = Deviation::parse(p, text) {
        assert_eq!(Deviation::parse(p, &d.describe(p)).unwrap(), d);
    }
}

fn message(bytes: &[u8]) {
    if let Ok(m) = serde_json::from_slice::<Message>(bytes) {
        assert_eq!(serde_json::from_str::<Message>(&serde_json::to_string(&m).unwrap()).unwrap(), m);
    }
}

/// Same dispatch as the fuzz targets, including their size-byte prefixes.
fn replay(target: &str, data: &[u8]) {
    let text = |d: &[u8]| String::from_utf8_lossy(d).into_owned();
    match target {
        "element" => element(&text(data)),
        "group" => group(&text(data)),
        "permutation_json" => {
            if let Some((&n, rest)) = data.split_first() {
                permutation(usize::from(n % 8) + 1, &text(rest));
            }
        }
        "measurement_file" => {
            if let Some((&n, rest)) = data.split_first() {
                measurement(usize::from(n % 4) + 1, &text(rest));
            }
        }
        "pattern_json" => pattern(&text(data)),
        "code_error" => {
            let _ = CodeError::parse(5, &text(data));
        }
        "deviation" => deviation(&line3(), &text(data)),
        "message" => message(data),
        other => panic!("corpus directory {other} has no target"),
    }
}

#[test]
fn fuzz_corpus_replays_cleanly() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut seen = 0;
    for dir in std::fs::read_dir(&root).expect("corpus checked in") {
        let dir = dir.unwrap().path();
        let target = dir.file_name().unwrap().to_string_lossy().into_owned();
        for file in std::fs::read_dir(&dir).unwrap() {
            replay(&target, &std::fs::read(file.unwrap().path()).unwrap());
            seen += 1;
        }
    }
    assert!(seen >= 30, "only {seen} corpus seeds found");
}

#[test]
fn corpus_seeds_that_should_parse_do() {
    assert!("+XZIY".parse::<ToyElement>().is_ok());
    assert!("+XX\n+ZZ\n-YY\n".parse::<StabilizerGroup>().is_err());
    assert!(Deviation::parse(&line3(), "cond-at:2:2:Z").is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn element_text(s in "[+-]?[IXYZxq ]{0,12}") {
        element(&s);
    }

    #[test]
    fn group_text(s in "([+-]?[IXYZ]{1,4}\n){0,5}") {
        group(&s);
    }

    #[test]
    fn permutation_text(n in 1usize..4, s in r#"\[(\{"(site|cz|cx|cy)":(\[[0-4],[0-4]\]|[0-4]),?("perm":("[HPXYZI]"|"Pinv"|[0-9]{1,2}))?\},?){0,4}\]"#) {
        permutation(n, &s);
    }

    #[test]
    fn measurement_text(n in 1usize..3, s in r"(\[[a-z01+-]{0,3}\]\n([+-]?[IXYZ]{1,2}\n){0,2}){0,4}") {
        measurement(n, &s);
    }

    #[test]
    fn pattern_text(
        nodes in proptest::collection::vec(0u32..6, 0..5),
        edges in proptest::collection::vec((0u32..6, 0u32..6), 0..6),
        inputs in proptest::collection::vec(0u32..6, 0..3),
        outputs in proptest::collection::vec(0u32..6, 0..3),
        angles in proptest::collection::btree_map(0u32..6, 0u8..6, 0..5),
    ) {
        let angles: serde_json::Map<String, serde_json::Value> =
            angles.into_iter().map(|(k, v)| (k.to_string(), v.into())).collect();
        let text = serde_json::json!({
            "graph": { "nodes": nodes, "edges": edges },
            "inputs": inputs, "outputs": outputs, "angles": angles, "gflow": "auto",
        });
        pattern(&text.to_string());
    }

    #[test]
    fn code_error_text(s in r"(erase@)?([XYZI]@)?[0-9,]{0,6}") {
        let _ = CodeError::parse(5, &s);
    }

    #[test]
    fn deviation_text(s in r"(honest|flip-all|flip-at|extremal|perm-at|cond-at|reorder|random)(:[0-9A-Za-z]{0,3}){0,3}") {
        deviation(&line3(), &s);
    }

    #[test]
    fn message_text(kind in "(delivery|instruction|outcome|other)", system in 0usize..9, v in 0u16..300) {
        let text = format!(r#"{{"kind":"{kind}","system":{system},"delta":{v},"bit":{v}}}"#);
        message(text.as_bytes());
    }
}
