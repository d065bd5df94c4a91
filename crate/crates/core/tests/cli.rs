use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde_json::{json, Value};

fn qdef(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdef")).args(args).env_remove("QDEF_CORPUS_DIR").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn corpus_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(rel)
}

static NEXT: AtomicUsize = AtomicUsize::new(0);

fn temp_path(name: &str) -> PathBuf {
    let n = NEXT.fetch_add(1, Ordering::SeqCst);
    let dir = std::env::temp_dir().join(format!("qdef-cli-{}-{n}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn temp_script(derivations: Value) -> PathBuf {
    let path = temp_path("script.json");
    let base = corpus_file("bases/example.base.json");
    let doc = json!({ "version": 1, "base": base.to_str().unwrap(), "derivations": derivations });
    fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    path
}

#[test]
fn check_accepts_the_worked_corpus() {
    for name in ["definite_description", "minimal_uniqueness", "pope_maximal", "pope_schism", "conversions"] {
        let o = qdef(&["check", "--script", &format!("corpus:scripts/{name}.json")]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
}

#[test]
fn check_reports_mutations_at_the_mutated_node() {
    let o = qdef(&["check", "--script", "corpus:scripts/mutations_example.json"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("m01: invalid (as expected ConclusionMismatch)\n  /derivations/0/tree: ConclusionMismatch"), "{out}");
    assert!(!out.contains("invalid (expected"), "every mutation is rejected with its own kind:\n{out}");
}

#[test]
fn malformed_input_exits_with_parse_failure() {
    let path = temp_script(json!([{ "name": "a", "tree": { "rule": "andI", "conclusion": "Phi1(alpha) &" } }]));
    let o = qdef(&["check", "--script", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/derivations/0/tree/conclusion"));

    let broken = temp_path("broken.json");
    fs::write(&broken, "{ not json").unwrap();
    assert_eq!(qdef(&["check", "--script", broken.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(qdef(&["check", "--script", "/nonexistent/qdef.json"]).status.code(), Some(2));
    assert_eq!(qdef(&["check"]).status.code(), Some(2));
    assert_eq!(qdef(&["elaborate", "--base", "corpus:bases/pope.base.json", "Bald("]).status.code(), Some(2));
}

#[test]
fn normalize_traces_conversions_and_output_rechecks() {
    let out_path = temp_path("normal.json");
    let o = qdef(&["normalize", "--trace", "--script", "corpus:scripts/conversions.json", "--out", out_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("c1: normal after 1 step: exists x. Phi1(x)\n  1. detour(iota) at /derivations/0/tree"), "{text}");
    // The written script refers to its base relative to the input, so point it back.
    let base = corpus_file("bases/example.base.json");
    let o = qdef(&["check", "--script", out_path.to_str().unwrap(), "--base", base.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = qdef(&["normalize", "--json", "--script", out_path.to_str().unwrap(), "--base", base.to_str().unwrap()]);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["derivations"].as_array().unwrap().iter().all(|d| d["steps"] == 0));
}

#[test]
fn normalizing_normal_input_is_the_identity() {
    let input = corpus_file("scripts/definite_description.json");
    let out_path = temp_path("same.json");
    let o = qdef(&["normalize", "--trace", "--script", input.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("  1."), "empty trace");
    assert_eq!(fs::read_to_string(&out_path).unwrap(), fs::read_to_string(&input).unwrap());
}

#[test]
fn zero_fuel_on_a_redex_exits_with_resource_failure() {
    let o = qdef(&["normalize", "--fuel", "0", "--script", "corpus:scripts/conversions.json"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("c1: fuel exhausted after 0 steps"));
    let o = qdef(&["audit", "--fuel", "0", "--script", "corpus:scripts/conversions.json"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn audit_passes_on_the_corpus_and_refuses_invalid_scripts() {
    for name in ["definite_description", "minimal_uniqueness", "pope_maximal", "pope_schism", "conversions"] {
        let o = qdef(&["audit", "--script", &format!("corpus:scripts/{name}.json")]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
    let o = qdef(&["audit", "--script", "corpus:scripts/mutations_schism.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("invalid, not audited"));
}

#[test]
fn elaborate_worked_sentences() {
    let o = qdef(&["elaborate", "--base", "corpus:bases/pope.base.json", "the[P] Pope is Bald"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(
        "elaboration: (exists x. Pope(x)) & (forall u. forall v. Pope(u) & Pope(v) -> u =+[Bald,Pope,Roman] v) & (forall w. Pope(w) -> Bald(w))\n"
    ));
    assert!(stdout(&o).contains(": maximal\n"));

    let o = qdef(&["elaborate", "--base", "corpus:bases/france.base.json", "--", "-Real(iota[P] x. King-of(x, France))"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(forall w. King-of(w, France) -> -Real(w))\n"));

    let o = qdef(&["elaborate", "--base", "corpus:bases/outlook.base.json", "Descends-from(iota[{Dog}] x. Dog(x), iota[{Wolf}] y. Wolf(y))"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("(forall w1. Wolf(w1) -> Descends-from(w, w1))"), "{text}");
    assert!(text.contains("degree: iota[Wolf] y. Wolf(y): minimal-singleton"));
}

#[test]
fn classify_small_derivations() {
    let path = temp_script(json!([
        { "name": "leaf", "tree": { "assume": "Phi1(alpha)" } },
        { "name": "imp", "tree": { "rule": "impI", "label": "1", "conclusion": "Phi1(alpha) -> Phi1(alpha)",
            "premises": [{ "assume": "Phi1(alpha)", "label": "1" }] } }
    ]));
    let o = qdef(&["classify", "--script", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(|l| l.split_whitespace().collect::<Vec<_>>().join(" ")).collect();
    // Sorted by name.
    assert!(lines[0].starts_with("imp canonical proof; theorem"), "{lines:?}");
    assert!(lines[1].starts_with("leaf neither; none"), "{lines:?}");
}

#[test]
fn minimal_mode_rejects_absurdity() {
    let path = temp_script(json!([
        { "name": "efq", "tree": { "rule": "impI", "label": "1", "conclusion": "bot -> Phi1(alpha)",
            "premises": [{ "rule": "botI", "conclusion": "Phi1(alpha)", "premises": [{ "assume": "bot", "label": "1" }] }] } }
    ]));
    let p = path.to_str().unwrap();
    assert_eq!(qdef(&["check", "--script", p]).status.code(), Some(0));
    let o = qdef(&["check", "--mode", "m0", "--script", p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("RuleDisabledInMinimalMode"));
}

#[test]
fn json_mode_emits_one_document() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["check", "--json", "--script", "corpus:scripts/mutations_example.json"],
        vec!["normalize", "--json", "--trace", "--script", "corpus:scripts/conversions.json"],
        vec!["audit", "--json", "--script", "corpus:scripts/definite_description.json"],
        vec!["classify", "--json", "--script", "corpus:scripts/pope_schism.json"],
        vec!["elaborate", "--json", "--base", "corpus:bases/schism.base.json", "the[Pope] Pope is Bald"],
        vec!["check", "--json", "--script", "/nonexistent/qdef.json"],
    ];
    for args in cases {
        let o = qdef(&args);
        assert!(o.stderr.is_empty(), "{args:?}");
        let doc: Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        assert!(doc.is_object(), "{args:?}");
        assert_eq!(doc["command"], args[0]);
        assert_eq!(doc["ok"], o.status.code() == Some(0), "{args:?}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["normalize", "--trace", "--script", "corpus:scripts/conversions.json"];
    assert_eq!(qdef(&args).stdout, qdef(&args).stdout);
}

#[test]
fn corpus_directory_can_be_overridden() {
    let o = Command::new(env!("CARGO_BIN_EXE_qdef"))
        .args(["check", "--script", "corpus:scripts/conversions.json"])
        .env("QDEF_CORPUS_DIR", "/nonexistent-corpus")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_qdef"))
        .args(["check", "--script", "corpus:scripts/conversions.json"])
        .env("QDEF_CORPUS_DIR", corpus_file(""))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
