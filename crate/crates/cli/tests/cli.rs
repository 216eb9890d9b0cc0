use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempera_core::jordan::AdmissibleTriple;
use tempera_core::multiseg::Multisegment;
use tempera_core::symbols::Catalog;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn tempera(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tempera")).args(args).env_remove("TEMPERA_SEED").output().expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn mstar_of_a_centred_segment_has_five_terms() {
    let o = tempera(&["mstar", "d(r1;-1/2..1/2)"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 5, "{out}");
    assert!(out.contains("2 d(r1;-1/2..1/2) (x) 1"));
}

#[test]
fn mstar_json_reparses() {
    let cat = Catalog::sample();
    let o = tempera(&["--json", "mstar", "d(r1;0..1) * d(r2;1/2..3/2)"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for t in v["terms"].as_array().unwrap() {
        for side in ["left", "right"] {
            let s = t[side].as_str().unwrap();
            assert_eq!(Multisegment::parse(s, &cat).unwrap().to_string(), s);
        }
    }
}

#[test]
fn output_is_deterministic() {
    let a = tempera(&["mu-bound", &data("chain.json"), "--filter"]);
    let b = tempera(&["mu-bound", &data("chain.json"), "--filter"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let r1 = tempera(&["check-lemma", "def-main", "--random", "3"]);
    let r2 = tempera(&["check-lemma", "def-main", "--random", "3"]);
    assert_eq!(r1.stdout, r2.stdout);
}

#[test]
fn mu_bound_depth_and_filter() {
    let raw = stdout(&tempera(&["mu-bound", &data("chain.json"), "--depth", "1"]));
    assert!(raw.ends_with("terms\n"));
    let f = stdout(&tempera(&["mu-bound", &data("chain.json"), "--filter"]));
    assert!(f.contains("d(r1;1..1)_tau+(s0)"), "{f}");
    assert_eq!(code(&tempera(&["mu-bound", &data("chain.json"), "--depth", "9"])), 2);
}

#[test]
fn validate_triple_exit_codes() {
    assert_eq!(code(&tempera(&["validate-triple", &data("triple.json")])), 0);
    let bad = tempera(&["validate-triple", &data("invalid_triple.json")]);
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("singleton eps on odd block"));
    let malformed = tempera(&["validate-triple", &data("malformed.json")]);
    assert_eq!(code(&malformed), 2);
    assert!(String::from_utf8_lossy(&malformed.stderr).contains("parse error"));
    assert_eq!(code(&tempera(&["validate-triple", "--tempered", &data("tempered_triple.json")])), 0);
}

#[test]
fn validate_chain() {
    let ok = tempera(&["validate-chain", &data("chain.json")]);
    assert_eq!(code(&ok), 0);
    assert_eq!(stdout(&ok).lines().last().unwrap(), "deform_up(r1,3,5) -> L2[s0; r1:1+,5+]");
    let bad = tempera(&["validate-chain", &data("bad_chain.json")]);
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("step 1"));
}

#[test]
fn pi_delta_case() {
    let o = tempera(&["pi-delta", &data("chain.json"), "--rho", "r1", "--b", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("case1 a=1"));
    assert_eq!(code(&tempera(&["pi-delta", &data("chain.json"), "--rho", "r1", "--b", "5"])), 2);
}

#[test]
fn decompose_two_reducing_deltas() {
    let o = tempera(&["decompose", &data("decompose.json")]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("4 constituents"));
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn deform_round_trips_through_json() {
    let cat = Catalog::sample();
    let o = tempera(&["--json", "deform", &data("chain.json"), "--rho", "r1", "--a", "5", "--down", "1"]);
    assert_eq!(code(&o), 0);
    let t = AdmissibleTriple::from_json(&stdout(&o), &cat).unwrap();
    assert_eq!(t.to_string(), "L2[s0; r1:1+,3+]");
    assert_eq!(code(&tempera(&["deform", &data("chain.json"), "--rho", "r1", "--a", "5", "--down", "3"])), 2);
}

#[test]
fn predicates_exit_one_when_negative() {
    assert_eq!(code(&tempera(&["reduces", &data("chain.json"), "--rho", "r1", "--alpha", "-3"])), 0);
    assert_eq!(code(&tempera(&["reduces", &data("chain.json"), "--rho", "r1", "--alpha", "2"])), 1);
    assert_eq!(code(&tempera(&["equiv", &data("param_plus.json"), &data("param_plus.json")])), 0);
    assert_eq!(code(&tempera(&["equiv", &data("param_plus.json"), &data("param_minus.json")])), 1);
    assert_eq!(code(&tempera(&["generic", &data("param_plus.json")])), 0);
    assert_eq!(code(&tempera(&["generic", &data("param_minus.json")])), 1);
    assert_eq!(code(&tempera(&["generic", &data("param_nongeneric.json")])), 1);
}

#[test]
fn check_lemma_from_file_and_random() {
    let o = tempera(&["check-lemma", "def-odd2", &data("odd2_chain.json"), "--rho", "r1", "--b", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("1/1 hold\n"));
    let r = Command::new(env!("CARGO_BIN_EXE_tempera"))
        .args(["--json", "check-lemma", "pr-def-t", "--random", "4"])
        .env("TEMPERA_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(code(&r), 0);
    let v: Value = serde_json::from_str(&stdout(&r)).unwrap();
    assert_eq!(v["held"], 4);
    assert!(v["instances"].as_array().unwrap().iter().all(|i| i["multiplicity"] == 2));
    let missing = tempera(&["check-lemma", "def-main", &data("chain.json")]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn custom_catalog() {
    let o = tempera(&["--catalog", &data("catalog.json"), "mstar", "d(q;1..1)"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 3);
    assert_eq!(code(&tempera(&["--catalog", &data("malformed.json"), "mstar", "d(q;1..1)"])), 2);
}
