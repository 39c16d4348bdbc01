use std::path::PathBuf;
use std::process::Command;

use isosing::cli::{render, run, Cli};
use clap::Parser;
use serde_json::Value;

fn schema(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn check(args: &[&str], code: i32) -> Value {
    let mut full = vec!["isosing"];
    full.extend_from_slice(args);
    let (got, out) = run(&full);
    assert_eq!(got, code, "{args:?} -> {out:#}");
    let name = if out.get("error").is_some() { "error" } else { out["command"].as_str().unwrap() };
    let validator = jsonschema::validator_for(&schema(name)).unwrap();
    let errors: Vec<String> = validator.iter_errors(&out).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{args:?} violates {name} schema: {errors:?}\n{out:#}");
    let again = render(&Cli::try_parse_from(&full).unwrap());
    assert_eq!(again.1, serde_json::to_string_pretty(&out).unwrap(), "output must be deterministic");
    out
}

const UMBRELLA: &str = "x^2 + y^2*z";
const SHIFT: &str = r#"{"M": [["1"]], "phi": ["x+y", "y", "z"]}"#;

#[test]
fn ring_eval() {
    let out = check(&["--field", "F2", "--vars", "1", "ring-eval", "x + x"], 0);
    assert_eq!(out["result"], "0");
    let out = check(&["--vars", "1", "--beta", "3", "ring-eval", "1 + x"], 0);
    assert_eq!(out["inverse"], "1 - x + x^2 - x^3");
    let out = check(&["--field", "F2", "--beta", "3", "ring-eval", UMBRELLA, "--map", "x+y,y,z"], 0);
    assert_eq!(out["result"], "x^2 + y^2 + y^2*z");
    let out = check(&["--field", "F2", "--beta", "3", "ring-eval", UMBRELLA, "--at", "0,0,1"], 0);
    assert_eq!(out["result"], "x^2 + y^2 + y^2*z");
    let out = check(&["--beta", "3", "ring-eval", "x^2*y", "--diff", "x"], 0);
    assert_eq!(out["result"], "2*x*y");
}

#[test]
fn parse_errors_exit_two() {
    let out = check(&["--vars", "1", "--beta", "3", "ring-eval", "x^9"], 2);
    assert!(out["error"].as_str().unwrap().contains("exceeds"));
    let out = check(&["--vars", "1", "--beta", "3", "--truncate", "ring-eval", "x + x^9"], 0);
    assert_eq!(out["exact"], false);
    check(&["--vars", "2", "ring-eval", "x + q"], 2);
    check(&["ring-eval", "x + * y"], 2);
    check(&["--field", "F4", "ring-eval", "x"], 0);
    check(&["--field", "F6", "ring-eval", "x"], 2);
    let (code, _) = run(["isosing", "no-such-command"]);
    assert_eq!(code, 2);
}

#[test]
fn act_and_invert() {
    let out = check(&["--field", "F2", "--beta", "3", "act", UMBRELLA, "--element", SHIFT], 0);
    assert_eq!(out["result"][0], "x^2 + y^2 + y^2*z");
    let out = check(&["--field", "F3", "--beta", "3", "invert", "--element", r#"{"M": [["1+x"]], "phi": ["x+y^2", "y"]}"#], 0);
    assert_eq!(out["verified"], true);
    check(&["--field", "F3", "--beta", "3", "invert", "--element", r#"{"M": [["x"]], "phi": ["x", "y"]}"#], 2);
}

#[test]
fn mather() {
    let out = check(&["--field", "F5", "mather", "--a", "1,2;3,4", "--b", "1,0;0,0"], 0);
    assert_ne!(out["det"], "0");
}

#[test]
fn equiv_check_tiers() {
    let out = check(&["--field", "F2", "--beta", "3", "equiv-check", UMBRELLA, "--from", "0,0,0", "--to", "0,0,1", "--element", SHIFT], 0);
    assert_eq!(out["tier"], "WITNESSED");
    let out = check(&["--field", "F2", "--beta", "3", "equiv-check", UMBRELLA, "--from", "0,0,0", "--to", "0,0,1"], 0);
    assert_eq!(out["tier"], "CANDIDATE");
    let out = check(&["--field", "F2", "--vars", "1", "--beta", "2", "equiv-check", "x^2", "--other", "x^2+x^3", "--truncate"], 0);
    assert_eq!(out["tier"], "EXHAUSTIVE");
    let out = check(&["--field", "F2", "--vars", "1", "--beta", "2", "equiv-check", "x^2", "--other", "x"], 1);
    assert_eq!(out["refuted_by"], "fingerprint");
    let out = check(&["--field", "F7", "--beta", "3", "equiv-check", UMBRELLA, "--from", "0,0,0", "--to", "0,0,1"], 1);
    assert_eq!(out["equivalent"], false);
}

#[test]
fn tangent_commands() {
    let out = check(&["--vars", "2", "--beta", "3", "orbit-tangent", "x^2+y^3"], 0);
    assert_eq!(out["codim"], 4);
    let out = check(&["--field", "F2", "--beta", "3", "fingerprint", UMBRELLA, "--at", "0,1,0"], 0);
    assert_eq!(out["fingerprint"]["orders"][0], 1);
    let out = check(&["--beta", "5", "jinv", "x*y*(x+y)*(x+z*y)", "--at", "0,0,2"], 0);
    assert_eq!(out["j"], "1728");
    let out = check(&["--beta", "5", "jinv", "x*y*(x+y)*(x+z*y)", "--at", "0,0,1"], 1);
    assert_eq!(out["j"], Value::Null);
}

#[test]
fn derivation_commands() {
    let out = check(&["--field", "F2", "--beta", "5", "log-der", "x^2+y^3+z*y^2", "--direction", "0,0,1", "--beta-work", "4"], 1);
    assert_eq!(out["result"], "infeasible");
    assert_eq!(out["certificate_verified"], true);
    let out = check(&["--vars", "2", "--beta", "3", "log-der", "x", "--direction", "0,1"], 0);
    assert_eq!(out["attached"], true);
    let out = check(&["--field", "F7", "--beta", "3", "solvable-dirs", UMBRELLA], 0);
    assert_eq!(out["directions"]["dim"], 0);
    let out = check(&["--field", "F2", "--beta", "5", "insep-cert", "x^2+y^3+z*y^2", "--at", "0,0,1", "--element", SHIFT, "--beta-work", "3"], 0);
    assert_eq!(out["verified"], true);
    let out = check(&["--beta", "4", "split", "(x+z^2)^2+y^2", "--direction", "0,0,1"], 0);
    assert_eq!(out["residual"][0], "x^2 + y^2");
    let out = check(&["--beta", "4", "split", "(x+z^2)^2+y^2"], 0);
    assert_eq!(out["variables"][0], "z");
    check(&["--vars", "2", "--beta", "4", "split", "x^2+y^3"], 1);
    check(&["--field", "F3", "--beta", "4", "split", "x^2+y^2"], 2);
}

#[test]
fn hs_commands() {
    let out = check(&["--field", "F2", "--beta", "3", "hs-search", UMBRELLA, "--order", "2", "--beta-work", "2"], 1);
    assert_eq!(out["result"], "exhausted");
    let nodes = out["nodes"].clone();
    let again = check(&["--field", "F2", "--beta", "3", "hs-search", UMBRELLA, "--order", "2", "--beta-work", "2"], 1);
    assert_eq!(again["nodes"], nodes);
    let out = check(&["--field", "F2", "--beta", "3", "hs-search", UMBRELLA, "--order", "1", "--beta-work", "2", "--mode", "any"], 0);
    assert_eq!(out["witness"], serde_json::json!([["0", "0", "0"]]));
    let out = check(&["--field", "F2", "--vars", "2", "--beta", "2", "hs-search", "x^2", "--order", "1"], 0);
    assert_eq!(out["result"], "found");
    check(&["--vars", "2", "--beta", "2", "hs-search", "x^2", "--order", "1"], 2);
    let out = check(&["--field", "F2", "--beta", "3", "hs-verify", UMBRELLA, "--level", "0,0,1", "--beta-work", "2"], 1);
    assert_eq!(out["violation"]["residue"], "y^2");
    check(&["--field", "F2", "--vars", "2", "--beta", "2", "hs-verify", "x", "--level", "0,1"], 0);
}

#[test]
fn iso_scan() {
    let out = check(&["--field", "F2", "--beta", "3", "iso-scan", UMBRELLA], 0);
    assert_eq!(out["classes"].as_array().unwrap().len(), 2);
    let out = check(&["--vars", "1", "iso-scan", "x^2+1", "--box=-2..2", "--max-den", "3"], 0);
    assert_eq!(out["points"].as_array().unwrap().len(), 0);
    assert_eq!(out["field_relative"], true);
    check(&["--vars", "1", "iso-scan", "x^2+1"], 2);
    check(&["--field", "F7", "--vars", "3", "iso-scan", "x", "--cap", "10"], 2);
}

#[test]
fn demos() {
    let out = check(&["demo", "whitney-char-p"], 0);
    assert_eq!(out["hs_search"]["result"], "exhausted");
    let out = check(&["demo", "cusp-deformation"], 0);
    assert_eq!(out["certificates"].as_array().unwrap().len(), 3);
    let out = check(&["demo", "cross-ratio"], 0);
    assert_eq!(out["j"], serde_json::json!(["1728", "21952/9"]));
    check(&["--seed", "7", "demo", "cross-ratio"], 0);
}

#[test]
fn system_and_element_files() {
    let dir = std::env::temp_dir().join(format!("isosing-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let sys = dir.join("f.json");
    std::fs::write(&sys, r#"["x^2 + y^2*z"]"#).unwrap();
    let el = dir.join("g.json");
    std::fs::write(&el, SHIFT).unwrap();
    let sys_arg = format!("@{}", sys.display());
    let el_arg = format!("@{}", el.display());
    let out = check(&["--field", "F2", "--beta", "3", "act", &sys_arg, "--element", &el_arg], 0);
    assert_eq!(out["result"][0], "x^2 + y^2 + y^2*z");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_writes_json_file_and_exit_codes() {
    let dir = std::env::temp_dir().join(format!("isosing-bin-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("out.json");
    let bin = env!("CARGO_BIN_EXE_isosing");
    let status = Command::new(bin)
        .args(["--field", "F2", "--beta", "3", "--json"])
        .arg(&out)
        .args(["hs-search", UMBRELLA, "--order", "2", "--beta-work", "2"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let printed: Value = serde_json::from_slice(&status.stdout).unwrap();
    assert_eq!(written, printed);
    let bad = Command::new(bin).args(["--field", "F2", "ring-eval", "x^"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}
