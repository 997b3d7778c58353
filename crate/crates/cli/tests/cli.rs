use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_parahecke"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("one JSON record")
}

fn default_suite() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml")
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("parahecke-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn describe_gl3() {
    let v = json(&["describe", "--type", "gl3"]);
    assert_eq!(v["w0_order"], 6);
    assert_eq!(v["rank"], 3);
    assert_eq!(v["positive_roots"].as_array().unwrap().len(), 3);
}

#[test]
fn mu_example() {
    let v = json(&["mu", "--type", "gl3", "--levi", "a1", "--lambda", "-2,-1,0"]);
    assert_eq!(v["mu"], "q^3");
    assert_eq!(v["mu_value"], "27");
}

#[test]
fn text_and_json_agree() {
    let args = ["mu", "--type", "gl3", "--levi", "t", "--lambda", "0,1,-1"];
    let v = json(&args);
    let out = run(&args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut keys = 0;
    for line in text.lines() {
        let (k, val) = line.split_once(": ").unwrap();
        let expected = match &v[k] {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        assert_eq!(val, expected, "field {k}");
        keys += 1;
    }
    assert_eq!(keys, v.as_object().unwrap().len());
}

#[test]
fn hecke_output_parses_back() {
    let v = json(&["hecke-mul", "--type", "gl2", "(lambda=[0,0], sigma=s1)", "(lambda=[1,0], sigma=s1)"]);
    let product = v["product"].as_str().unwrap().to_string();
    let again = json(&["hecke-mul", "--type", "gl2", &product, "1*(lambda=[0,0], sigma=e)"]);
    assert_eq!(again["a"].as_str().unwrap(), product);
    assert_eq!(again["product"].as_str().unwrap(), product);
}

#[test]
fn quadratic_relation() {
    let v = json(&["hecke-mul", "--type", "gl2", "--p", "2", "(lambda=[0,0], sigma=s1)", "(lambda=[0,0], sigma=s1)"]);
    assert_eq!(v["product"], "2*(lambda=[0,0], sigma=e) + 1*(lambda=[0,0], sigma=s1)");
}

#[test]
fn tau_output_parses_back() {
    let v = json(&[
        "hmg",
        "tau-mul",
        "--type",
        "gl2",
        "--m",
        "t",
        "tau(lambda=[1,0], sigma=e)",
        "tau(lambda=[0,1], sigma=e)",
    ]);
    assert_eq!(v["product"], "3*tau(lambda=[1,1], sigma=e)");
    let again = json(&[
        "hmg",
        "tau-mul",
        "--type",
        "gl2",
        "--m",
        "t",
        v["product"].as_str().unwrap(),
        "tau(lambda=[0,0], sigma=e)",
    ]);
    assert_eq!(again["product"], v["product"]);
}

#[test]
fn theta_example() {
    let v =
        json(&["hmg", "theta", "--type", "gl3", "--p", "2", "--m", "t", "--l", "a1", "tau(lambda=[0,0,1], sigma=e)"]);
    assert_eq!(v["theta"], "4*tau(lambda=[0,0,1], sigma=e)");
}

#[test]
fn oracle_nu_example() {
    for (p, n) in [(2u64, 0u32), (2, 2), (3, 1)] {
        let u = format!("u12=1/p^{}", n + 1);
        let v = json(&["oracle", "nu", "--n", "2", "--p", &p.to_string(), "--diag", "diag(1,1)", "--unipotent", &u]);
        assert_eq!(v["nu"], p.pow(n));
    }
}

#[test]
fn group_config_file() {
    let path = temp_file("group.toml", "[root_datum]\ntype = \"gl\"\nn = 2\n\n[params]\np = 5\n");
    let v = json(&["describe", "--config", path.to_str().unwrap()]);
    assert_eq!(v["group"], "GL(2)");
    assert_eq!(v["q"], "5^1");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["mu", "--type", "gl3", "--levi", "zz", "--lambda", "1,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["elt", "--type", "gl3", "(lambda=[1], sigma=e)"]).status.code(), Some(2));
    let bad = temp_file("bad.toml", "[[check]]\nid = \"MU_PROP_A\"\nlevi_chain = [\"full\", \"t\"]\n");
    assert_eq!(run(&["check", "run", "--suite", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn shallow_oracle_depth_exits_2() {
    let out =
        run(&["oracle", "mu", "--n", "2", "--p", "2", "--diag", "diag(1,1)", "--unipotent", "u12=1/p^3", "--r", "1"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let auto = json(&["oracle", "mu", "--n", "2", "--p", "2", "--diag", "diag(1,1)", "--unipotent", "u12=1/p^3"]);
    assert!(auto["index"].as_u64().unwrap() >= 1);
}

#[test]
fn vacuous_check_fails_with_exit_1() {
    let path = temp_file("vacuous.toml", "[[check]]\nid = \"MU_OPPOSITE\"\nlevi_chain = [\"t\", \"full\"]\n");
    let out = run(&["--json", "check", "run", "--suite", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let rec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["pass"], false);
    assert_eq!(rec["premise"], 0);
}

#[test]
fn check_run_is_thread_independent() {
    let suite = default_suite();
    let suite = suite.to_str().unwrap();
    let only = "MU_PROP_A,COR_MU,XI_SQUARE,ASSOC,ORACLE_NU";
    let one = run(&["--json", "--threads", "1", "check", "run", "--suite", suite, "--only", only]);
    let many = run(&["--json", "--threads", "4", "check", "run", "--suite", suite, "--only", only]);
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stdout));
    assert_eq!(one.stdout, many.stdout);
    let lines = String::from_utf8(one.stdout).unwrap();
    for line in lines.lines() {
        let rec: Value = serde_json::from_str(line).unwrap();
        assert_eq!(rec["schema"], 1);
        assert_eq!(rec["wall_ms"], 0);
    }
}

#[test]
fn reseeding_keeps_verdicts() {
    let suite = default_suite();
    let suite = suite.to_str().unwrap();
    let out = run(&["--json", "--seed", "99", "check", "run", "--suite", suite, "--only", "ABE1,THETA_HOM,BRAID_TAU"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn list_has_every_check() {
    let v = json(&["check", "list"]);
    assert_eq!(v["checks"].as_array().unwrap().len(), 25);
}
