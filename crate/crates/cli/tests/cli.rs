use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn enda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_enda")).args(args).env_remove("ENDA_COLOR").output().expect("runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn assert_schema(name: &str, v: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(v) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| e.to_string()).collect(),
    };
    assert!(msgs.is_empty(), "{name}: {msgs:?}\n{v}");
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("enda-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn factor_integer_rank_one_matrix() {
    let o = enda(&["rank1", "factor", "--ring", "Z", "--matrix", "[[2,4],[3,6]]", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v, json!({"column": [[2], [3]], "row": [[1, 2]]}));
    assert_schema("rank1-factor", &v);
}

#[test]
fn builtin_c_has_no_factorization() {
    let o = enda(&["rank1", "factor", "--paper-c", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert!(v["certificate"]["rejected"].as_array().is_some_and(|r| !r.is_empty()));
    assert_schema("rank1-factor", &v);
}

#[test]
fn rank_two_input_fails_and_bad_literal_is_usage() {
    let o = enda(&["rank1", "factor", "--matrix", "[[1,2],[3,5]]"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("rank 2"));
    assert_eq!(code(&enda(&["rank1", "factor", "--matrix", "[[1,2],[3"])), 2);
    assert_eq!(code(&enda(&["rank1", "factor"])), 2);
    assert_eq!(code(&enda(&["rank1", "factor", "--ring", "F4", "--matrix", "[[1]]"])), 2);
    assert_eq!(code(&enda(&["no-such-command"])), 2);
}

#[test]
fn rank_of_builtin_m() {
    let o = enda(&["rank1", "rank", "--paper-m", "--format", "json"]);
    assert_eq!(stdout_json(&o), json!({"rank": 2}));
}

#[test]
fn dedekind_report_has_five_true_items() {
    let o = enda(&["dedekind", "report", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_schema("dedekind-report", &v);
    let items = v["items"].as_array().unwrap();
    assert_eq!(items.len(), 5);
    assert!(items.iter().all(|i| i["holds"] == json!(true)));
}

#[test]
fn gsolve_f2_class_3() {
    let o = enda(&["gsolve", "--ring", "F2", "--m", "3", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_schema("gsolve", &v);
    assert_eq!(v["dimension"], json!(1));
    assert_eq!(v["basis"], json!(["x1*x2 + x2*x1"]));
    let o = enda(&["gsolve", "--ring", "F3", "--m", "3", "--format", "json"]);
    assert_eq!(stdout_json(&o)["dimension"], json!(0));
}

#[test]
fn gverify_exit_codes() {
    let good = enda(&["gverify", "--ring", "F2", "--m", "3", "--poly", "x1*x2 + x2*x1", "--format", "json"]);
    assert_eq!(code(&good), 0);
    assert_schema("gverify", &stdout_json(&good));
    let bad = enda(&["gverify", "--ring", "F2", "--m", "3", "--poly", "x1*x2", "--format", "json"]);
    assert_eq!(code(&bad), 1);
    let v = stdout_json(&bad);
    assert_schema("gverify", &v);
    assert!(v["witness"].as_str().unwrap().contains("not symmetric"));
}

#[test]
fn tau_on_builtin_f2_example() {
    let o = enda(&["tau", "verify", "--paper-f2", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v = stdout_json(&o);
    assert_schema("tau-verify", &v);
    assert_eq!(v["class"], json!("PSemiInner(2)"));
    assert_eq!(v["checked"], json!(64));
    assert_eq!(v["exhaustive"], json!(true));
    let o = enda(&["tau", "build", "--paper-f2", "--mirror", "--format", "json"]);
    let v = stdout_json(&o);
    assert_eq!(v["class"], json!("PMirror(2)"));
    assert_schema("recipe", &v["recipe"]);
}

#[test]
fn tau_rejects_non_cocycles() {
    let o = enda(&["tau", "build", "--ring", "F2", "--m", "3", "--poly", "x1*x1 + x2*x2"]);
    assert_eq!(code(&o), 1);
    let o = enda(&["tau", "build", "--ring", "Z", "--m", "3", "--poly", "x1*x2 + x2*x1"]);
    assert_eq!(code(&o), 1);
}

const MIRROR_RECIPE: &str = r#"{"algebra":{"n":2,"ring":"F9=F3[t]/(t^2+1)","variety":"nilpotent(3)"},
 "scalar":"t","ringAuto":"frobenius^1","baseAuto":["x1 + x2","x2 + x1*x2"],"mirror":true,"twist":null}"#;

#[test]
fn recipe_commands() {
    let path = temp_file("mirror.json", MIRROR_RECIPE);
    let p = path.to_str().unwrap();
    assert_schema("recipe", &serde_json::from_str(MIRROR_RECIPE).unwrap());
    let o = enda(&["recipe", "classify", "--recipe", p, "--format", "json", "--samples", "50"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["class"], json!("Mirror"));
    let fwd = enda(&["poly", "eval", "--recipe", p, "--poly", "x1*x2 + x1"]);
    let image = String::from_utf8(fwd.stdout).unwrap();
    let back = enda(&["poly", "eval", "--recipe", p, "--poly", image.trim(), "--inverse"]);
    assert_eq!(String::from_utf8(back.stdout).unwrap().trim(), "x1 + x1*x2");
    let o = enda(&["endo", "standard-base", "--recipe", p, "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["z"].as_array().unwrap().len(), 2);
}

#[test]
fn recipe_without_algebra_uses_flags() {
    let path = temp_file("plain.json", r#"{"scalar":"-1","ringAuto":"identity","baseAuto":["x2","x1"],"mirror":false,"twist":null}"#);
    let p = path.to_str().unwrap();
    let o = enda(&["poly", "eval", "--recipe", p, "--ring", "Z", "--m", "3", "--poly", "x1*x2"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "-x2*x1");
    assert_eq!(code(&enda(&["poly", "eval", "--recipe", p, "--poly", "x1"])), 2);
}

#[test]
fn conjugate_units_accepts_and_rejects() {
    // Q E_ij Q^-1 with Q = [[2,1],[1,1]]
    let fam = "[[[[2,-2],[1,-1]],[[-2,4],[-1,2]]],[[[1,-1],[1,-1]],[[-1,2],[-1,2]]]]";
    let o = enda(&["conjugate-units", "--matrix", fam, "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(stdout_json(&o)["verified"], json!(true));
    let broken = "[[[[1,0],[0,0]],[[0,1],[0,0]]],[[[0,0],[1,0]],[[0,0],[0,2]]]]";
    let o = enda(&["conjugate-units", "--matrix", broken, "--format", "json"]);
    assert_eq!(code(&o), 1);
    assert!(stdout_json(&o)["counterexample"].is_string());
}

#[test]
fn selftest_is_deterministic_and_green() {
    let args = ["selftest", "--only", "1,3,4,8", "--seed", "7", "--format", "json"];
    let (a, b) = (enda(&args), enda(&args));
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    assert_schema("selftest", &stdout_json(&a));
    assert_eq!(code(&enda(&["selftest", "--only", "11"])), 2);
}

#[test]
fn color_only_when_requested() {
    let plain = enda(&["dedekind", "report"]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains('\x1b'));
    let o = Command::new(env!("CARGO_BIN_EXE_enda")).args(["dedekind", "report"]).env("ENDA_COLOR", "1").output().unwrap();
    assert!(String::from_utf8_lossy(&o.stdout).contains("\x1b[32mPASS"));
}
