use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn kly(args: &[&str], budget_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kly"));
    cmd.args(args).env_remove("KLY_BUDGET");
    if let Some(b) = budget_env {
        cmd.env("KLY_BUDGET", b);
    }
    cmd.output().expect("spawn kly")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = kly(&all, None);
    (out.status.code().unwrap(), serde_json::from_slice(&out.stdout).expect("json report"))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Temporary model file, removed on drop.
struct TempModel(PathBuf);

impl TempModel {
    fn as_str(&self) -> &str {
        self.0.to_str().unwrap()
    }
}

impl Drop for TempModel {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

fn temp_model(text: &str) -> TempModel {
    use std::sync::atomic::{AtomicUsize, Ordering};
    static N: AtomicUsize = AtomicUsize::new(0);
    let p = std::env::temp_dir()
        .join(format!("kly-cli-test-{}-{}.json", std::process::id(), N.fetch_add(1, Ordering::SeqCst)));
    std::fs::File::create(&p).unwrap().write_all(text.as_bytes()).unwrap();
    TempModel(p)
}

#[test]
fn h0_of_o2_on_the_plane() {
    let (code, v) = json(&["h0", &fixture("p2_o2.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["total_dim"], 6);
    assert_eq!(v["command"]["name"], "h0");
    assert_eq!(v["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn negative_split_is_certified_not_big() {
    let (code, v) = json(&["big", &fixture("p1_neg1_neg2.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["verdict"]["name"], "NotBigSplitCertified");
    assert_eq!(v["results"]["verdict"]["exact"], true);
    assert_eq!(v["results"]["split"]["optimum"], "-1/2");
}

#[test]
fn tangent_plane_is_certified_big() {
    let (code, v) = json(&["big", &fixture("tp2.json"), "--lmax", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["verdict"]["name"], "BigCertified");
    assert_eq!(v["results"]["verdict"]["certificate"]["kind"], "corollary");
}

#[test]
fn projectivity_is_flagged_as_unchecked() {
    let (_, v) = json(&["validate", &fixture("tp2.json")]);
    let warnings: Vec<&str> = v["warnings"].as_array().unwrap().iter().map(|w| w.as_str().unwrap()).collect();
    assert!(warnings.contains(&"projectivity asserted, not checked"));
}

#[test]
fn incompatible_model_names_the_cone() {
    let out = kly(&["validate", &fixture("octant_three_lines.json")], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let err = stderr(&out);
    assert!(err.contains("/max_cones/0: incompatible filtrations on cone 0"), "{err}");
    assert!(err.contains("/max_cones: fan is not complete"), "{err}");
}

#[test]
fn missing_filtration_reports_a_pointer() {
    let out = kly(&["validate", &fixture("missing_filtration.json")], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/bundle/filtrations: expected one filtration per ray (2), found 1"));
}

#[test]
fn syntax_errors_carry_line_and_column() {
    let f = temp_model("{\n  \"fan\": [1,\n");
    let out = kly(&["validate", f.as_str()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("syntax error at line 3"), "{}", stderr(&out));
}

#[test]
fn unknown_fields_are_rejected() {
    let text = std::fs::read_to_string(fixture("p1_o2.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["colour"] = Value::from(1);
    let f = temp_model(&v.to_string());
    let out = kly(&["validate", f.as_str()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/colour"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(kly(&["bogus"], None).status.code(), Some(1));
    assert_eq!(kly(&["h0"], None).status.code(), Some(1));
    assert_eq!(kly(&["--help"], None).status.code(), Some(0));
    assert_eq!(kly(&["h0", "/nonexistent/model.json"], None).status.code(), Some(1));
}

#[test]
fn budget_overrun_still_emits_a_report() {
    let (code, v) = json(&["alpha", &fixture("tp2.json"), "--lmax", "50", "--budget", "10"]);
    assert_eq!(code, 2);
    let e = &v["results"]["error"];
    assert_eq!(e["kind"], "budget_exceeded");
    assert_eq!(e["budget"], 10);
    assert_eq!(e["needed"], 51);
}

#[test]
fn budget_flag_beats_environment() {
    let path = fixture("tp2.json");
    let args = ["h0", path.as_str(), "--sym", "3", "--format", "json"];
    let env_only = kly(&args, Some("3"));
    assert_eq!(env_only.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&env_only.stdout).unwrap();
    assert_eq!(v["command"]["budget"], 3);

    let mut with_flag = args.to_vec();
    with_flag.extend(["--budget", "100"]);
    let out = kly(&with_flag, Some("3"));
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"]["budget"], 100);

    assert_eq!(kly(&args, Some("lots")).status.code(), Some(1));
}

#[test]
fn json_reports_round_trip() {
    for cmd in [["h0", "--sym", "2"], ["alpha", "--lmax", "4"], ["weights", "--p", "1"]] {
        let path = fixture("f1_tangent.json");
        let mut args = cmd.to_vec();
        args.extend([path.as_str(), "--format", "json"]);
        let out = kly(&args, None);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
        assert_eq!(again.as_bytes(), out.stdout.as_slice());
    }
}

#[test]
fn rationals_are_exact_strings() {
    let (_, v) = json(&["polytope", &fixture("tp2.json"), "--element", "1,0"]);
    fn walk(v: &Value, bad: &mut Vec<String>) {
        match v {
            Value::Number(n) if !n.is_i64() && !n.is_u64() => bad.push(n.to_string()),
            Value::Array(a) => a.iter().for_each(|x| walk(x, bad)),
            Value::Object(m) => m.values().for_each(|x| walk(x, bad)),
            _ => {}
        }
    }
    let mut bad = Vec::new();
    walk(&v["results"], &mut bad);
    assert!(bad.is_empty(), "float numbers in report: {bad:?}");
}
