use std::process::{Command, Output};

fn ccalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccalc"))
        .args(args)
        .env_remove("CCALC_MODEL")
        .output()
        .expect("run ccalc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classz_golden() {
    let o = ccalc(&["classz", "-d", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "27*h - 36*c1 = 9*(3*h - 4*c1)  [matches closed form]\n"
    );
}

#[test]
fn classd_golden() {
    let o = ccalc(&["classd", "-d", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "45*hz - 80*c1 - 9*u (content 1)  [matches closed form]\n"
    );
}

#[test]
fn sw_golden() {
    let o = ccalc(&[
        "sw",
        "--algebra",
        "F(sqrt(a),sqrt(b))",
        "--model",
        "euclidean",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("alpha1 = 0\n"));
    assert!(text.contains("alpha2 = {a,b} + {-1,a*b}\n"));
}

#[test]
fn brauer_trivial_group() {
    let o = ccalc(&["brauer", "--stack", "xd", "-d", "7", "--char", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0 (trivial group)\n");
}

#[test]
fn json_record_has_the_documented_fields() {
    let o = ccalc(&["classd", "-d", "4", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["command", "model", "result", "oracle", "elapsed_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["result"]["class"], "24*hz - 36*c1 - 6*u");
    assert_eq!(v["oracle"]["matches"], true);

    let o = ccalc(&["lines", "--certificate", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["orbits"].as_array().unwrap().len(), 12);
    assert_eq!(v["result"]["alpha2"], "{a,b} + {-1,a*b}");

    let o = ccalc(&["brauer", "--stack", "a3", "--char", "5", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["placeholder"], true);
    assert_eq!(v["result"]["stack"], "a3");
}

#[test]
fn exit_codes() {
    assert_eq!(ccalc(&["classz"]).status.code(), Some(2));
    assert_eq!(ccalc(&["frobnicate"]).status.code(), Some(2));
    let o = ccalc(&["classz", "-d", "2", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "computation");
    assert_eq!(
        ccalc(&["brauer", "--stack", "m3", "--char", "2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn model_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_ccalc"))
        .args(["residue", "--expr", "{a,a}", "--at", "a"])
        .env("CCALC_MODEL", "euclidean")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "d_a({-1,a}) = {-1}\n");
    let o = Command::new(env!("CARGO_BIN_EXE_ccalc"))
        .args(["residue", "--expr", "{a,a}", "--at", "a"])
        .env("CCALC_MODEL", "closed")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "d_a(0) = 0\n");
}

fn without_timings(text: &str) -> String {
    text.lines()
        .map(|l| l.split(", ").next().unwrap_or(l).to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn check_all_is_deterministic() {
    let a = ccalc(&["check-all"]);
    let b = ccalc(&["check-all"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(without_timings(&stdout(&a)), without_timings(&stdout(&b)));
}
