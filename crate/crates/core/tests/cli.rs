use std::process::{Command, Output};

fn hdl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdl")).args(args).output().expect("spawn hdl")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn example(name: &str) -> String {
    format!("{}/examples/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn falsify_reports_counterexamples() {
    let out = hdl(&["falsify", "--formula", "[v := *] 0 <= v"]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("counterexample"), "{}", stdout(&out));

    let out = hdl(&["falsify", "--theory", "semiring(int)", "--formula", "0 <= v -> [w := v + 1] 1 <= w"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("screened"));
}

#[test]
fn falsify_takes_negative_windows() {
    let out = hdl(&["falsify", "--formula", "v <= 3", "--window", "-5..3"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = hdl(&["falsify", "--formula", "v <= 3", "--var-window", "v=-5..4"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn check_and_demo() {
    let out = hdl(&["check", &example("eq1.hdl")]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("status: checked"));
    let out = hdl(&["demo", "gauss"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn kernel_rejection_exits_one() {
    let dir = std::env::temp_dir().join(format!("hdl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.hdl");
    std::fs::write(&bad, "theory Z = semiring(int)\ngoal \"0 <= 0\"\n1: taut \"0 <= v\"\nqed 1\n").unwrap();
    let out = hdl(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("step 1"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&hdl(&["falsify", "--formula", "0 <="])), 64);
    assert_eq!(code(&hdl(&["falsify", "--formula", "0 <= v", "--window", "3..1"])), 64);
    assert_eq!(code(&hdl(&["demo", "nope"])), 64);
    assert_eq!(code(&hdl(&["check", "/nonexistent.hdl"])), 64);
    assert_eq!(code(&hdl(&["frobnicate"])), 64);
}

#[test]
fn small_audit_passes() {
    let out = hdl(&["audit", "--trials", "3", "--seed", "1"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn command_table_is_markdown() {
    let out = hdl(&["commands"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("| command |"));
}
