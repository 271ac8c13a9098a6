use hdl_core::script::{command_table, demo, run_source, ScriptError, Status, DEMOS};
use hdl_core::kernel::KernelError;
use hdl_core::EvalBudget;

fn run(src: &str) -> Result<hdl_core::script::CheckResult, ScriptError> {
    run_source(src, &EvalBudget::default())
}

const EQ1: &str = "theory Z = semiring(int)
goal \"0 <= v -> [w := v + 1] 1 <= w\"
1: assign w \"v + 1\" \"1 <= w\"
2: assume \"0 <= v -> 1 <= v + 1\"
3: bytaut \"0 <= v -> [w := v + 1] 1 <= w\" 1 2
qed 3
";

#[test]
fn demos_replay_checked() {
    for d in DEMOS {
        let r = d.run().unwrap_or_else(|e| panic!("{}: {e}", d.name));
        assert_eq!(r.status(), Status::Checked, "{}", d.name);
        assert_eq!(r.goal, *r.theorem.conclusion());
        assert!(r.render().ends_with("status: checked\n"), "{}", d.name);
    }
    assert!(demo("gauss").is_some());
    assert!(demo("nope").is_none());
}

#[test]
fn transcripts_are_deterministic() {
    let d = demo("countdown").unwrap();
    assert_eq!(d.run().unwrap().render(), d.run().unwrap().render());
}

#[test]
fn inline_script_matches_the_shipped_one() {
    let inline = run(EQ1).unwrap();
    let shipped = demo("eq1").unwrap().run().unwrap();
    assert_eq!(inline.theorem.conclusion(), shipped.theorem.conclusion());
    assert_eq!(inline.transcript, shipped.transcript);
}

#[test]
fn refuted_assumption_is_reported() {
    let src = EQ1.replace("\"0 <= v -> 1 <= v + 1\"", "\"0 <= v -> 1 <= v + 1 & v <= 50\"");
    let r = run(&src).unwrap();
    assert_eq!(r.status(), Status::Refuted);
    assert!(r.render().contains("status: refuted"));
}

#[test]
fn syntax_errors_carry_the_line() {
    let err = run(&EQ1.replace("2: assume \"0 <= v -> 1 <= v + 1\"", "2: assume \"0 <= v ->\"")).unwrap_err();
    assert!(matches!(err, ScriptError::Parse { line: 4, .. }), "{err}");
}

#[test]
fn kernel_errors_carry_the_step() {
    let err = run(&EQ1.replace("2: assume \"0 <= v -> 1 <= v + 1\"", "2: assume \"[w := 1] 0 <= w\"")).unwrap_err();
    assert!(matches!(err, ScriptError::Kernel { line: 4, step: 2, .. }), "{err}");
    let err = run(&EQ1.replace("1 2\n", "1\n")).unwrap_err();
    assert!(matches!(err, ScriptError::Kernel { step: 3, err: KernelError::NotTautology(_), .. }), "{err}");
}

#[test]
fn qed_must_match_the_goal() {
    let err = run(&EQ1.replace("qed 3", "qed 2")).unwrap_err();
    assert!(err.to_string().contains("but the goal is"), "{err}");
    let err = run(&EQ1.replace("qed 3", "qed 9")).unwrap_err();
    assert!(err.to_string().contains("missing step"), "{err}");
}

#[test]
fn structural_errors() {
    assert!(run(&EQ1.replace("goal", "fresh u\ngoal")).is_ok());
    let err = run(&EQ1.replace("1: assign", "fresh w\n1: assign")).unwrap_err();
    assert!(err.to_string().contains("not fresh"), "{err}");
    let err = run(&EQ1.replace("2: assume", "2: presume")).unwrap_err();
    assert!(err.to_string().contains("unknown command presume"), "{err}");
    let err = run(&EQ1.replace("2: assume", "5: assume")).unwrap_err();
    assert!(err.to_string().contains("out of order"), "{err}");
}

#[test]
fn unknown_theory_is_rejected() {
    assert!(hdl_core::script::parse_theory("semiring(real)").is_err());
    assert!(hdl_core::script::parse_theory("full(semiring(nat, 0..10))").is_ok());
}

#[test]
fn readme_lists_every_command() {
    let readme = include_str!("../../../README.md");
    assert!(readme.contains(command_table().trim()), "README command table is stale");
}
