use super::*;
use crate::hetero::{full_hetero, int_worlds};
use crate::instances::{kripke_theory, semiring_theory, Carrier, KripkeModel};
use crate::lifting::{full, lift_havoc};
use crate::parse::{parse_formula, parse_program, parse_term};
use crate::semantics::is_valid_exhaustive;
use crate::theory::TheoryHandle;

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn p(s: &str) -> Program {
    parse_program(s).unwrap()
}

fn v(s: &str) -> VarId {
    VarId::new(s)
}

fn int() -> TheoryHandle {
    semiring_theory(Carrier::Int, (-100, 100)).unwrap()
}

#[test]
fn v_checks_bound_variables() {
    let th = int();
    let ok = ax_v(th.as_ref(), &p("w := v + 1"), &f("0 <= v")).unwrap();
    assert_eq!(ok.conclusion(), &f("0 <= v -> [w := v + 1] 0 <= v"));
    let err = ax_v(th.as_ref(), &p("w := v + 1"), &f("0 <= w")).unwrap_err();
    assert!(err.to_string().contains('w'), "{err}");
}

#[test]
fn inst_rejects_capture() {
    let th = int();
    let body = f("forall w. v = w");
    assert!(matches!(inst(th.as_ref(), &v("v"), &v("w"), &body), Err(KernelError::Capture(_))));
    let t = inst(th.as_ref(), &v("v"), &v("u"), &f("0 <= v")).unwrap();
    assert_eq!(t.conclusion(), &f("(forall v. 0 <= v) -> 0 <= u"));
}

#[test]
fn theorems_do_not_cross_theories() {
    let (a, b) = (int(), int());
    let t = taut(a.as_ref(), &f("x <= 1 -> x <= 1")).unwrap();
    assert!(matches!(rule_g(b.as_ref(), &t, &p("x := 0")), Err(KernelError::TheoryMismatch { .. })));
}

#[test]
fn mp_unions_gamma() {
    let th = int();
    let a = assume(th.as_ref(), &f("0 <= v")).unwrap();
    let imp = assume(th.as_ref(), &f("0 <= v -> 0 <= v + 1")).unwrap();
    let b = mp(th.as_ref(), &imp, &a).unwrap();
    assert_eq!(b.gamma().len(), 2);
    assert!(assume(th.as_ref(), &f("[x := 1] 0 <= x")).is_err());
}

#[test]
fn taut_rejects_non_tautologies() {
    let th = int();
    assert!(taut(th.as_ref(), &f("([x := 1] 0 <= x -> 0 <= y) -> !0 <= y -> ![x := 1] 0 <= x")).is_ok());
    assert!(matches!(taut(th.as_ref(), &f("0 <= x -> 0 <= y")), Err(KernelError::NotTautology(_))));
}

#[test]
fn hr0_rejects_foreign_symbols() {
    let (c, pl) = int_worlds((-50, 50)).unwrap();
    let h = full_hetero(c.clone(), pl, ["c.", "p."], vec![]).unwrap();
    let own = taut(c.as_ref(), &f("0 <= c.x -> 0 <= c.x")).unwrap();
    assert!(reduce(Reduce::World0, &own, h.as_ref()).is_ok());
    let foreign = taut(c.as_ref(), &f("0 <= p.x -> 0 <= p.x"));
    // p.x is not even a c.-world variable
    assert!(foreign.is_err());
    let s = semiring_theory(Carrier::Int, (-5, 5)).unwrap();
    let other = taut(s.as_ref(), &f("0 <= p.x -> 0 <= p.x")).unwrap();
    assert!(reduce(Reduce::World0, &other, h.as_ref()).is_err());
}

#[test]
fn havoc_reduction_needs_the_base() {
    let base = int();
    let lifted = lift_havoc(base.clone());
    let t = ax_v(base.as_ref(), &p("w := v + 1"), &f("0 <= v")).unwrap();
    let r = reduce(Reduce::Havoc, &t, lifted.as_ref()).unwrap();
    assert_eq!(r.conclusion(), t.conclusion());
    assert!(reduce(Reduce::Regular, &t, lifted.as_ref()).is_err());
}

#[test]
fn assignment_axiom() {
    let th = int();
    let t = ax_assign(th.as_ref(), &v("w"), &parse_term("v + 1").unwrap(), &f("1 <= w")).unwrap();
    assert_eq!(t.conclusion(), &f("[w := v + 1] 1 <= w <-> 1 <= v + 1"));
    let t = ax_assign(th.as_ref(), &v("v"), &Term::Lit(0), &f("0 <= v")).unwrap();
    assert_eq!(t.conclusion(), &f("[v := 0] 0 <= v <-> 0 <= 0"));
    let bad = ax_assign(th.as_ref(), &v("w"), &parse_term("v + 1").unwrap(), &f("forall v. v <= w"));
    assert!(matches!(bad, Err(KernelError::Capture(_))));
}

#[test]
fn c_side_conditions_are_reported() {
    let th = full(int());
    let ind = th.inductive(None).unwrap();
    let body = p("i := i + (-1)");
    let ok = ax_c(th.as_ref(), &ind, &body, &f("0 <= i & n <= i"), &v("n"), &v("m"), None);
    assert!(ok.is_ok());
    let w_free = ax_c(th.as_ref(), &ind, &body, &f("m <= i"), &v("n"), &v("m"), None).unwrap_err();
    assert!(w_free.to_string().contains("m is free"), "{w_free}");
    let bound = ax_c(th.as_ref(), &ind, &body, &f("0 <= n"), &v("i"), &v("m"), None).unwrap_err();
    assert!(bound.to_string().contains("i is a variable"), "{bound}");
}

#[test]
fn regular_axioms_need_regular_theories() {
    let th = int();
    assert!(matches!(ax_test(th.as_ref(), &f("true"), &f("0 <= x")), Err(KernelError::Capability(_))));
    let r = full(int());
    let t = ax_test(r.as_ref(), &f("true"), &f("0 <= x")).unwrap();
    assert_eq!(t.conclusion(), &f("[?(true)] 0 <= x <-> (true -> 0 <= x)"));
}

fn two_state() -> TheoryHandle {
    kripke_theory(KripkeModel::new(&["s0", "s1"]).program("a", &[("s0", "s1")]).atom("q", &["s1"])).unwrap()
}

#[test]
fn finite_validity() {
    let th = two_state();
    assert!(finite_valid(th.as_ref(), &f("[a] q")).is_ok());
    assert!(matches!(finite_valid(th.as_ref(), &f("<a> q")), Err(KernelError::Invalid(_))));
    let k = ax_k(th.as_ref(), &p("a"), &f("q"), &f("!q")).unwrap();
    assert!(is_valid_exhaustive(th.as_ref(), k.conclusion()).unwrap());
}

#[test]
fn star_axiom_on_a_chain() {
    let m = KripkeModel::new(&["s0", "s1", "s2"]).program("a", &[("s0", "s1"), ("s1", "s2")]).atom("q", &["s2"]);
    let th = full(kripke_theory(m).unwrap());
    let t = ax_star(th.as_ref(), &p("a"), &f("q")).unwrap();
    assert!(is_valid_exhaustive(th.as_ref(), t.conclusion()).unwrap());
}
