mod common;

use common::{f, p, rng};
use hdl_core::hetero::{combine, coupling_eq, coupling_scaled_eq, full_hetero, hetero_inductive_instance, int_worlds};
use hdl_core::kernel::{self, Reduce};
use hdl_core::lifting::{full, lift_havoc, lift_regular};
use hdl_core::oracle::gen;
use hdl_core::oracle::laws::test_coincidence;
use hdl_core::semantics::eval;
use hdl_core::{EvalBudget, State, TheoryHandle, Truth, VarId};
use proptest::prelude::*;
use rand::Rng;

fn v(name: &str) -> VarId {
    VarId::new(name)
}

fn product(window: (i64, i64)) -> (TheoryHandle, TheoryHandle, TheoryHandle) {
    let (c, pw) = int_worlds(window).unwrap();
    let couplings = vec![coupling_eq(&v("c.x"), &v("p.x")).unwrap()];
    let (c, pw) = (full(c), full(pw));
    let h = full_hetero(c.clone(), pw.clone(), ["c.", "p."], couplings).unwrap();
    (c, pw, h)
}

#[test]
fn couplings_evaluate() {
    let (_, _, h) = product((-100, 100));
    let b = EvalBudget::default();
    let eq = f(&h, "eq(c.x, p.x)");
    assert_eq!(eval(h.as_ref(), &State::from_pairs([("c.x", 5), ("p.x", 5)]), &eq, &b), Truth::True);
    assert_eq!(eval(h.as_ref(), &State::from_pairs([("c.x", 5), ("p.x", 4)]), &eq, &b), Truth::False);

    let (c, pw) = int_worlds((-1000, 1000)).unwrap();
    let scaled = coupling_scaled_eq(&v("c.p"), &v("p.gap"), 100).unwrap();
    let other = coupling_eq(&v("c.v"), &v("p.v")).unwrap();
    let h = combine(c, pw, ["c.", "p."], vec![scaled, other]).unwrap();
    let s = State::from_pairs([("c.p", 300), ("p.gap", 3), ("c.v", 1), ("p.v", 2)]);
    assert_eq!(eval(h.as_ref(), &s, &f(&h, "scaled_eq(c.p, p.gap, 100)"), &b), Truth::True);
    assert_eq!(eval(h.as_ref(), &s, &f(&h, "eq(c.v, p.v)"), &b), Truth::False);
}

#[test]
fn malformed_combinations_are_rejected() {
    let (c, pw) = int_worlds((-5, 5)).unwrap();
    assert!(coupling_eq(&v("c.x"), &v("c.y")).is_err());
    assert!(coupling_scaled_eq(&v("c.x"), &v("p.y"), 0).is_err());
    assert!(combine(c.clone(), pw.clone(), ["c.", "c."], vec![]).is_err());
    assert!(combine(c.clone(), pw.clone(), ["p.", "c."], vec![]).is_err());
    let backwards = coupling_eq(&v("p.x"), &v("c.x")).unwrap();
    assert!(combine(c, pw, ["c.", "p."], vec![backwards]).is_err());
}

#[test]
fn world_programs_frame_the_other_world() {
    let (_, _, h) = product((-100, 100));
    let s = State::from_pairs([("c.x", 0), ("p.x", 9)]);
    let succ = h.successors(&s, &p(&h, "c.x := c.x + 1"), &EvalBudget::default());
    assert_eq!(succ.states, vec![State::from_pairs([("c.x", 1), ("p.x", 9)])]);
}

#[test]
fn pure_formulas_ignore_the_other_world() {
    let (_, _, h) = product((-100, 100));
    let g = f(&h, "0 <= c.x");
    let b = EvalBudget::default();
    let mut r = rng(3);
    for _ in 0..100 {
        let left = State::from_pairs([("c.x", r.gen_range(-10..=10))]);
        let expected = eval(h.as_ref(), &left, &g, &b);
        let right = State::from_pairs([("p.x", r.gen_range(-100..=100)), ("p.y", r.gen_range(-100..=100))]);
        assert_eq!(eval(h.as_ref(), &left.merge(&right), &g, &b), expected);
    }
}

#[test]
fn loop_shape_parses_and_evaluates() {
    let (c, pw) = int_worlds((-50, 50)).unwrap();
    let couplings = vec![
        coupling_eq(&v("c.a"), &v("p.a")).unwrap(),
        coupling_scaled_eq(&v("c.p"), &v("p.gap"), 10).unwrap(),
    ];
    let h = full_hetero(full(c), full(pw), ["c.", "p."], couplings).unwrap();
    let alpha = "((if c.p <= 10 then c.a := 0 else c.a := 1); p.a := *; ?(eq(c.a, p.a)); \
                 p.gap := p.gap + (-1) * p.a; c.p := *; ?(scaled_eq(c.p, p.gap, 10)))*";
    let safe = f(&h, &format!("[{alpha}] 0 <= p.gap"));
    let b = EvalBudget::with_window(-50, 50).star_depth(8);
    let s = State::from_pairs([("c.p", 30), ("p.gap", 3)]);
    assert_ne!(eval(h.as_ref(), &s, &safe, &b), Truth::False);
    let unsafe_start = State::from_pairs([("c.p", 0), ("p.gap", -1)]);
    assert_eq!(eval(h.as_ref(), &unsafe_start, &safe, &b), Truth::False);
}

/// Reachability by hand: each coordinate climbs independently to 4.
#[test]
fn mixed_star_on_a_small_product() {
    let (_, _, h) = product((0, 4));
    let step = "((?(c.x <= 3); c.x := c.x + 1) ++ (?(p.x <= 3); p.x := p.x + 1))*";
    let inside = f(&h, &format!("[{step}] (c.x <= 4 & p.x <= 4)"));
    let corner = f(&h, &format!("<{step}> (c.x = 4 & p.x = 4)"));
    let diag = f(&h, &format!("<{step}> (c.x = 2 & p.x = 3)"));
    let b = EvalBudget::with_window(0, 4);
    for a in 0..=4 {
        for d in 0..=4 {
            let s = State::from_pairs([("c.x", a), ("p.x", d)]);
            assert_eq!(eval(h.as_ref(), &s, &inside, &b), Truth::True);
            assert_eq!(eval(h.as_ref(), &s, &corner, &b), Truth::True);
            assert_eq!(eval(h.as_ref(), &s, &diag, &b), Truth::from_bool(a <= 2 && d <= 3), "at {s}");
        }
    }
}

#[test]
fn reduced_world_theorems_stay_true() {
    let (c, _, h) = product((-100, 100));
    let eq1 = f(&c, "0 <= c.v -> [c.w := c.v + 1] 1 <= c.w");
    let assumed = kernel::assume(c.as_ref(), &f(&c, "0 <= c.v -> 1 <= c.v + 1")).unwrap();
    let ax = kernel::ax_assign(c.as_ref(), &v("c.w"), &hdl_core::parse::parse_term("c.v + 1").unwrap(), &f(&c, "1 <= c.w")).unwrap();
    let thm = hdl_core::derived::by_taut(c.as_ref(), &eq1, &[&ax, &assumed]).unwrap();
    let lifted = kernel::reduce(Reduce::World0, &thm, h.as_ref()).unwrap();
    assert_eq!(lifted.conclusion(), &eq1);
    let b = EvalBudget::default();
    let mut r = rng(5);
    for _ in 0..200 {
        let s = h.sample_state(&mut r);
        assert_eq!(eval(h.as_ref(), &s, lifted.conclusion(), &b), Truth::True, "at {s}");
    }
    assert!(kernel::reduce(Reduce::World1, &thm, h.as_ref()).is_err());
}

#[test]
fn counting_builders_per_side() {
    let (_, _, h) = product((-100, 100));
    let zero = hetero_inductive_instance(0, &h).unwrap();
    assert_eq!(zero.natgt0(&v("c.n")), f(&h, "1 <= c.n"));
    assert!(zero.is_counting(&v("c.n")) && !zero.is_counting(&v("p.n")));
    let one = hetero_inductive_instance(1, &h).unwrap();
    assert!(one.is_counting(&v("p.n")) && !one.is_counting(&v("c.n")));
    assert!(hetero_inductive_instance(2, &h).is_err());

    let b = EvalBudget::default();
    let mut r = rng(8);
    for _ in 0..1000 {
        let (x, y) = (r.gen_range(-20..=20), r.gen_range(-20..=20));
        let s = State::from_pairs([("c.n", x), ("c.m", y), ("p.n", r.gen_range(-5..=5))]);
        let same = zero.u2n(x) == zero.u2n(y);
        assert_eq!(eval(h.as_ref(), &s, &zero.nateq(&v("c.n"), &v("c.m")), &b), Truth::from_bool(same), "at {s}");
    }
}

#[test]
fn product_coincidence_audit() {
    let (_, _, h) = product((-100, 100));
    let r = test_coincidence(h.as_ref(), 1000, 7);
    assert!(r.passed(), "{}", r.render());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// A world-i program never touches world 1-i.
    #[test]
    fn world_isolation(seed in any::<u64>(), side in 0usize..2) {
        let (c, pw, h) = product((-3, 3));
        let world = if side == 0 { c } else { pw };
        let other = if side == 0 { "p." } else { "c." };
        let mut r = rng(seed);
        let prog = gen::program(world.as_ref(), &mut r, 2);
        let s = h.sample_state(&mut r);
        let b = EvalBudget::with_window(-3, 3).star_depth(3);
        for t in h.successors(&s, &prog, &b).states {
            prop_assert_eq!(t.project(other), s.project(other));
        }
    }

    /// `full_hetero` agrees with lifting `combine` by hand.
    #[test]
    fn full_hetero_is_the_lifted_combination(seed in any::<u64>()) {
        let (c, pw) = int_worlds((-2, 2)).unwrap();
        let cp = vec![coupling_eq(&v("c.x"), &v("p.x")).unwrap()];
        let a = full_hetero(c.clone(), pw.clone(), ["c.", "p."], cp.clone()).unwrap();
        let b = lift_regular(lift_havoc(combine(c, pw, ["c.", "p."], cp).unwrap()));
        let mut r = rng(seed);
        let prog = gen::program(a.as_ref(), &mut r, 2);
        let s = a.sample_state(&mut r);
        let budget = EvalBudget::with_window(-2, 2).star_depth(3);
        let mut x = a.successors(&s, &prog, &budget).states;
        let mut y = b.successors(&s, &prog, &budget).states;
        x.sort();
        y.sort();
        prop_assert_eq!(x, y);
    }
}

