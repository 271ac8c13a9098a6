mod common;

use common::{f, int, rng, two_state};
use hdl_core::instances::{kripke_theory, KripkeModel};
use hdl_core::oracle::gen;
use hdl_core::semantics::{all_states, eval};
use hdl_core::{equal_on, eval_formula, fv_syn, is_valid_exhaustive, EvalBudget, State, Truth, VarId, VarSel, VarSet};
use proptest::prelude::*;

fn vs(names: &[&str]) -> VarSet {
    names.iter().map(|n| VarId::new(n)).collect()
}

#[test]
fn atoms_and_boxes_evaluate() {
    let z = int();
    let b = EvalBudget::default();
    let s = State::from_pairs([("v", 3)]);
    assert_eq!(eval_formula(z.as_ref(), &s, &f(&z, "0 <= v"), &b), Ok(Truth::True));

    let k = two_state();
    assert_eq!(eval_formula(k.as_ref(), &State::new(), &f(&k, "[a] q"), &b), Ok(Truth::True));
}

#[test]
fn eq1_holds_at_sampled_states() {
    let z = int();
    let eq1 = f(&z, "0 <= v -> [w := v + 1] 1 <= w");
    let b = EvalBudget::default();
    for v in -100..=100 {
        for w in [-7, 0, 13] {
            let s = State::from_pairs([("v", v), ("w", w)]);
            assert_eq!(eval(z.as_ref(), &s, &eq1, &b), Truth::True, "at {s}");
        }
    }
}

#[test]
fn equal_on_examples() {
    let mu = State::from_pairs([("v", 1), ("w", 2)]);
    let nu = State::from_pairs([("v", 1), ("w", 3)]);
    assert!(equal_on(&mu, &mu, &VarSel::AllBut(VarSet::new())));
    assert!(equal_on(&mu, &nu, &VarSel::Only(vs(&["v"]))));
    assert!(!equal_on(&mu, &nu, &VarSel::Only(vs(&["w"]))));
    let a = State::from_pairs([("v", 1)]);
    let b = State::from_pairs([("v", 2)]);
    assert!(equal_on(&a, &b, &VarSel::AllBut(vs(&["v"]))));
    assert!(!equal_on(&a, &b, &VarSel::AllBut(VarSet::new())));
}

#[test]
fn free_variables() {
    let z = int();
    assert_eq!(fv_syn(z.as_ref(), &f(&z, "[w := v + 1] 1 <= w")), vs(&["v", "w"]));
    assert_eq!(fv_syn(z.as_ref(), &f(&z, "forall v. 0 <= v")), VarSet::new());
    assert_eq!(fv_syn(z.as_ref(), &f(&z, "0 <= v & 0 <= w")), vs(&["v", "w"]));
}

#[test]
fn exhaustive_validity_on_kripke_frames() {
    let everywhere = kripke_theory(
        KripkeModel::new(&["s0", "s1"]).program("a", &[("s0", "s1"), ("s1", "s0")]).atom("q", &["s0", "s1"]),
    )
    .unwrap();
    assert_eq!(is_valid_exhaustive(everywhere.as_ref(), &f(&everywhere, "[a] q")), Ok(true));

    let stuck = kripke_theory(KripkeModel::new(&["s0"]).program("a", &[]).atom("q", &["s0"])).unwrap();
    assert_eq!(is_valid_exhaustive(stuck.as_ref(), &f(&stuck, "<a> q")), Ok(false));

    let k = two_state();
    assert_eq!(is_valid_exhaustive(k.as_ref(), &f(&k, "[a] q | ![a] q")), Ok(true));
}

#[test]
fn diamond_is_negated_box() {
    let k = two_state();
    let once = f(&k, "<a> q");
    assert_eq!(once, f(&k, "!([a] !q)"));
    let printed = hdl_core::print::formula(&once);
    assert_eq!(f(&k, &printed), once);
    let twice = f(&k, "<a> <a> q");
    assert_eq!(twice, f(&k, "!([a] !!([a] !q))"));
}

#[test]
fn malformed_input_is_reported() {
    let z = int();
    let bad = hdl_core::Formula::atom(hdl_core::Atom::prop("q"));
    assert!(eval_formula(z.as_ref(), &State::new(), &bad, &EvalBudget::default()).is_err());
    let mut b = EvalBudget::default();
    b.window = (3, 1);
    assert!(eval_formula(z.as_ref(), &State::new(), &f(&z, "0 <= v"), &b).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// On a finite theory, any budget covering the state space agrees with
    /// exhaustive evaluation, and never answers Unknown.
    #[test]
    fn budgeted_matches_exhaustive_on_finite(seed in any::<u64>(), depth in 0u32..4) {
        let mut r = rng(seed);
        let th = gen::kripke(&mut r, 4, "").unwrap();
        let vars = th.state_vars();
        let g = gen::formula(th.as_ref(), &mut r, depth, &vars);
        let valid = is_valid_exhaustive(th.as_ref(), &g).unwrap();
        let mut b = EvalBudget::default();
        b.star_depth = 1;
        let states = all_states(th.as_ref()).unwrap();
        let truths: Vec<Truth> = states.iter().map(|s| eval(th.as_ref(), s, &g, &b)).collect();
        prop_assert!(truths.iter().all(|t| *t != Truth::Unknown));
        prop_assert_eq!(valid, truths.iter().all(|t| *t == Truth::True));
    }

    /// Truth depends only on the syntactic free variables.
    #[test]
    fn formula_coincidence(seed in any::<u64>()) {
        let th = hdl_core::lifting::full(common::int_window(-3, 3));
        let mut r = rng(seed);
        let vars: Vec<VarId> = ["x", "y", "z"].iter().map(|n| VarId::new(n)).collect();
        let g = gen::formula(th.as_ref(), &mut r, 2, &vars);
        let fv = fv_syn(th.as_ref(), &g);
        let mu = th.sample_state(&mut r);
        let other = th.sample_state(&mut r);
        let nu = mu.interpolate(&other, &VarSel::Only(fv.clone()));
        prop_assert!(equal_on(&mu, &nu, &VarSel::Only(fv)));
        let mut b = EvalBudget::with_window(-3, 3);
        b.star_depth = 3;
        let (a, c) = (eval(th.as_ref(), &mu, &g, &b), eval(th.as_ref(), &nu, &g, &b));
        if a != Truth::Unknown && c != Truth::Unknown {
            prop_assert_eq!(a, c);
        }
    }
}
