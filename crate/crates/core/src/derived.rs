//! Derived rules. Each one replays its derivation through the public kernel
//! functions, so none of this is trusted code.

use crate::hetero::{combined_core, foreign_symbol_formula, foreign_symbol_program};
use crate::kernel::{self, KResult, KernelError, Theorem};
use crate::semantics::fv_syn;
use crate::syntax::{Formula, Program, VarId, VarSet};
use crate::theory::DynamicTheory;

fn shape(msg: String) -> KernelError {
    KernelError::Shape(msg)
}

fn implication(thm: &Theorem) -> Result<(&Formula, &Formula), KernelError> {
    thm.conclusion()
        .as_implies()
        .ok_or_else(|| shape(format!("{} is not an implication", crate::print::formula(thm.conclusion()))))
}

/// Proves `goal` from premises `P1 ... Pn` when `P1 -> ... -> Pn -> goal` is a
/// tautology.
pub fn by_taut(th: &dyn DynamicTheory, goal: &Formula, premises: &[&Theorem]) -> KResult {
    let f = premises
        .iter()
        .rev()
        .fold(goal.clone(), |acc, p| Formula::implies(p.conclusion().clone(), acc));
    let mut t = kernel::taut(th, &f)?;
    for p in premises {
        t = kernel::mp(th, &t, p)?;
    }
    Ok(t)
}

/// From `A -> B` infer `(forall v. A) -> (forall v. B)`.
pub fn forall_mono(th: &dyn DynamicTheory, thm: &Theorem, v: &VarId) -> KResult {
    let (a, b) = implication(thm)?;
    let k = kernel::all_k(th, v, a, b)?;
    kernel::mp(th, &k, &kernel::gen(th, thm, v)?)
}

/// From `A -> B` infer `[p]A -> [p]B`.
pub fn m(th: &dyn DynamicTheory, thm: &Theorem, p: &Program) -> KResult {
    let (a, b) = implication(thm)?;
    let k = kernel::ax_k(th, p, a, b)?;
    kernel::mp(th, &k, &kernel::rule_g(th, thm, p)?)
}

/// From `X -> [p]A` and `A -> B` infer `X -> [p]B`.
pub fn mr(th: &dyn DynamicTheory, first: &Theorem, second: &Theorem) -> KResult {
    let (x, boxed) = implication(first)?;
    let Formula::Box(p, a) = boxed else {
        return Err(shape(format!("{} is not a box", crate::print::formula(boxed))));
    };
    let (a2, b) = implication(second)?;
    if a.as_ref() != a2 {
        return Err(shape(format!(
            "{} does not match {}",
            crate::print::formula(a),
            crate::print::formula(a2)
        )));
    }
    let lifted = m(th, second, p)?;
    let goal = Formula::implies(x.clone(), Formula::boxed(p.clone(), b.clone()));
    by_taut(th, &goal, &[first, &lifted])
}

/// `([p]A & [p]B) <-> [p](A & B)`.
pub fn box_and(th: &dyn DynamicTheory, p: &Program, a: &Formula, b: &Formula) -> KResult {
    let ab = Formula::and(a.clone(), b.clone());
    let bx = |f: &Formula| Formula::boxed(p.clone(), f.clone());
    let left = m(th, &kernel::taut(th, &Formula::implies(ab.clone(), a.clone()))?, p)?;
    let right = m(th, &kernel::taut(th, &Formula::implies(ab.clone(), b.clone()))?, p)?;
    let b_ab = Formula::implies(b.clone(), ab.clone());
    let pair = kernel::taut(th, &Formula::implies(a.clone(), b_ab.clone()))?;
    let k1 = kernel::ax_k(th, p, a, &b_ab)?;
    let k2 = kernel::ax_k(th, p, b, &ab)?;
    let step = kernel::mp(th, &k1, &kernel::rule_g(th, &pair, p)?)?;
    let goal = Formula::iff(Formula::and(bx(a), bx(b)), bx(&ab));
    by_taut(th, &goal, &[&left, &right, &step, &k2])
}

/// `[p](A -> B) -> (<p>A -> <p>B)`.
pub fn k_dia(th: &dyn DynamicTheory, p: &Program, a: &Formula, b: &Formula) -> KResult {
    let (na, nb) = (Formula::not(a.clone()), Formula::not(b.clone()));
    let k = kernel::ax_k(th, p, &nb, &na)?;
    let contra = kernel::taut(
        th,
        &Formula::implies(Formula::implies(a.clone(), b.clone()), Formula::implies(nb.clone(), na.clone())),
    )?;
    let lifted = m(th, &contra, p)?;
    let goal = Formula::implies(
        Formula::boxed(p.clone(), Formula::implies(a.clone(), b.clone())),
        Formula::implies(Formula::diamond(p.clone(), a.clone()), Formula::diamond(p.clone(), b.clone())),
    );
    by_taut(th, &goal, &[&lifted, &k])
}

/// `⊢ (forall v1 ... vn. B) -> B`, removing `n` leading quantifiers.
fn strip(th: &dyn DynamicTheory, f: &Formula, n: usize) -> KResult {
    let mut cur = kernel::taut(th, &Formula::implies(f.clone(), f.clone()))?;
    for _ in 0..n {
        let (_, body) = implication(&cur)?;
        let Formula::Forall(v, inner) = body else {
            return Err(shape(format!("{} is not a quantifier", crate::print::formula(body))));
        };
        let step = kernel::inst(th, v, v, inner)?;
        let goal = Formula::implies(f.clone(), (**inner).clone());
        cur = by_taut(th, &goal, &[&cur, &step])?;
    }
    Ok(cur)
}

/// `<p>B & (forall vs. (B -> A)) -> <p>A` where `vs` covers the bound
/// variables of `p`.
pub fn mp_dia(th: &dyn DynamicTheory, p: &Program, b: &Formula, a: &Formula, vs: &[VarId]) -> KResult {
    let covered: VarSet = vs.iter().cloned().collect();
    th.check_program(p)?;
    if let Some(x) = th.prog_bv(p).iter().find(|x| !covered.contains(*x)) {
        return Err(KernelError::SideCondition(format!("{x} is bound by the program but not quantified")));
    }
    let ba = Formula::implies(b.clone(), a.clone());
    let u = Formula::forall_many(vs, ba.clone());
    let keep = kernel::ax_v(th, p, &u)?;
    let inner = m(th, &strip(th, &u, vs.len())?, p)?;
    let kd = k_dia(th, p, b, a)?;
    let goal = Formula::implies(Formula::and(Formula::diamond(p.clone(), b.clone()), u), Formula::diamond(p.clone(), a.clone()));
    by_taut(th, &goal, &[&keep, &inner, &kd])
}

/// From `A -> (B -> D)` infer `(forall u. A) -> ((exists u. B) -> D)` when `u`
/// is not free in `D`.
fn lift_exists(th: &dyn DynamicTheory, thm: &Theorem, u: &VarId, a: &Formula, b: &Formula, d: &Formula) -> KResult {
    let (nd, nb) = (Formula::not(d.clone()), Formula::not(b.clone()));
    let flipped = by_taut(th, &Formula::implies(a.clone(), Formula::implies(nd.clone(), nb.clone())), &[thm])?;
    let all = kernel::gen(th, &flipped, u)?;
    let k1 = kernel::all_k(th, u, a, &Formula::implies(nd.clone(), nb.clone()))?;
    let k2 = kernel::all_k(th, u, &nd, &nb)?;
    let vc = kernel::vac(th, u, &nd)?;
    let goal = Formula::implies(
        Formula::forall(u.clone(), a.clone()),
        Formula::implies(Formula::exists(u.clone(), b.clone()), d.clone()),
    );
    by_taut(th, &goal, &[&all, &k1, &k2, &vc])
}

/// Pullback: `(forall us. (C -> <p>X)) & (exists us. (C & forall vs. (X -> A))) -> <p>A`
/// with `vs` covering the bound variables of `p` and the free variables of
/// `<p>A`, and `us` the remaining free variables of `C & X`.
pub fn pb(th: &dyn DynamicTheory, p: &Program, c: &Formula, x: &Formula, a: &Formula, vs: &[VarId]) -> KResult {
    let covered: VarSet = vs.iter().cloned().collect();
    let d = Formula::diamond(p.clone(), a.clone());
    th.check_program(p)?;
    let mut need = th.prog_bv(p);
    need.extend(fv_syn(th, &d));
    if let Some(v) = need.iter().find(|v| !covered.contains(*v)) {
        return Err(KernelError::SideCondition(format!("{v} must be in the quantified vector")));
    }
    let us: Vec<VarId> = fv_syn(th, &Formula::and(c.clone(), x.clone()))
        .into_iter()
        .filter(|v| !covered.contains(v))
        .collect();
    let md = mp_dia(th, p, x, a, vs)?;
    let w = Formula::forall_many(vs, Formula::implies(x.clone(), a.clone()));
    let mut la = Formula::implies(c.clone(), Formula::diamond(p.clone(), x.clone()));
    let mut lb = Formula::and(c.clone(), w);
    let mut cur = by_taut(th, &Formula::implies(la.clone(), Formula::implies(lb.clone(), d.clone())), &[&md])?;
    for u in us.iter().rev() {
        cur = lift_exists(th, &cur, u, &la, &lb, &d)?;
        la = Formula::forall(u.clone(), la);
        lb = Formula::exists(u.clone(), lb);
    }
    by_taut(th, &Formula::implies(Formula::and(la, lb), d), &[&cur])
}

/// From `F -> [p]F` infer `F -> [p*]F`.
pub fn ind(th: &dyn DynamicTheory, thm: &Theorem) -> KResult {
    let (f, boxed) = implication(thm)?;
    let Formula::Box(p, g) = boxed else {
        return Err(shape(format!("{} is not a box", crate::print::formula(boxed))));
    };
    if g.as_ref() != f {
        return Err(shape("premise is not of the form F -> [p]F".into()));
    }
    let i = kernel::ax_i(th, p, f)?;
    kernel::mp(th, &i, &kernel::rule_g(th, thm, &Program::star(p.clone()))?)
}

/// Frame rule for world `i`: `(C -> [p]X) -> (A & C -> [p](X & A))` where `p`
/// is a program of world `1 - i` and `A` a formula of world `i`.
pub fn fi(th: &dyn DynamicTheory, i: usize, c: &Formula, p: &Program, x: &Formula, a: &Formula) -> KResult {
    if i > 1 {
        return Err(shape("world index must be 0 or 1".into()));
    }
    let (_, prefixes) =
        combined_core(th).ok_or_else(|| shape(format!("{} is not heterogeneous", th.describe())))?;
    if let Some(s) = foreign_symbol_program(p, &prefixes[1 - i]) {
        return Err(KernelError::SideCondition(format!("{s} is not in world {}", 1 - i)));
    }
    if let Some(s) = foreign_symbol_formula(a, &prefixes[i]) {
        return Err(KernelError::SideCondition(format!("{s} is not in world {i}")));
    }
    let keep = kernel::ax_v(th, p, a)?;
    let split = box_and(th, p, x, a)?;
    let goal = Formula::implies(
        Formula::implies(c.clone(), Formula::boxed(p.clone(), x.clone())),
        Formula::implies(Formula::and(a.clone(), c.clone()), Formula::boxed(p.clone(), Formula::and(x.clone(), a.clone()))),
    );
    by_taut(th, &goal, &[&keep, &split])
}

/// `[v := *; ?(v ≐ w)]F -> F` when `v` is not free in F.
pub fn ghost(th: &dyn DynamicTheory, v: &VarId, w: &VarId, f: &Formula) -> KResult {
    let e = th
        .eq_formula(v, w)
        .ok_or_else(|| KernelError::Capability(format!("{} has no equality predicate", th.describe())))?;
    if fv_syn(th, f).contains(v) {
        return Err(KernelError::SideCondition(format!("{v} is free in {}", crate::print::formula(f))));
    }
    let h = Program::Havoc(v.clone());
    let t = Program::test(e.clone());
    let ef = Formula::implies(e.clone(), f.clone());
    let seq = kernel::ax_seq(th, &h, &t, f)?;
    let test = kernel::ax_test(th, &e, f)?;
    let unfold = by_taut(th, &Formula::implies(Formula::boxed(t.clone(), f.clone()), ef.clone()), &[&test])?;
    let under = m(th, &unfold, &h)?;
    let havoc = kernel::ax_havoc(th, v, &ef)?;
    let at_w = kernel::inst(th, v, w, &ef)?;
    let refl = kernel::eq_refl(th, w)?;
    let goal = Formula::implies(Formula::boxed(Program::seq(h, t), f.clone()), f.clone());
    by_taut(th, &goal, &[&seq, &under, &havoc, &at_w, &refl])
}
