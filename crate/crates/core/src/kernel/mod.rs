//! LCF-style proof kernel. [`Theorem`] has private fields and is built only by
//! the functions in this module, each of which checks its side conditions.
//! A theorem `Γ ⊢ F` claims: if every member of Γ is valid, so is F.

pub mod subst;
pub mod taut;

use std::collections::BTreeSet;
use std::fmt;

use crate::hetero::{combined_core, foreign_symbol_formula};
use crate::instances::InductiveExpressivity;
use crate::semantics::{check_formula, find_invalid, fv_syn, EvalError};
use crate::state::State;
use crate::syntax::{Formula, Program, Term, VarId, VarSet};
use crate::theory::{DynamicTheory, Layer, SigError, TheoryId};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Theorem {
    theory: TheoryId,
    gamma: BTreeSet<Formula>,
    concl: Formula,
}

impl Theorem {
    pub fn theory(&self) -> TheoryId {
        self.theory
    }

    pub fn gamma(&self) -> &BTreeSet<Formula> {
        &self.gamma
    }

    pub fn conclusion(&self) -> &Formula {
        &self.concl
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gamma: Vec<String> = self.gamma.iter().map(crate::print::formula).collect();
        write!(f, "{} ⊢ {}", gamma.join(", "), crate::print::formula(&self.concl))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("theorem belongs to theory {found}, expected {expected}")]
    TheoryMismatch { expected: TheoryId, found: TheoryId },
    #[error("{0}")]
    Malformed(#[from] SigError),
    #[error("side condition violated: {0}")]
    SideCondition(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a tautology: {0}")]
    NotTautology(String),
    #[error("too many propositional letters ({0} > {max})", max = taut::MAX_LETTERS)]
    TooManyLetters(usize),
    #[error("capture: {0}")]
    Capture(String),
    #[error("not modality-free: {0}")]
    NotModalityFree(String),
    #[error("missing capability: {0}")]
    Capability(String),
    #[error("not valid, counterexample at {0}")]
    Invalid(State),
}

pub type KResult = Result<Theorem, KernelError>;

fn show(f: &Formula) -> String {
    crate::print::formula(f)
}

fn axiom(th: &dyn DynamicTheory, concl: Formula) -> KResult {
    check_formula(th, &concl)?;
    Ok(Theorem { theory: th.id(), gamma: BTreeSet::new(), concl })
}

fn own(th: &dyn DynamicTheory, thm: &Theorem) -> Result<(), KernelError> {
    if thm.theory == th.id() {
        Ok(())
    } else {
        Err(KernelError::TheoryMismatch { expected: th.id(), found: thm.theory })
    }
}

fn need_var(th: &dyn DynamicTheory, v: &VarId) -> Result<(), KernelError> {
    if th.has_var(v) {
        Ok(())
    } else {
        Err(SigError::new(format!("unknown variable {v} in {}", th.describe())).into())
    }
}

fn vars_of(th: &dyn DynamicTheory, p: &Program) -> VarSet {
    let mut s = th.prog_fv(p);
    s.extend(th.prog_bv(p));
    s
}

// First-order reasoning.

/// `{F} ⊢ F` for a modality-free F.
pub fn assume(th: &dyn DynamicTheory, f: &Formula) -> KResult {
    if !f.is_modality_free() {
        return Err(KernelError::NotModalityFree(show(f)));
    }
    check_formula(th, f)?;
    Ok(Theorem { theory: th.id(), gamma: BTreeSet::from([f.clone()]), concl: f.clone() })
}

pub fn taut(th: &dyn DynamicTheory, f: &Formula) -> KResult {
    check_formula(th, f)?;
    match taut::is_tautology(f) {
        Ok(true) => axiom(th, f.clone()),
        Ok(false) => Err(KernelError::NotTautology(show(f))),
        Err(n) => Err(KernelError::TooManyLetters(n)),
    }
}

/// From `A -> B` and `A` infer `B`.
pub fn mp(th: &dyn DynamicTheory, imp: &Theorem, a: &Theorem) -> KResult {
    own(th, imp)?;
    own(th, a)?;
    let Some((ante, cons)) = imp.concl.as_implies() else {
        return Err(KernelError::Shape(format!("{} is not an implication", show(&imp.concl))));
    };
    if *ante != a.concl {
        return Err(KernelError::Shape(format!("antecedent {} does not match {}", show(ante), show(&a.concl))));
    }
    let mut gamma = imp.gamma.clone();
    gamma.extend(a.gamma.iter().cloned());
    Ok(Theorem { theory: th.id(), gamma, concl: cons.clone() })
}

/// From `F` infer `forall v. F`.
pub fn gen(th: &dyn DynamicTheory, thm: &Theorem, v: &VarId) -> KResult {
    own(th, thm)?;
    need_var(th, v)?;
    Ok(Theorem { theory: th.id(), gamma: thm.gamma.clone(), concl: Formula::forall(v.clone(), thm.concl.clone()) })
}

/// `(forall v. F) -> F[w/v]`. Renaming to a different variable needs the
/// renamable capability and a shared value set (an equality predicate).
pub fn inst(th: &dyn DynamicTheory, v: &VarId, w: &VarId, f: &Formula) -> KResult {
    need_var(th, v)?;
    need_var(th, w)?;
    check_formula(th, f)?;
    let body = if v == w {
        f.clone()
    } else {
        if !th.renamable() {
            return Err(KernelError::Capability(format!("{} is not renamable", th.describe())));
        }
        if th.eq_formula(v, w).is_none() {
            return Err(KernelError::SideCondition(format!("{v} and {w} have no common value set")));
        }
        subst::rename(th, f, v, w).map_err(KernelError::Capture)?
    };
    axiom(th, Formula::implies(Formula::forall(v.clone(), f.clone()), body))
}

/// `(forall v. (A -> B)) -> ((forall v. A) -> (forall v. B))`.
pub fn all_k(th: &dyn DynamicTheory, v: &VarId, a: &Formula, b: &Formula) -> KResult {
    need_var(th, v)?;
    let all = |f: Formula| Formula::forall(v.clone(), f);
    axiom(
        th,
        Formula::implies(
            all(Formula::implies(a.clone(), b.clone())),
            Formula::implies(all(a.clone()), all(b.clone())),
        ),
    )
}

/// `A -> forall v. A` when `v` is not free in A.
pub fn vac(th: &dyn DynamicTheory, v: &VarId, a: &Formula) -> KResult {
    need_var(th, v)?;
    check_formula(th, a)?;
    if fv_syn(th, a).contains(v) {
        return Err(KernelError::SideCondition(format!("{v} is free in {}", show(a))));
    }
    axiom(th, Formula::implies(a.clone(), Formula::forall(v.clone(), a.clone())))
}

/// `v ≐ v`.
pub fn eq_refl(th: &dyn DynamicTheory, v: &VarId) -> KResult {
    need_var(th, v)?;
    let eq = th
        .eq_formula(v, v)
        .ok_or_else(|| KernelError::Capability(format!("{} has no equality predicate", th.describe())))?;
    axiom(th, eq)
}

// Elementary dynamic axioms.

/// `[p](F -> G) -> ([p]F -> [p]G)`.
pub fn ax_k(th: &dyn DynamicTheory, p: &Program, f: &Formula, g: &Formula) -> KResult {
    let bx = |h: Formula| Formula::boxed(p.clone(), h);
    axiom(
        th,
        Formula::implies(bx(Formula::implies(f.clone(), g.clone())), Formula::implies(bx(f.clone()), bx(g.clone()))),
    )
}

/// `F -> [p]F` when no free variable of F is bound by p.
pub fn ax_v(th: &dyn DynamicTheory, p: &Program, f: &Formula) -> KResult {
    check_formula(th, f)?;
    th.check_program(p)?;
    let bv = th.prog_bv(p);
    if let Some(x) = fv_syn(th, f).intersection(&bv).next() {
        return Err(KernelError::SideCondition(format!(
            "{x} is free in {} and bound by {}",
            show(f),
            crate::print::program(p)
        )));
    }
    axiom(th, Formula::implies(f.clone(), Formula::boxed(p.clone(), f.clone())))
}

/// `(forall v. [p]F) <-> [p](forall v. F)` when p neither reads nor writes v.
pub fn ax_b(th: &dyn DynamicTheory, p: &Program, v: &VarId, f: &Formula) -> KResult {
    need_var(th, v)?;
    th.check_program(p)?;
    if vars_of(th, p).contains(v) {
        return Err(KernelError::SideCondition(format!("{v} is a variable of {}", crate::print::program(p))));
    }
    axiom(
        th,
        Formula::iff(
            Formula::forall(v.clone(), Formula::boxed(p.clone(), f.clone())),
            Formula::boxed(p.clone(), Formula::forall(v.clone(), f.clone())),
        ),
    )
}

/// From `F` infer `[p]F`.
pub fn rule_g(th: &dyn DynamicTheory, thm: &Theorem, p: &Program) -> KResult {
    own(th, thm)?;
    th.check_program(p)?;
    Ok(Theorem { theory: th.id(), gamma: thm.gamma.clone(), concl: Formula::boxed(p.clone(), thm.concl.clone()) })
}

/// `[v := *]F <-> forall v. F`.
pub fn ax_havoc(th: &dyn DynamicTheory, v: &VarId, f: &Formula) -> KResult {
    let h = Program::Havoc(v.clone());
    th.check_program(&h)
        .map_err(|e| KernelError::Capability(format!("{} has no havoc: {e}", th.describe())))?;
    axiom(th, Formula::iff(Formula::boxed(h, f.clone()), Formula::forall(v.clone(), f.clone())))
}

// Regular programs.

fn need_regular(th: &dyn DynamicTheory) -> Result<(), KernelError> {
    match th.layer() {
        Layer::Regular(_) => Ok(()),
        _ => Err(KernelError::Capability(format!("{} is not a regular closure", th.describe()))),
    }
}

/// `[?A]B <-> (A -> B)`.
pub fn ax_test(th: &dyn DynamicTheory, a: &Formula, b: &Formula) -> KResult {
    need_regular(th)?;
    if !a.is_modality_free() {
        return Err(KernelError::NotModalityFree(show(a)));
    }
    axiom(
        th,
        Formula::iff(Formula::boxed(Program::test(a.clone()), b.clone()), Formula::implies(a.clone(), b.clone())),
    )
}

/// `[p;q]F <-> [p][q]F`.
pub fn ax_seq(th: &dyn DynamicTheory, p: &Program, q: &Program, f: &Formula) -> KResult {
    need_regular(th)?;
    axiom(
        th,
        Formula::iff(
            Formula::boxed(Program::seq(p.clone(), q.clone()), f.clone()),
            Formula::boxed(p.clone(), Formula::boxed(q.clone(), f.clone())),
        ),
    )
}

/// `[p ++ q]F <-> [p]F & [q]F`.
pub fn ax_choice(th: &dyn DynamicTheory, p: &Program, q: &Program, f: &Formula) -> KResult {
    need_regular(th)?;
    axiom(
        th,
        Formula::iff(
            Formula::boxed(Program::choice(p.clone(), q.clone()), f.clone()),
            Formula::and(Formula::boxed(p.clone(), f.clone()), Formula::boxed(q.clone(), f.clone())),
        ),
    )
}

/// `[p*]F <-> F & [p][p*]F`.
pub fn ax_star(th: &dyn DynamicTheory, p: &Program, f: &Formula) -> KResult {
    need_regular(th)?;
    let ps = Program::star(p.clone());
    axiom(
        th,
        Formula::iff(
            Formula::boxed(ps.clone(), f.clone()),
            Formula::and(f.clone(), Formula::boxed(p.clone(), Formula::boxed(ps, f.clone()))),
        ),
    )
}

/// `[p*](F -> [p]F) -> (F -> [p*]F)`.
pub fn ax_i(th: &dyn DynamicTheory, p: &Program, f: &Formula) -> KResult {
    need_regular(th)?;
    let ps = Program::star(p.clone());
    axiom(
        th,
        Formula::implies(
            Formula::boxed(ps.clone(), Formula::implies(f.clone(), Formula::boxed(p.clone(), f.clone()))),
            Formula::implies(f.clone(), Formula::boxed(ps, f.clone())),
        ),
    )
}

/// The loop convergence schema for counting variables `v`, `w`:
///
/// `[p*] forall v. (nat>0(v) & F -> <p> forall w. (nat+1(w,v) -> forall v. (nat=(v,w) -> F)))`
/// `-> forall v. (F -> <p*> exists v. (!nat>0(v) & F))`
///
/// `side` selects the world of a heterogeneous theory.
pub fn ax_c(
    th: &dyn DynamicTheory,
    ind: &InductiveExpressivity,
    p: &Program,
    f: &Formula,
    v: &VarId,
    w: &VarId,
    side: Option<usize>,
) -> KResult {
    need_regular(th)?;
    if th.inductive(side).as_ref() != Some(ind) {
        return Err(KernelError::Capability(format!(
            "the inductive-expressivity witness does not belong to {}",
            th.describe()
        )));
    }
    let mut errs = Vec::new();
    for x in [v, w] {
        if !ind.is_counting(x) || !th.has_var(x) {
            errs.push(format!("{x} is not a counting variable"));
        }
    }
    if v == w {
        errs.push(format!("{v} and {w} must be distinct"));
    }
    check_formula(th, f)?;
    th.check_program(p)?;
    if fv_syn(th, f).contains(w) {
        errs.push(format!("{w} is free in {}", show(f)));
    }
    let vars = vars_of(th, p);
    for x in [v, w] {
        if vars.contains(x) {
            errs.push(format!("{x} is a variable of {}", crate::print::program(p)));
        }
    }
    if !errs.is_empty() {
        return Err(KernelError::SideCondition(errs.join("; ")));
    }
    let ps = Program::star(p.clone());
    let step = Formula::diamond(
        p.clone(),
        Formula::forall(
            w.clone(),
            Formula::implies(
                ind.natplus1(w, v),
                Formula::forall(v.clone(), Formula::implies(ind.nateq(v, w), f.clone())),
            ),
        ),
    );
    let premise = Formula::boxed(
        ps.clone(),
        Formula::forall(v.clone(), Formula::implies(Formula::and(ind.natgt0(v), f.clone()), step)),
    );
    let goal = Formula::forall(
        v.clone(),
        Formula::implies(
            f.clone(),
            Formula::diamond(ps, Formula::exists(v.clone(), Formula::and(Formula::not(ind.natgt0(v)), f.clone()))),
        ),
    );
    axiom(th, Formula::implies(premise, goal))
}

// Lifting and combination.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reduce {
    /// Base theory into its havoc lift.
    Havoc,
    /// Base theory into its regular closure.
    Regular,
    /// World 0 into a heterogeneous theory.
    World0,
    /// World 1 into a heterogeneous theory.
    World1,
}

/// Carries a theorem of a base theory or world into `target`; the formulas
/// are unchanged since every lift shares the syntax of its base.
pub fn reduce(kind: Reduce, thm: &Theorem, target: &dyn DynamicTheory) -> KResult {
    let source = match (kind, target.layer()) {
        (Reduce::Havoc, Layer::Havoc(b)) | (Reduce::Regular, Layer::Regular(b)) => b.id(),
        (Reduce::Havoc, _) => return Err(KernelError::Shape(format!("{} is not a havoc lift", target.describe()))),
        (Reduce::Regular, _) => {
            return Err(KernelError::Shape(format!("{} is not a regular closure", target.describe())))
        }
        (Reduce::World0 | Reduce::World1, _) => {
            let i = if kind == Reduce::World0 { 0 } else { 1 };
            let (worlds, prefixes) = combined_core(target)
                .ok_or_else(|| KernelError::Shape(format!("{} is not heterogeneous", target.describe())))?;
            for f in thm.gamma.iter().chain([&thm.concl]) {
                if let Some(sym) = foreign_symbol_formula(f, &prefixes[i]) {
                    return Err(KernelError::SideCondition(format!("{sym} is not in world {i}")));
                }
            }
            worlds[i].id()
        }
    };
    if thm.theory != source {
        return Err(KernelError::TheoryMismatch { expected: source, found: thm.theory });
    }
    for f in thm.gamma.iter().chain([&thm.concl]) {
        check_formula(target, f)?;
    }
    Ok(Theorem { theory: target.id(), gamma: thm.gamma.clone(), concl: thm.concl.clone() })
}

// Instance calculi.

/// `[v := t]F <-> F[t/v]` for theories whose assignments are term updates.
pub fn ax_assign(th: &dyn DynamicTheory, v: &VarId, t: &Term, f: &Formula) -> KResult {
    if !th.term_assignment(v) {
        return Err(KernelError::Capability(format!("{} has no term assignment to {v}", th.describe())));
    }
    let p = Program::Assign(v.clone(), t.clone());
    th.check_program(&p)?;
    check_formula(th, f)?;
    let g = subst::subst_formula(th, f, v, t).map_err(KernelError::Capture)?;
    axiom(th, Formula::iff(Formula::boxed(p, f.clone()), g))
}

/// `⊢ F` for a formula valid in every state of a finite theory.
pub fn finite_valid(th: &dyn DynamicTheory, f: &Formula) -> KResult {
    match find_invalid(th, f) {
        Ok(None) => axiom(th, f.clone()),
        Ok(Some(s)) => Err(KernelError::Invalid(s)),
        Err(EvalError::Malformed(e)) => Err(e.into()),
        Err(e) => Err(KernelError::Capability(e.to_string())),
    }
}

#[cfg(test)]
mod tests;
