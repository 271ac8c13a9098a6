//! Theory transformers: the havoc lift and the regular closure.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::instances::InductiveExpressivity;
use crate::semantics::{check_formula, eval, fv_syn, EvalError};
use crate::state::{State, Value};
use crate::syntax::{Atom, Formula, Program, VarId, VarSet};
use crate::theory::{
    DynamicTheory, EvalBudget, Layer, SigError, Successors, TheoryHandle, TheoryId, Truth, Values,
};

/// Adds `v := *` to a base theory.
pub struct HavocLift {
    id: TheoryId,
    base: TheoryHandle,
}

pub fn lift_havoc(base: TheoryHandle) -> TheoryHandle {
    Arc::new(HavocLift { id: TheoryId::fresh(), base })
}

/// Closes the programs of a base theory under `;`, `++`, `?` and `*`.
pub struct RegularLift {
    id: TheoryId,
    base: TheoryHandle,
}

pub fn lift_regular(base: TheoryHandle) -> TheoryHandle {
    Arc::new(RegularLift { id: TheoryId::fresh(), base })
}

/// `regular(havoc(base))`, the fixed composition order.
pub fn full(base: TheoryHandle) -> TheoryHandle {
    lift_regular(lift_havoc(base))
}

/// Reads a base formula as a formula of a lifted theory. The AST is shared,
/// so this only checks that every symbol is in the lifted signature.
pub fn embed_formula(f: &Formula, lifted: &dyn DynamicTheory) -> Result<Formula, SigError> {
    check_formula(lifted, f)?;
    Ok(f.clone())
}

/// Reflexive-transitive closure of `p` from `from` on a finite theory.
pub fn star_fixpoint(th: &dyn DynamicTheory, p: &Program, from: &State) -> Result<BTreeSet<State>, EvalError> {
    if !th.is_finite() {
        return Err(EvalError::NotFinite);
    }
    th.check_program(&Program::star(p.clone()))?;
    let succ = th.successors(from, &Program::star(p.clone()), &EvalBudget::default());
    Ok(succ.states.into_iter().collect())
}

impl DynamicTheory for HavocLift {
    fn id(&self) -> TheoryId {
        self.id
    }

    fn describe(&self) -> String {
        format!("havoc({})", self.base.describe())
    }

    fn layer(&self) -> Layer {
        Layer::Havoc(self.base.clone())
    }

    fn has_var(&self, v: &VarId) -> bool {
        self.base.has_var(v)
    }

    fn check_atom(&self, a: &Atom) -> Result<(), SigError> {
        self.base.check_atom(a)
    }

    fn check_program(&self, p: &Program) -> Result<(), SigError> {
        match p {
            Program::Havoc(v) if self.base.has_var(v) => Ok(()),
            Program::Havoc(v) => Err(SigError::new(format!("unknown variable {v} in {}", self.describe()))),
            _ => self.base.check_program(p),
        }
    }

    fn eval_atom(&self, s: &State, a: &Atom) -> Truth {
        self.base.eval_atom(s, a)
    }

    fn successors(&self, s: &State, p: &Program, budget: &EvalBudget) -> Successors {
        match p {
            Program::Havoc(v) => {
                let vals = self.base.values(v, budget);
                let capped = vals.len() > budget.succ_cap as u64;
                let states: Vec<State> = vals
                    .iter()
                    .take(budget.succ_cap)
                    .filter(|&c| self.base.admits(v, c))
                    .map(|c| s.with(v, c))
                    .collect();
                Successors { states, complete: (vals.exact || budget.closed) && !capped }
            }
            _ => self.base.successors(s, p, budget),
        }
    }

    fn atom_fv(&self, a: &Atom) -> VarSet {
        self.base.atom_fv(a)
    }

    fn prog_fv(&self, p: &Program) -> VarSet {
        match p {
            Program::Havoc(_) => VarSet::new(),
            _ => self.base.prog_fv(p),
        }
    }

    fn prog_bv(&self, p: &Program) -> VarSet {
        match p {
            Program::Havoc(v) => VarSet::from([v.clone()]),
            _ => self.base.prog_bv(p),
        }
    }

    fn admits(&self, v: &VarId, x: Value) -> bool {
        self.base.admits(v, x)
    }

    fn values(&self, v: &VarId, budget: &EvalBudget) -> Values {
        self.base.values(v, budget)
    }

    fn is_finite(&self) -> bool {
        self.base.is_finite()
    }

    fn state_vars(&self) -> Vec<VarId> {
        self.base.state_vars()
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> State {
        self.base.sample_state(rng)
    }

    fn sample_atom(&self, rng: &mut dyn RngCore) -> Atom {
        self.base.sample_atom(rng)
    }

    fn sample_program(&self, rng: &mut dyn RngCore, depth: u32) -> Program {
        let vars = self.base.state_vars();
        if !vars.is_empty() && rng.gen_range(0..3) == 0 {
            Program::Havoc(vars[rng.gen_range(0..vars.len())].clone())
        } else {
            self.base.sample_program(rng, depth)
        }
    }

    fn renamable(&self) -> bool {
        self.base.renamable()
    }

    fn eq_formula(&self, v: &VarId, w: &VarId) -> Option<Formula> {
        self.base.eq_formula(v, w)
    }

    fn term_assignment(&self, v: &VarId) -> bool {
        self.base.term_assignment(v)
    }

    fn inductive(&self, side: Option<usize>) -> Option<InductiveExpressivity> {
        self.base.inductive(side)
    }
}

impl RegularLift {
    fn star(&self, s: &State, body: &Program, budget: &EvalBudget) -> Successors {
        let mut seen: HashSet<State> = HashSet::from([s.clone()]);
        let mut order = vec![s.clone()];
        let mut frontier = vec![s.clone()];
        let mut complete = true;
        let finite = self.is_finite();
        let mut depth = 0;
        while !frontier.is_empty() {
            if !finite && depth >= budget.star_depth {
                complete = false;
                break;
            }
            depth += 1;
            let mut next = Vec::new();
            for st in &frontier {
                let succ = self.successors(st, body, budget);
                complete &= succ.complete;
                for t in succ.states {
                    if seen.insert(t.clone()) {
                        order.push(t.clone());
                        next.push(t);
                    }
                }
            }
            if seen.len() > budget.succ_cap {
                complete = false;
                break;
            }
            frontier = next;
        }
        Successors { states: order, complete }
    }
}

fn union_into(acc: &mut Vec<State>, seen: &mut HashSet<State>, more: Vec<State>) {
    for t in more {
        if seen.insert(t.clone()) {
            acc.push(t);
        }
    }
}

impl DynamicTheory for RegularLift {
    fn id(&self) -> TheoryId {
        self.id
    }

    fn describe(&self) -> String {
        format!("regular({})", self.base.describe())
    }

    fn layer(&self) -> Layer {
        Layer::Regular(self.base.clone())
    }

    fn has_var(&self, v: &VarId) -> bool {
        self.base.has_var(v)
    }

    fn check_atom(&self, a: &Atom) -> Result<(), SigError> {
        self.base.check_atom(a)
    }

    fn check_program(&self, p: &Program) -> Result<(), SigError> {
        match p {
            Program::Seq(a, b) | Program::Choice(a, b) => {
                self.check_program(a)?;
                self.check_program(b)
            }
            Program::Star(a) => self.check_program(a),
            Program::Test(f) => {
                if !f.is_modality_free() {
                    return Err(SigError::new(format!(
                        "test ?({}) contains a modality",
                        crate::print::formula(f)
                    )));
                }
                check_formula(self, f)
            }
            _ => self.base.check_program(p),
        }
    }

    fn eval_atom(&self, s: &State, a: &Atom) -> Truth {
        self.base.eval_atom(s, a)
    }

    fn successors(&self, s: &State, p: &Program, budget: &EvalBudget) -> Successors {
        match p {
            Program::Seq(a, b) => {
                let first = self.successors(s, a, budget);
                let mut complete = first.complete;
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                for mid in &first.states {
                    let second = self.successors(mid, b, budget);
                    complete &= second.complete;
                    union_into(&mut out, &mut seen, second.states);
                    if out.len() > budget.succ_cap {
                        return Successors { states: out, complete: false };
                    }
                }
                Successors { states: out, complete }
            }
            Program::Choice(a, b) => {
                let l = self.successors(s, a, budget);
                let r = self.successors(s, b, budget);
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                union_into(&mut out, &mut seen, l.states);
                union_into(&mut out, &mut seen, r.states);
                Successors { states: out, complete: l.complete && r.complete }
            }
            Program::Test(f) => match eval(self, s, f, budget) {
                Truth::True => Successors::exact(vec![s.clone()]),
                Truth::False => Successors::none(),
                Truth::Unknown => Successors { states: Vec::new(), complete: false },
            },
            Program::Star(body) => self.star(s, body, budget),
            _ => self.base.successors(s, p, budget),
        }
    }

    fn atom_fv(&self, a: &Atom) -> VarSet {
        self.base.atom_fv(a)
    }

    fn prog_fv(&self, p: &Program) -> VarSet {
        match p {
            Program::Seq(a, b) | Program::Choice(a, b) => {
                let mut s = self.prog_fv(a);
                s.extend(self.prog_fv(b));
                s
            }
            Program::Star(a) => self.prog_fv(a),
            Program::Test(f) => fv_syn(self, f),
            _ => self.base.prog_fv(p),
        }
    }

    fn prog_bv(&self, p: &Program) -> VarSet {
        match p {
            Program::Seq(a, b) | Program::Choice(a, b) => {
                let mut s = self.prog_bv(a);
                s.extend(self.prog_bv(b));
                s
            }
            Program::Star(a) => self.prog_bv(a),
            Program::Test(_) => VarSet::new(),
            _ => self.base.prog_bv(p),
        }
    }

    fn admits(&self, v: &VarId, x: Value) -> bool {
        self.base.admits(v, x)
    }

    fn values(&self, v: &VarId, budget: &EvalBudget) -> Values {
        self.base.values(v, budget)
    }

    fn is_finite(&self) -> bool {
        self.base.is_finite()
    }

    fn state_vars(&self) -> Vec<VarId> {
        self.base.state_vars()
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> State {
        self.base.sample_state(rng)
    }

    fn sample_atom(&self, rng: &mut dyn RngCore) -> Atom {
        self.base.sample_atom(rng)
    }

    fn sample_program(&self, rng: &mut dyn RngCore, depth: u32) -> Program {
        let pick = if depth == 0 { rng.gen_range(0..5) } else { rng.gen_range(0..9) };
        match pick {
            0..=3 => self.base.sample_program(rng, 0),
            4 => Program::test(Formula::atom(self.base.sample_atom(rng))),
            5 | 6 => Program::seq(self.sample_program(rng, depth - 1), self.sample_program(rng, depth - 1)),
            7 => Program::choice(self.sample_program(rng, depth - 1), self.sample_program(rng, depth - 1)),
            _ => Program::star(self.sample_program(rng, depth - 1)),
        }
    }

    fn renamable(&self) -> bool {
        self.base.renamable()
    }

    fn eq_formula(&self, v: &VarId, w: &VarId) -> Option<Formula> {
        self.base.eq_formula(v, w)
    }

    fn term_assignment(&self, v: &VarId) -> bool {
        self.base.term_assignment(v)
    }

    fn inductive(&self, side: Option<usize>) -> Option<InductiveExpressivity> {
        self.base.inductive(side)
    }
}
