//! First-order dynamic logic over the ordered semirings ℤ and ℕ: terms with
//! `+` and `*`, atoms `t1 <= t2`, assignments `v := t`.

use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::state::{State, Value};
use crate::syntax::{Atom, Formula, Program, Term, VarId, VarSet};
use crate::theory::{DynamicTheory, EvalBudget, SigError, Successors, TheoryHandle, TheoryId, Truth, Values};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Carrier {
    Int,
    Nat,
}

impl Carrier {
    pub fn name(self) -> &'static str {
        match self {
            Carrier::Int => "int",
            Carrier::Nat => "nat",
        }
    }
}

pub struct SemiringTheory {
    id: TheoryId,
    carrier: Carrier,
    window: (Value, Value),
    prefix: String,
    pool: Vec<VarId>,
}

impl SemiringTheory {
    pub fn new(carrier: Carrier, window: (Value, Value)) -> Result<Self, SigError> {
        let (lo, hi) = window;
        if lo > 0 || hi < 1 {
            return Err(SigError::new(format!("degenerate window {lo}..{hi}: must contain 0 and 1")));
        }
        let lo = if carrier == Carrier::Nat { lo.max(0) } else { lo };
        Ok(SemiringTheory {
            id: TheoryId::fresh(),
            carrier,
            window: (lo, hi),
            prefix: String::new(),
            pool: ["x", "y", "z"].iter().map(|n| VarId::new(n)).collect(),
        })
    }

    /// Restricts the variables to names starting with `prefix` (a world of a
    /// heterogeneous theory).
    pub fn with_prefix(mut self, prefix: &str) -> Self {
        self.pool = self.pool.iter().map(|v| VarId::new(&format!("{prefix}{}", strip(v, &self.prefix)))).collect();
        self.prefix = prefix.to_string();
        self
    }

    /// Variables varied by the sampler (names are used as given).
    pub fn with_pool(mut self, names: &[&str]) -> Self {
        self.pool = names.iter().map(|n| VarId::new(n)).collect();
        self
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn handle(self) -> TheoryHandle {
        Arc::new(self)
    }

    fn check_term(&self, t: &Term) -> Result<(), SigError> {
        for v in t.vars() {
            if !self.has_var(&v) {
                return Err(SigError::new(format!("variable {v} is outside {}", self.describe())));
            }
        }
        if self.carrier == Carrier::Nat && t.has_negative_literal() {
            return Err(SigError::new("negative literal over the nat carrier"));
        }
        Ok(())
    }

    fn random_term(&self, rng: &mut dyn RngCore, depth: u32) -> Term {
        let lo = if self.carrier == Carrier::Nat { 0 } else { -2 };
        match if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..4) } {
            0 => Term::Lit(rng.gen_range(lo..=2)),
            1 => Term::Var(self.pool[rng.gen_range(0..self.pool.len())].clone()),
            2 => Term::add(self.random_term(rng, depth - 1), self.random_term(rng, depth - 1)),
            _ => Term::mul(self.random_term(rng, depth - 1), self.random_term(rng, depth - 1)),
        }
    }
}

fn strip<'a>(v: &'a VarId, prefix: &str) -> &'a str {
    v.name().strip_prefix(prefix).unwrap_or(v.name())
}

pub fn semiring_theory(carrier: Carrier, window: (Value, Value)) -> Result<TheoryHandle, SigError> {
    Ok(SemiringTheory::new(carrier, window)?.handle())
}

impl DynamicTheory for SemiringTheory {
    fn id(&self) -> TheoryId {
        self.id
    }

    fn describe(&self) -> String {
        if self.prefix.is_empty() {
            format!("semiring({})", self.carrier.name())
        } else {
            format!("semiring({}) prefix \"{}\"", self.carrier.name(), self.prefix)
        }
    }

    fn has_var(&self, v: &VarId) -> bool {
        v.has_prefix(&self.prefix) && v.name().len() > self.prefix.len()
    }

    fn check_atom(&self, a: &Atom) -> Result<(), SigError> {
        match a {
            Atom::True => Ok(()),
            Atom::Leq(s, t) => {
                self.check_term(s)?;
                self.check_term(t)
            }
            other => Err(SigError::new(format!(
                "atom {} is not in {}",
                crate::print::atom(other),
                self.describe()
            ))),
        }
    }

    fn check_program(&self, p: &Program) -> Result<(), SigError> {
        match p {
            Program::Assign(v, t) => {
                if !self.has_var(v) {
                    return Err(SigError::new(format!("variable {v} is outside {}", self.describe())));
                }
                self.check_term(t)
            }
            other => Err(SigError::new(format!(
                "program {} is not in {}",
                crate::print::program(other),
                self.describe()
            ))),
        }
    }

    fn eval_atom(&self, s: &State, a: &Atom) -> Truth {
        match a {
            Atom::True => Truth::True,
            Atom::Leq(l, r) => {
                let get = |v: &VarId| s.get(v);
                match (l.eval(&get), r.eval(&get)) {
                    (Some(x), Some(y)) => Truth::from_bool(x <= y),
                    _ => Truth::Unknown,
                }
            }
            _ => Truth::Unknown,
        }
    }

    fn successors(&self, s: &State, p: &Program, _budget: &EvalBudget) -> Successors {
        match p {
            Program::Assign(v, t) => match t.eval(&|x| s.get(x)) {
                Some(c) if self.admits(v, c) => Successors::exact(vec![s.with(v, c)]),
                Some(_) => Successors::none(),
                None => Successors { states: Vec::new(), complete: false },
            },
            _ => Successors { states: Vec::new(), complete: false },
        }
    }

    fn atom_fv(&self, a: &Atom) -> VarSet {
        match a {
            Atom::Leq(l, r) => {
                let mut s = l.vars();
                r.vars_into(&mut s);
                s
            }
            _ => VarSet::new(),
        }
    }

    fn prog_fv(&self, p: &Program) -> VarSet {
        match p {
            Program::Assign(_, t) => t.vars(),
            _ => VarSet::new(),
        }
    }

    fn prog_bv(&self, p: &Program) -> VarSet {
        match p {
            Program::Assign(v, _) => VarSet::from([v.clone()]),
            _ => VarSet::new(),
        }
    }

    fn admits(&self, _v: &VarId, x: Value) -> bool {
        self.carrier == Carrier::Int || x >= 0
    }

    fn values(&self, v: &VarId, budget: &EvalBudget) -> Values {
        let (mut lo, hi) = budget.window_for(v);
        if self.carrier == Carrier::Nat {
            lo = lo.max(0);
        }
        Values { lo, hi, exact: false }
    }

    fn state_vars(&self) -> Vec<VarId> {
        self.pool.clone()
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> State {
        let mut s = State::new();
        for v in &self.pool {
            s.set(v, rng.gen_range(self.window.0..=self.window.1));
        }
        s
    }

    fn sample_atom(&self, rng: &mut dyn RngCore) -> Atom {
        if rng.gen_range(0..12) == 0 {
            return Atom::True;
        }
        Atom::Leq(self.random_term(rng, 2), self.random_term(rng, 2))
    }

    fn sample_program(&self, rng: &mut dyn RngCore, _depth: u32) -> Program {
        let v = self.pool[rng.gen_range(0..self.pool.len())].clone();
        Program::Assign(v, self.random_term(rng, 2))
    }

    fn renamable(&self) -> bool {
        true
    }

    fn term_assignment(&self, v: &VarId) -> bool {
        self.has_var(v)
    }

    fn eq_formula(&self, v: &VarId, w: &VarId) -> Option<Formula> {
        Some(Formula::eq_terms(Term::Var(v.clone()), Term::Var(w.clone())))
    }

    fn inductive(&self, _side: Option<usize>) -> Option<InductiveExpressivity> {
        Some(InductiveExpressivity { carrier: self.carrier, prefix: self.prefix.clone() })
    }
}

/// Counting predicates over the variables of one semiring world.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InductiveExpressivity {
    carrier: Carrier,
    prefix: String,
}

impl InductiveExpressivity {
    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn is_counting(&self, v: &VarId) -> bool {
        v.has_prefix(&self.prefix) && v.name().len() > self.prefix.len()
    }

    pub fn u2n(&self, x: Value) -> u64 {
        x.max(0) as u64
    }

    pub fn natgt0(&self, v: &VarId) -> Formula {
        Formula::leq(Term::Lit(1), Term::Var(v.clone()))
    }

    pub fn nateq(&self, v: &VarId, w: &VarId) -> Formula {
        let (tv, tw) = (Term::Var(v.clone()), Term::Var(w.clone()));
        match self.carrier {
            Carrier::Nat => Formula::eq_terms(tv, tw),
            Carrier::Int => Formula::or(
                Formula::and(Formula::leq(tv.clone(), Term::Lit(0)), Formula::leq(tw.clone(), Term::Lit(0))),
                Formula::and(Formula::leq(Term::Lit(0), tv.clone()), Formula::eq_terms(tv, tw)),
            ),
        }
    }

    /// Holds iff `u2n(w) = u2n(v) + 1`.
    pub fn natplus1(&self, v: &VarId, w: &VarId) -> Formula {
        let (tv, tw) = (Term::Var(v.clone()), Term::Var(w.clone()));
        let succ = Formula::eq_terms(tw.clone(), Term::add(tv.clone(), Term::Lit(1)));
        match self.carrier {
            Carrier::Nat => succ,
            Carrier::Int => Formula::or(
                Formula::and(Formula::leq(tv.clone(), Term::Lit(0)), Formula::eq_terms(tw, Term::Lit(1))),
                Formula::and(Formula::leq(Term::Lit(0), tv), succ),
            ),
        }
    }
}
