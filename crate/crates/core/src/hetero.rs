//! Heterogeneous combination of two dynamic theories over product states.
//!
//! A product state is stored as one finite map whose keys are partitioned by
//! the two world prefixes; each world reads and writes only its own keys.

use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::instances::InductiveExpressivity;
use crate::lifting::full;
use crate::state::{State, Value};
use crate::syntax::{Atom, Coupling, CouplingKind, Formula, Program, VarId, VarSet};
use crate::theory::{DynamicTheory, EvalBudget, Layer, SigError, Successors, TheoryHandle, TheoryId, Truth, Values};

pub struct Combined {
    id: TheoryId,
    worlds: [TheoryHandle; 2],
    prefixes: [String; 2],
    couplings: Vec<Coupling>,
}

pub fn coupling_eq(v0: &VarId, v1: &VarId) -> Result<Coupling, SigError> {
    check_pair(v0, v1)?;
    Ok(Coupling { kind: CouplingKind::Eq, left: v0.clone(), right: v1.clone() })
}

pub fn coupling_scaled_eq(v0: &VarId, v1: &VarId, k: i64) -> Result<Coupling, SigError> {
    check_pair(v0, v1)?;
    if k == 0 {
        return Err(SigError::new("scaling factor must be nonzero"));
    }
    Ok(Coupling { kind: CouplingKind::ScaledEq(k), left: v0.clone(), right: v1.clone() })
}

fn check_pair(v0: &VarId, v1: &VarId) -> Result<(), SigError> {
    let w = |v: &VarId| v.name().split_once('.').map(|(p, _)| p.to_string());
    if w(v0).is_some() && w(v0) == w(v1) {
        return Err(SigError::new(format!("coupling arguments {v0} and {v1} are in the same world")));
    }
    Ok(())
}

pub fn combine(
    t0: TheoryHandle,
    t1: TheoryHandle,
    prefixes: [&str; 2],
    couplings: Vec<Coupling>,
) -> Result<TheoryHandle, SigError> {
    let [p0, p1] = prefixes;
    if p0.is_empty() || p1.is_empty() || p0.starts_with(p1) || p1.starts_with(p0) {
        return Err(SigError::new(format!("prefix collision between \"{p0}\" and \"{p1}\"")));
    }
    for (t, p) in [(&t0, p0), (&t1, p1)] {
        if let Some(v) = t.state_vars().iter().find(|v| !v.has_prefix(p)) {
            return Err(SigError::new(format!("world variable {v} lacks the prefix \"{p}\"")));
        }
    }
    for c in &couplings {
        if !(c.left.has_prefix(p0) && t0.has_var(&c.left)) {
            return Err(SigError::new(format!("coupling names unknown world-0 variable {}", c.left)));
        }
        if !(c.right.has_prefix(p1) && t1.has_var(&c.right)) {
            return Err(SigError::new(format!("coupling names unknown world-1 variable {}", c.right)));
        }
        if c.kind == CouplingKind::ScaledEq(0) {
            return Err(SigError::new("scaling factor must be nonzero"));
        }
    }
    Ok(Arc::new(Combined {
        id: TheoryId::fresh(),
        worlds: [t0, t1],
        prefixes: [p0.to_string(), p1.to_string()],
        couplings,
    }))
}

/// `regular(havoc(combine(..)))`.
pub fn full_hetero(
    t0: TheoryHandle,
    t1: TheoryHandle,
    prefixes: [&str; 2],
    couplings: Vec<Coupling>,
) -> Result<TheoryHandle, SigError> {
    Ok(full(combine(t0, t1, prefixes, couplings)?))
}

/// The simple heterogeneous core under any stack of lifts.
pub fn combined_core(th: &dyn DynamicTheory) -> Option<([TheoryHandle; 2], [String; 2])> {
    match th.layer() {
        Layer::Combined { worlds, prefixes } => Some((worlds, prefixes)),
        Layer::Havoc(b) | Layer::Regular(b) => combined_core(b.as_ref()),
        Layer::Base => None,
    }
}

pub fn hetero_inductive_instance(side: usize, combined: &TheoryHandle) -> Result<InductiveExpressivity, SigError> {
    if side > 1 {
        return Err(SigError::new("side must be 0 or 1"));
    }
    if combined_core(combined.as_ref()).is_none() {
        return Err(SigError::new("not a heterogeneous theory"));
    }
    combined
        .inductive(Some(side))
        .ok_or_else(|| SigError::new(format!("world {side} is not inductively expressive")))
}

/// Every identifier in a formula: variables, propositions, atomic programs.
/// The flag reports whether a coupling atom occurs.
pub fn formula_symbols(f: &Formula, out: &mut Vec<String>) -> bool {
    match f {
        Formula::Atom(a) => match a {
            Atom::True => false,
            Atom::Leq(s, t) => {
                out.extend(s.vars().into_iter().chain(t.vars()).map(|v| v.name().to_string()));
                false
            }
            Atom::Prop(n) => {
                out.push(n.to_string());
                false
            }
            Atom::Coupling(_) => true,
        },
        Formula::Not(g) => formula_symbols(g, out),
        Formula::And(a, b) => formula_symbols(a, out) | formula_symbols(b, out),
        Formula::Forall(v, g) => {
            out.push(v.name().to_string());
            formula_symbols(g, out)
        }
        Formula::Box(p, g) => program_symbols(p, out) | formula_symbols(g, out),
    }
}

pub fn program_symbols(p: &Program, out: &mut Vec<String>) -> bool {
    match p {
        Program::Assign(v, t) => {
            out.push(v.name().to_string());
            out.extend(t.vars().into_iter().map(|v| v.name().to_string()));
            false
        }
        Program::Atomic(n) => {
            out.push(n.to_string());
            false
        }
        Program::Havoc(v) => {
            out.push(v.name().to_string());
            false
        }
        Program::Test(f) => formula_symbols(f, out),
        Program::Seq(a, b) | Program::Choice(a, b) => program_symbols(a, out) | program_symbols(b, out),
        Program::Star(a) => program_symbols(a, out),
    }
}

/// First symbol of `f` that is not pure material of the world with `prefix`.
pub fn foreign_symbol_formula(f: &Formula, prefix: &str) -> Option<String> {
    let mut syms = Vec::new();
    if formula_symbols(f, &mut syms) {
        return Some("a coupling atom".into());
    }
    syms.into_iter().find(|s| !s.starts_with(prefix))
}

pub fn foreign_symbol_program(p: &Program, prefix: &str) -> Option<String> {
    let mut syms = Vec::new();
    if program_symbols(p, &mut syms) {
        return Some("a coupling atom".into());
    }
    syms.into_iter().find(|s| !s.starts_with(prefix))
}

impl Combined {
    fn world_of_name(&self, name: &str) -> Option<usize> {
        (0..2).find(|&i| name.starts_with(self.prefixes[i].as_str()))
    }

    fn world_of_var(&self, v: &VarId) -> Option<usize> {
        self.world_of_name(v.name())
    }

    fn route_atom(&self, a: &Atom) -> Option<usize> {
        match a {
            Atom::True => Some(0),
            Atom::Prop(n) => self.world_of_name(n),
            Atom::Leq(s, t) => match s.vars().into_iter().chain(t.vars()).next() {
                Some(v) => self.world_of_var(&v),
                None => (0..2).find(|&i| self.worlds[i].check_atom(a).is_ok()),
            },
            Atom::Coupling(_) => None,
        }
    }

    fn route_program(&self, p: &Program) -> Option<usize> {
        let mut syms = Vec::new();
        program_symbols(p, &mut syms);
        match syms.first() {
            Some(s) => self.world_of_name(s),
            None => (0..2).find(|&i| self.worlds[i].check_program(p).is_ok()),
        }
    }
}

impl DynamicTheory for Combined {
    fn id(&self) -> TheoryId {
        self.id
    }

    fn describe(&self) -> String {
        format!(
            "combine({} prefix \"{}\", {} prefix \"{}\")",
            self.worlds[0].describe(),
            self.prefixes[0],
            self.worlds[1].describe(),
            self.prefixes[1]
        )
    }

    fn layer(&self) -> Layer {
        Layer::Combined { worlds: self.worlds.clone(), prefixes: self.prefixes.clone() }
    }

    fn has_var(&self, v: &VarId) -> bool {
        self.world_of_var(v).is_some_and(|i| self.worlds[i].has_var(v))
    }

    fn check_atom(&self, a: &Atom) -> Result<(), SigError> {
        if let Atom::Coupling(c) = a {
            return if self.couplings.contains(c) {
                Ok(())
            } else {
                Err(SigError::new(format!("coupling {} is not declared", crate::print::atom(a))))
            };
        }
        match self.route_atom(a) {
            Some(i) => self.worlds[i].check_atom(a),
            None => Err(SigError::new(format!("atom {} belongs to neither world", crate::print::atom(a)))),
        }
    }

    fn check_program(&self, p: &Program) -> Result<(), SigError> {
        match self.route_program(p) {
            Some(i) => self.worlds[i].check_program(p),
            None => Err(SigError::new(format!("program {} belongs to neither world", crate::print::program(p)))),
        }
    }

    fn eval_atom(&self, s: &State, a: &Atom) -> Truth {
        match a {
            Atom::Coupling(c) => match c.holds(s.get(&c.left), s.get(&c.right)) {
                Some(b) => Truth::from_bool(b),
                None => Truth::Unknown,
            },
            _ => match self.route_atom(a) {
                Some(i) => self.worlds[i].eval_atom(s, a),
                None => Truth::Unknown,
            },
        }
    }

    fn successors(&self, s: &State, p: &Program, budget: &EvalBudget) -> Successors {
        match self.route_program(p) {
            Some(i) => self.worlds[i].successors(s, p, budget),
            None => Successors { states: Vec::new(), complete: false },
        }
    }

    fn atom_fv(&self, a: &Atom) -> VarSet {
        match a {
            Atom::Coupling(c) => VarSet::from([c.left.clone(), c.right.clone()]),
            _ => self.route_atom(a).map_or_else(VarSet::new, |i| self.worlds[i].atom_fv(a)),
        }
    }

    fn prog_fv(&self, p: &Program) -> VarSet {
        self.route_program(p).map_or_else(VarSet::new, |i| self.worlds[i].prog_fv(p))
    }

    fn prog_bv(&self, p: &Program) -> VarSet {
        self.route_program(p).map_or_else(VarSet::new, |i| self.worlds[i].prog_bv(p))
    }

    fn admits(&self, v: &VarId, x: Value) -> bool {
        self.world_of_var(v).is_some_and(|i| self.worlds[i].admits(v, x))
    }

    fn values(&self, v: &VarId, budget: &EvalBudget) -> Values {
        match self.world_of_var(v) {
            Some(i) => self.worlds[i].values(v, budget),
            None => Values { lo: 0, hi: -1, exact: true },
        }
    }

    fn is_finite(&self) -> bool {
        self.worlds.iter().all(|w| w.is_finite())
    }

    fn state_vars(&self) -> Vec<VarId> {
        let mut v = self.worlds[0].state_vars();
        v.extend(self.worlds[1].state_vars());
        v
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> State {
        let a = self.worlds[0].sample_state(rng).project(&self.prefixes[0]);
        let b = self.worlds[1].sample_state(rng).project(&self.prefixes[1]);
        a.merge(&b)
    }

    fn sample_atom(&self, rng: &mut dyn RngCore) -> Atom {
        if !self.couplings.is_empty() && rng.gen_range(0..4) == 0 {
            return Atom::Coupling(self.couplings[rng.gen_range(0..self.couplings.len())].clone());
        }
        self.worlds[rng.gen_range(0..2)].sample_atom(rng)
    }

    fn sample_program(&self, rng: &mut dyn RngCore, depth: u32) -> Program {
        self.worlds[rng.gen_range(0..2)].sample_program(rng, depth)
    }

    fn renamable(&self) -> bool {
        self.worlds.iter().all(|w| w.renamable())
    }

    fn eq_formula(&self, v: &VarId, w: &VarId) -> Option<Formula> {
        match (self.world_of_var(v), self.world_of_var(w)) {
            (Some(i), Some(j)) if i == j => self.worlds[i].eq_formula(v, w),
            _ => None,
        }
    }

    fn term_assignment(&self, v: &VarId) -> bool {
        self.world_of_var(v).is_some_and(|i| self.worlds[i].term_assignment(v))
    }

    fn inductive(&self, side: Option<usize>) -> Option<InductiveExpressivity> {
        let i = side?;
        let ind = self.worlds.get(i)?.inductive(None)?;
        ind.prefix().starts_with(self.prefixes[i].as_str()).then_some(ind)
    }
}

/// Two integer semiring worlds named `c.` and `p.`, the layout used by the
/// shipped controller/plant example.
pub fn int_worlds(window: (Value, Value)) -> Result<(TheoryHandle, TheoryHandle), SigError> {
    use crate::instances::{Carrier, SemiringTheory};
    let c = SemiringTheory::new(Carrier::Int, window)?.with_prefix("c.").handle();
    let p = SemiringTheory::new(Carrier::Int, window)?.with_prefix("p.").handle();
    Ok((c, p))
}
