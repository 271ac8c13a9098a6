//! Propositional dynamic logic over a finite Kripke frame. The current world
//! is held in a single location variable, so atoms and atomic programs read
//! and write exactly that variable.

use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::state::{State, Value};
use crate::syntax::{Atom, Program, VarId, VarSet};
use crate::theory::{DynamicTheory, EvalBudget, SigError, Successors, TheoryHandle, TheoryId, Truth, Values};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KripkeModel {
    pub states: Vec<String>,
    pub programs: Vec<(String, Vec<(usize, usize)>)>,
    pub atoms: Vec<(String, Vec<usize>)>,
}

impl KripkeModel {
    pub fn new(states: &[&str]) -> Self {
        KripkeModel { states: states.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn program(mut self, name: &str, edges: &[(&str, &str)]) -> Self {
        let rel = edges
            .iter()
            .map(|(a, b)| (self.index_or_push(a), self.index_or_push(b)))
            .collect();
        self.programs.push((name.to_string(), rel));
        self
    }

    pub fn atom(mut self, name: &str, holds: &[&str]) -> Self {
        let set = holds.iter().map(|s| self.index_or_push(s)).collect();
        self.atoms.push((name.to_string(), set));
        self
    }

    fn index_or_push(&mut self, name: &str) -> usize {
        match self.state_index(name) {
            Some(i) => i,
            None => {
                self.states.push(name.to_string());
                self.states.len() - 1
            }
        }
    }

    pub fn validate(&self) -> Result<(), SigError> {
        let n = self.states.len();
        if n == 0 {
            return Err(SigError::new("Kripke model has no states"));
        }
        for (name, rel) in &self.programs {
            if rel.iter().any(|&(a, b)| a >= n || b >= n) {
                return Err(SigError::new(format!("program {name} references an undeclared state")));
            }
        }
        for (name, set) in &self.atoms {
            if set.iter().any(|&a| a >= n) {
                return Err(SigError::new(format!("atom {name} references an undeclared state")));
            }
        }
        Ok(())
    }
}

pub struct KripkeTheory {
    id: TheoryId,
    model: KripkeModel,
    prefix: String,
    loc: VarId,
}

impl KripkeTheory {
    pub fn new(model: KripkeModel) -> Result<Self, SigError> {
        Self::with_prefix(model, "")
    }

    /// Names atoms `<prefix><atom>`, programs `<prefix><prog>` and the
    /// location variable `<prefix>loc`.
    pub fn with_prefix(model: KripkeModel, prefix: &str) -> Result<Self, SigError> {
        model.validate()?;
        Ok(KripkeTheory {
            id: TheoryId::fresh(),
            model,
            prefix: prefix.to_string(),
            loc: VarId::new(&format!("{prefix}loc")),
        })
    }

    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    pub fn loc(&self) -> &VarId {
        &self.loc
    }

    pub fn handle(self) -> TheoryHandle {
        Arc::new(self)
    }

    fn local<'a>(&self, name: &'a str) -> Option<&'a str> {
        name.strip_prefix(self.prefix.as_str())
    }

    fn find_program(&self, name: &str) -> Option<&Vec<(usize, usize)>> {
        let local = self.local(name)?;
        self.model.programs.iter().find(|(n, _)| n == local).map(|(_, r)| r)
    }

    fn find_atom(&self, name: &str) -> Option<&Vec<usize>> {
        let local = self.local(name)?;
        self.model.atoms.iter().find(|(n, _)| n == local).map(|(_, s)| s)
    }

    fn here(&self, s: &State) -> Option<usize> {
        let i = s.get(&self.loc);
        (0..self.model.states.len() as Value).contains(&i).then_some(i as usize)
    }
}

pub fn kripke_theory(model: KripkeModel) -> Result<TheoryHandle, SigError> {
    Ok(KripkeTheory::new(model)?.handle())
}

impl DynamicTheory for KripkeTheory {
    fn id(&self) -> TheoryId {
        self.id
    }

    fn describe(&self) -> String {
        format!("kripke[{} states]", self.model.states.len())
    }

    fn has_var(&self, v: &VarId) -> bool {
        *v == self.loc
    }

    fn check_atom(&self, a: &Atom) -> Result<(), SigError> {
        match a {
            Atom::True => Ok(()),
            Atom::Prop(name) if self.find_atom(name).is_some() => Ok(()),
            other => Err(SigError::new(format!("atom {} is not in {}", crate::print::atom(other), self.describe()))),
        }
    }

    fn check_program(&self, p: &Program) -> Result<(), SigError> {
        match p {
            Program::Atomic(name) if self.find_program(name).is_some() => Ok(()),
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
            Atom::Prop(name) => match (self.find_atom(name), self.here(s)) {
                (Some(set), Some(i)) => Truth::from_bool(set.contains(&i)),
                _ => Truth::Unknown,
            },
            _ => Truth::Unknown,
        }
    }

    fn successors(&self, s: &State, p: &Program, _budget: &EvalBudget) -> Successors {
        let (Program::Atomic(name), Some(i)) = (p, self.here(s)) else {
            return Successors { states: Vec::new(), complete: false };
        };
        let Some(rel) = self.find_program(name) else {
            return Successors { states: Vec::new(), complete: false };
        };
        let mut out: Vec<State> = rel
            .iter()
            .filter(|(a, _)| *a == i)
            .map(|&(_, b)| s.with(&self.loc, b as Value))
            .collect();
        out.sort();
        out.dedup();
        Successors::exact(out)
    }

    fn atom_fv(&self, a: &Atom) -> VarSet {
        match a {
            Atom::Prop(_) => VarSet::from([self.loc.clone()]),
            _ => VarSet::new(),
        }
    }

    fn prog_fv(&self, _p: &Program) -> VarSet {
        VarSet::from([self.loc.clone()])
    }

    fn prog_bv(&self, _p: &Program) -> VarSet {
        VarSet::from([self.loc.clone()])
    }

    fn admits(&self, v: &VarId, x: Value) -> bool {
        *v == self.loc && (0..self.model.states.len() as Value).contains(&x)
    }

    fn values(&self, _v: &VarId, _budget: &EvalBudget) -> Values {
        Values { lo: 0, hi: self.model.states.len() as Value - 1, exact: true }
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn state_vars(&self) -> Vec<VarId> {
        vec![self.loc.clone()]
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> State {
        State::new().with(&self.loc, rng.gen_range(0..self.model.states.len()) as Value)
    }

    fn sample_atom(&self, rng: &mut dyn RngCore) -> Atom {
        if self.model.atoms.is_empty() || rng.gen_range(0..8) == 0 {
            return Atom::True;
        }
        let (name, _) = &self.model.atoms[rng.gen_range(0..self.model.atoms.len())];
        Atom::prop(&format!("{}{name}", self.prefix))
    }

    fn sample_program(&self, rng: &mut dyn RngCore, _depth: u32) -> Program {
        if self.model.programs.is_empty() {
            return Program::atomic("");
        }
        let (name, _) = &self.model.programs[rng.gen_range(0..self.model.programs.len())];
        Program::atomic(&format!("{}{name}", self.prefix))
    }
}
