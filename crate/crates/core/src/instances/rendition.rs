//! Modality-free renditions of star-free regular programs over a variable
//! vector and its twin vector.

use std::collections::BTreeMap;

use crate::semantics::fv_syn;
use crate::syntax::{Formula, Program, Term, VarId, VarSet};
use crate::theory::DynamicTheory;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RenditionError {
    #[error("star is outside the loop-free fragment")]
    Star,
    #[error("vector lengths differ ({0} vs {1})")]
    Length(usize, usize),
    #[error("variable {0} of the program is missing from the vector")]
    Uncovered(VarId),
    #[error("twin variable {0} is not fresh")]
    NotFresh(VarId),
    #[error("theory has no equality predicate")]
    NoEq,
    #[error("no rendition for program {0}")]
    Unsupported(String),
}

struct Renderer<'a> {
    th: &'a dyn DynamicTheory,
    xs: &'a [VarId],
    taken: VarSet,
    counter: usize,
}

impl Renderer<'_> {
    fn eq(&self, a: &VarId, b: &VarId) -> Result<Formula, RenditionError> {
        self.th.eq_formula(a, b).ok_or(RenditionError::NoEq)
    }

    fn frame(&self, pre: &[VarId], post: &[VarId], skip: Option<&VarId>) -> Result<Vec<Formula>, RenditionError> {
        let mut out = Vec::new();
        for (i, x) in self.xs.iter().enumerate() {
            if Some(x) != skip {
                out.push(self.eq(&pre[i], &post[i])?);
            }
        }
        Ok(out)
    }

    fn fresh_vector(&mut self) -> Vec<VarId> {
        self.counter += 1;
        let mut out = Vec::new();
        for x in self.xs {
            let mut k = self.counter;
            let name = loop {
                let cand = VarId::new(&format!("{}'{k}", x.name()));
                if !self.taken.contains(&cand) {
                    break cand;
                }
                k += 1;
            };
            self.taken.insert(name.clone());
            out.push(name);
        }
        out
    }

    fn render(&mut self, p: &Program, pre: &[VarId], post: &[VarId]) -> Result<Formula, RenditionError> {
        match p {
            Program::Assign(v, t) => {
                let map: BTreeMap<&VarId, &VarId> = self.xs.iter().zip(pre).collect();
                let t = rename_term(t, &map);
                let k = self.xs.iter().position(|x| x == v).ok_or_else(|| RenditionError::Uncovered(v.clone()))?;
                let mut parts = vec![Formula::eq_terms(t, Term::Var(post[k].clone()))];
                parts.extend(self.frame(pre, post, Some(v))?);
                Ok(Formula::conj(parts))
            }
            Program::Havoc(v) => Ok(Formula::conj(self.frame(pre, post, Some(v))?)),
            Program::Test(f) => {
                let mut parts = self.frame(pre, post, None)?;
                if pre == self.xs {
                    parts.push((**f).clone());
                } else {
                    let mut bind = self.frame(self.xs, pre, None)?;
                    bind.push((**f).clone());
                    parts.push(Formula::exists_many(self.xs, Formula::conj(bind)));
                }
                Ok(Formula::conj(parts))
            }
            Program::Seq(a, b) => {
                let mid = self.fresh_vector();
                let left = self.render(a, pre, &mid)?;
                let right = self.render(b, &mid, post)?;
                Ok(Formula::exists_many(&mid, Formula::and(left, right)))
            }
            Program::Choice(a, b) => Ok(Formula::or(self.render(a, pre, post)?, self.render(b, pre, post)?)),
            Program::Star(_) => Err(RenditionError::Star),
            Program::Atomic(_) => Err(RenditionError::Unsupported(crate::print::program(p))),
        }
    }
}

fn rename_term(t: &Term, map: &BTreeMap<&VarId, &VarId>) -> Term {
    match t {
        Term::Lit(n) => Term::Lit(*n),
        Term::Var(v) => Term::Var(map.get(v).map_or_else(|| v.clone(), |w| (*w).clone())),
        Term::Add(a, b) => Term::add(rename_term(a, map), rename_term(b, map)),
        Term::Mul(a, b) => Term::mul(rename_term(a, map), rename_term(b, map)),
    }
}

/// `S_p(xs, next)`: a pair (μ, ν) is a run of `p` iff μ and ν agree off `xs`
/// and the twin state (μ with `next` set to ν's values of `xs`) satisfies it.
pub fn rendition_loopfree(
    th: &dyn DynamicTheory,
    p: &Program,
    xs: &[VarId],
    next: &[VarId],
) -> Result<Formula, RenditionError> {
    if !p.is_star_free() {
        return Err(RenditionError::Star);
    }
    if xs.len() != next.len() {
        return Err(RenditionError::Length(xs.len(), next.len()));
    }
    let have: VarSet = xs.iter().cloned().collect();
    let mut needed = th.prog_fv(p);
    needed.extend(th.prog_bv(p));
    if let Some(v) = needed.iter().find(|v| !have.contains(*v)) {
        return Err(RenditionError::Uncovered(v.clone()));
    }
    let mut taken = p_names(p);
    taken.extend(have.iter().cloned());
    for n in next {
        if taken.contains(n) {
            return Err(RenditionError::NotFresh(n.clone()));
        }
    }
    taken.extend(next.iter().cloned());
    if let Some(v) = xs.first() {
        th.eq_formula(v, v).ok_or(RenditionError::NoEq)?;
    }
    let mut r = Renderer { th, xs, taken, counter: 0 };
    r.render(p, xs, next)
}

fn p_names(p: &Program) -> VarSet {
    let mut out = VarSet::new();
    p.names_into(&mut out);
    out
}

/// The twin state: `mu` with each `next[i]` holding `nu(xs[i])`.
pub fn twin_state(mu: &crate::state::State, nu: &crate::state::State, xs: &[VarId], next: &[VarId]) -> crate::state::State {
    let mut s = mu.clone();
    for (x, n) in xs.iter().zip(next) {
        s.set(n, nu.get(x));
    }
    s
}

/// Covering vector for a program: its free and bound variables in order.
pub fn default_vector(th: &dyn DynamicTheory, p: &Program) -> Vec<VarId> {
    let mut s = th.prog_fv(p);
    s.extend(th.prog_bv(p));
    if let Program::Test(f) = p {
        s.extend(fv_syn(th, f));
    }
    s.into_iter().collect()
}
