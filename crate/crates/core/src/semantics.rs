//! Formula semantics over any dynamic theory, syntactic free variables and
//! exhaustive validity for finite theories.

use crate::state::State;
use crate::syntax::{Atom, Formula, Program, Term, VarId, VarSet};
use crate::theory::{DynamicTheory, EvalBudget, SigError, Truth};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("malformed: {0}")]
    Malformed(#[from] SigError),
    #[error("bad budget: {0}")]
    Budget(String),
    #[error("theory is not finite-enumerable")]
    NotFinite,
}

pub fn check_formula(th: &dyn DynamicTheory, f: &Formula) -> Result<(), SigError> {
    match f {
        Formula::Atom(a) => th.check_atom(a),
        Formula::Not(g) => check_formula(th, g),
        Formula::And(a, b) => {
            check_formula(th, a)?;
            check_formula(th, b)
        }
        Formula::Forall(v, g) => {
            if !th.has_var(v) {
                return Err(SigError::new(format!("unknown variable {v} in {}", th.describe())));
            }
            check_formula(th, g)
        }
        Formula::Box(p, g) => {
            th.check_program(p)?;
            check_formula(th, g)
        }
    }
}

pub fn fv_syn(th: &dyn DynamicTheory, f: &Formula) -> VarSet {
    match f {
        Formula::Atom(a) => th.atom_fv(a),
        Formula::Not(g) => fv_syn(th, g),
        Formula::And(a, b) => {
            let mut s = fv_syn(th, a);
            s.extend(fv_syn(th, b));
            s
        }
        Formula::Forall(v, g) => {
            let mut s = fv_syn(th, g);
            s.remove(v);
            s
        }
        Formula::Box(p, g) => {
            let mut s = th.prog_fv(p);
            s.extend(fv_syn(th, g));
            s
        }
    }
}

/// Checked entry point: validates the budget and the formula first.
pub fn eval_formula(
    th: &dyn DynamicTheory,
    s: &State,
    f: &Formula,
    budget: &EvalBudget,
) -> Result<Truth, EvalError> {
    budget.validate().map_err(EvalError::Budget)?;
    check_formula(th, f)?;
    Ok(eval(th, s, f, budget))
}

/// Unchecked evaluation; callers guarantee well-formedness.
pub fn eval(th: &dyn DynamicTheory, s: &State, f: &Formula, b: &EvalBudget) -> Truth {
    match f {
        Formula::Atom(a) => th.eval_atom(s, a),
        Formula::Not(g) => eval(th, s, g, b).not(),
        Formula::And(l, r) => match eval(th, s, l, b) {
            Truth::False => Truth::False,
            lt => match eval(th, s, r, b) {
                Truth::False => Truth::False,
                Truth::True => lt,
                Truth::Unknown => Truth::Unknown,
            },
        },
        Formula::Forall(v, body) => {
            if let Some(c) = pinned_value(s, v, body) {
                if !th.admits(v, c) {
                    return Truth::True;
                }
                return eval(th, &s.with(v, c), body, b);
            }
            let vals = th.values(v, b);
            let mut unknown = false;
            for c in vals.iter() {
                match eval(th, &s.with(v, c), body, b) {
                    Truth::False => return Truth::False,
                    Truth::Unknown => unknown = true,
                    Truth::True => {}
                }
            }
            if unknown || !(vals.exact || b.closed) {
                Truth::Unknown
            } else {
                Truth::True
            }
        }
        Formula::Box(p, body) => {
            let succ = th.successors(s, p, b);
            let mut unknown = false;
            for t in &succ.states {
                match eval(th, t, body, b) {
                    Truth::False => return Truth::False,
                    Truth::Unknown => unknown = true,
                    Truth::True => {}
                }
            }
            if unknown || !succ.complete {
                Truth::Unknown
            } else {
                Truth::True
            }
        }
    }
}

/// For `∀v ¬G` where G forces `v = t` (through a conjunction, possibly under
/// existentials not binding t's variables), the body is true at every value
/// other than t, so only that one instance needs evaluating.
fn pinned_value(s: &State, v: &VarId, body: &Formula) -> Option<i64> {
    let Formula::Not(g) = body else { return None };
    let mut atoms = Vec::new();
    collect_leq(g, v, &mut Vec::new(), &mut atoms);
    for (i, (a, t)) in atoms.iter().enumerate() {
        if !matches!(a, Term::Var(x) if x == v) || t.mentions(v) {
            continue;
        }
        let back = atoms.iter().enumerate().any(|(j, (l, r))| {
            j != i && l == t && matches!(r, Term::Var(x) if x == v)
        });
        if back {
            return t.eval(&|x| s.get(x));
        }
    }
    None
}

fn collect_leq<'a>(
    g: &'a Formula,
    v: &VarId,
    bound: &mut Vec<&'a VarId>,
    out: &mut Vec<(&'a Term, &'a Term)>,
) {
    match g {
        Formula::And(a, b) => {
            collect_leq(a, v, bound, out);
            collect_leq(b, v, bound, out);
        }
        Formula::Atom(Atom::Leq(a, b)) => {
            if bound.iter().all(|u| !a.mentions(u) && !b.mentions(u)) {
                out.push((a, b));
            }
        }
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Not(x) => collect_leq(x, v, bound, out),
            Formula::Forall(u, body) if u != v => {
                if let Formula::Not(c) = body.as_ref() {
                    bound.push(u);
                    collect_leq(c, v, bound, out);
                    bound.pop();
                }
            }
            _ => {}
        },
        _ => {}
    }
}

/// A human-readable path explaining why `f` has truth `want` at `s`.
pub fn explain(th: &dyn DynamicTheory, s: &State, f: &Formula, b: &EvalBudget, want: bool) -> Vec<String> {
    let mut out = Vec::new();
    explain_into(th, s, f, b, want, &mut out, 0);
    out
}

fn explain_into(
    th: &dyn DynamicTheory,
    s: &State,
    f: &Formula,
    b: &EvalBudget,
    want: bool,
    out: &mut Vec<String>,
    depth: usize,
) {
    if out.len() >= 64 || depth > 40 {
        return;
    }
    let shown = crate::print::formula(f);
    match f {
        Formula::Atom(_) => out.push(format!("atom {shown} is {want} at {s}")),
        Formula::Not(g) => explain_into(th, s, g, b, !want, out, depth + 1),
        Formula::And(l, r) => {
            if want {
                explain_into(th, s, l, b, true, out, depth + 1);
                explain_into(th, s, r, b, true, out, depth + 1);
            } else if eval(th, s, l, b) == Truth::False {
                explain_into(th, s, l, b, false, out, depth + 1);
            } else {
                explain_into(th, s, r, b, false, out, depth + 1);
            }
        }
        Formula::Forall(v, body) => {
            if want {
                out.push(format!("every instance of {v} satisfies {}", crate::print::formula(body)));
                return;
            }
            let candidates: Vec<i64> = match pinned_value(s, v, body) {
                Some(c) => vec![c],
                None => th.values(v, b).iter().collect(),
            };
            for c in candidates {
                let t = s.with(v, c);
                if eval(th, &t, body, b) == Truth::False {
                    out.push(format!("instance {v}={c}"));
                    explain_into(th, &t, body, b, false, out, depth + 1);
                    return;
                }
            }
        }
        Formula::Box(p, body) => {
            if want {
                out.push(format!("every run of {} ends in {}", crate::print::program(p), crate::print::formula(body)));
                return;
            }
            for t in th.successors(s, p, b).states {
                if eval(th, &t, body, b) == Truth::False {
                    out.push(format!("run of {} reaches {t}", crate::print::program(p)));
                    explain_into(th, &t, body, b, false, out, depth + 1);
                    return;
                }
            }
        }
    }
}

/// Every state of a finite theory.
pub fn all_states(th: &dyn DynamicTheory) -> Result<Vec<State>, EvalError> {
    if !th.is_finite() {
        return Err(EvalError::NotFinite);
    }
    let budget = EvalBudget::default();
    let mut states = vec![State::new()];
    for v in th.state_vars() {
        let vals = th.values(&v, &budget);
        let mut next = Vec::with_capacity(states.len() * vals.len() as usize);
        for s in &states {
            for c in vals.iter() {
                next.push(s.with(&v, c));
            }
        }
        states = next;
    }
    Ok(states)
}

/// A state where `f` is not true, if any.
pub fn find_invalid(th: &dyn DynamicTheory, f: &Formula) -> Result<Option<State>, EvalError> {
    check_formula(th, f)?;
    let budget = EvalBudget::default();
    for s in all_states(th)? {
        if eval(th, &s, f, &budget) != Truth::True {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

pub fn is_valid_exhaustive(th: &dyn DynamicTheory, f: &Formula) -> Result<bool, EvalError> {
    Ok(find_invalid(th, f)?.is_none())
}

/// Variables whose initial values can influence `f`: like `fv_syn`, but an
/// assignment or havoc kills its target for everything run after it.
pub fn live_vars(th: &dyn DynamicTheory, f: &Formula) -> VarSet {
    match f {
        Formula::Atom(a) => th.atom_fv(a),
        Formula::Not(g) => live_vars(th, g),
        Formula::And(a, b) => {
            let mut s = live_vars(th, a);
            s.extend(live_vars(th, b));
            s
        }
        Formula::Forall(v, g) => {
            let mut s = live_vars(th, g);
            s.remove(v);
            s
        }
        Formula::Box(p, g) => live_before(th, p, live_vars(th, g)),
    }
}

fn live_before(th: &dyn DynamicTheory, p: &Program, after: VarSet) -> VarSet {
    match p {
        Program::Assign(v, t) => {
            let mut s = after;
            s.remove(v);
            t.vars_into(&mut s);
            s
        }
        Program::Havoc(v) => {
            let mut s = after;
            s.remove(v);
            s
        }
        Program::Test(g) => {
            let mut s = after;
            s.extend(fv_syn(th, g));
            s
        }
        Program::Seq(p, q) => {
            let mid = live_before(th, q, after);
            live_before(th, p, mid)
        }
        Program::Choice(p, q) => {
            let mut s = live_before(th, p, after.clone());
            s.extend(live_before(th, q, after));
            s
        }
        Program::Star(body) => {
            let mut acc = after;
            loop {
                let mut next = acc.clone();
                next.extend(live_before(th, body, acc.clone()));
                if next == acc {
                    return acc;
                }
                acc = next;
            }
        }
        Program::Atomic(_) => {
            let mut s = after;
            s.extend(th.prog_fv(p));
            s.extend(th.prog_bv(p));
            s
        }
    }
}
