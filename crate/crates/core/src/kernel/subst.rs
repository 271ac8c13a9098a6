//! Capture-checked substitution of a term for a variable.

use crate::semantics::fv_syn;
use crate::syntax::{Atom, Formula, Program, Term, VarId};
use crate::theory::DynamicTheory;

/// `f[t/v]`. Occurrences of `v` under a binder that also binds a variable of
/// `t`, or inside a program that writes `v` or a variable of `t`, are
/// rejected, except directly after an assignment to `v`, where only the
/// right-hand side is substituted.
pub fn subst_formula(th: &dyn DynamicTheory, f: &Formula, v: &VarId, t: &Term) -> Result<Formula, String> {
    if !fv_syn(th, f).contains(v) {
        return Ok(f.clone());
    }
    match f {
        Formula::Atom(a) => match a {
            Atom::Leq(l, r) => Ok(Formula::leq(l.subst(v, t), r.subst(v, t))),
            other => Err(format!("cannot substitute into atom {}", crate::print::atom(other))),
        },
        Formula::Not(g) => Ok(Formula::not(subst_formula(th, g, v, t)?)),
        Formula::And(a, b) => Ok(Formula::and(subst_formula(th, a, v, t)?, subst_formula(th, b, v, t)?)),
        Formula::Forall(u, g) => {
            if u == v {
                return Ok(f.clone());
            }
            if t.mentions(u) {
                return Err(format!("{u} would capture a variable of {}", crate::print::term(t)));
            }
            Ok(Formula::forall(u.clone(), subst_formula(th, g, v, t)?))
        }
        Formula::Box(p, g) => {
            if let Program::Assign(x, s) = p {
                if x == v {
                    return Ok(Formula::boxed(Program::Assign(x.clone(), s.subst(v, t)), (**g).clone()));
                }
            }
            let bv = th.prog_bv(p);
            if let Some(x) = bv.iter().find(|x| *x == v || t.mentions(x)) {
                return Err(format!("program {} writes {x}", crate::print::program(p)));
            }
            Ok(Formula::boxed(subst_program(th, p, v, t)?, subst_formula(th, g, v, t)?))
        }
    }
}

/// Substitutes into the reads of a program that writes neither `v` nor a
/// variable of `t`.
fn subst_program(th: &dyn DynamicTheory, p: &Program, v: &VarId, t: &Term) -> Result<Program, String> {
    Ok(match p {
        Program::Assign(x, s) => Program::Assign(x.clone(), s.subst(v, t)),
        Program::Havoc(_) => p.clone(),
        Program::Atomic(_) => {
            if th.prog_fv(p).contains(v) {
                return Err(format!("cannot substitute into program {}", crate::print::program(p)));
            }
            p.clone()
        }
        Program::Test(f) => Program::test(subst_formula(th, f, v, t)?),
        Program::Seq(a, b) => Program::seq(subst_program(th, a, v, t)?, subst_program(th, b, v, t)?),
        Program::Choice(a, b) => Program::choice(subst_program(th, a, v, t)?, subst_program(th, b, v, t)?),
        Program::Star(a) => Program::star(subst_program(th, a, v, t)?),
    })
}

/// `f[w/v]` for variables.
pub fn rename(th: &dyn DynamicTheory, f: &Formula, v: &VarId, w: &VarId) -> Result<Formula, String> {
    subst_formula(th, f, v, &Term::Var(w.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{semiring_theory, Carrier};
    use crate::lifting::full;
    use crate::parse::{parse_formula, parse_term};

    fn sub(f: &str, v: &str, t: &str) -> Result<String, String> {
        let th = full(semiring_theory(Carrier::Int, (-5, 5)).unwrap());
        let f = parse_formula(f).unwrap();
        subst_formula(th.as_ref(), &f, &VarId::new(v), &parse_term(t).unwrap()).map(|g| crate::print::formula(&g))
    }

    #[test]
    fn substitution_cases() {
        assert_eq!(sub("1 <= w", "w", "v + 1").unwrap(), "1 <= v + 1");
        assert_eq!(sub("[w := v + 1] 1 <= w", "v", "x").unwrap(), "[w := x + 1] 1 <= w");
        assert_eq!(sub("[v := v * 2] 1 <= v", "v", "v + 1").unwrap(), "[v := (v + 1) * 2] 1 <= v");
        assert_eq!(sub("forall v. v <= w", "v", "x").unwrap(), "forall v. v <= w");
        assert!(sub("forall v. v <= w", "w", "v").is_err());
        assert!(sub("[x := 1] v <= x", "v", "x").is_err());
        assert!(sub("[x := *] v <= x", "v", "y").is_ok());
    }
}
