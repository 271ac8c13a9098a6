//! Soundness audit of every axiom schema and derived rule: random
//! side-condition-respecting instances are built through the kernel and then
//! checked exhaustively on finite Kripke theories or screened on windowed
//! semiring theories.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::laws::trial_rng;
use super::{gen, screen, AuditReport, Check};
use crate::derived;
use crate::hetero::full_hetero;
use crate::instances::{Carrier, SemiringTheory};
use crate::kernel::{self, Theorem};
use crate::lifting::full;
use crate::semantics::{find_invalid, fv_syn};
use crate::syntax::{Formula, Program, Term, VarId, VarSet};
use crate::theory::{DynamicTheory, EvalBudget, TheoryHandle};

pub const SCHEMAS: [&str; 17] = [
    "G", "K", "V", "B", "havoc", "test", "seq", "choice", "star", "I", "C", "boxAnd", "KDia", "MPDia", "Fi",
    "ghost", "PB",
];

/// Budget for screening semiring instances.
pub fn screening_budget() -> EvalBudget {
    let mut b = EvalBudget::with_window(-3, 3).star_depth(4);
    b.quant_cap = 7;
    b.enum_cap = 400;
    b.samples = 32;
    b.succ_cap = 5_000;
    b
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Kripke,
    Semiring,
    HeteroKripke,
    HeteroSemiring,
}

fn kripke(rng: &mut ChaCha8Rng) -> TheoryHandle {
    full(gen::kripke(rng, 5, "").expect("generated models are well formed"))
}

fn semiring(rng: &mut ChaCha8Rng) -> TheoryHandle {
    let th = if rng.gen_bool(0.75) {
        SemiringTheory::new(Carrier::Int, (-3, 3))
    } else {
        SemiringTheory::new(Carrier::Nat, (0, 3))
    };
    full(th.expect("window contains 0 and 1").handle())
}

fn hetero(rng: &mut ChaCha8Rng, kind: Kind) -> (TheoryHandle, [TheoryHandle; 2]) {
    let worlds: [TheoryHandle; 2] = if kind == Kind::HeteroKripke {
        [
            gen::kripke(rng, 3, "a.").expect("well formed"),
            gen::kripke(rng, 3, "b.").expect("well formed"),
        ]
    } else {
        [
            SemiringTheory::new(Carrier::Int, (-3, 3)).unwrap().with_prefix("a.").with_pool(&["a.x", "a.y"]).handle(),
            SemiringTheory::new(Carrier::Int, (-3, 3)).unwrap().with_prefix("b.").with_pool(&["b.x", "b.y"]).handle(),
        ]
    };
    let th = full_hetero(worlds[0].clone(), worlds[1].clone(), ["a.", "b."], vec![]).expect("prefixes differ");
    (th, [full(worlds[0].clone()), full(worlds[1].clone())])
}

struct Ctx<'a> {
    th: &'a dyn DynamicTheory,
    vars: Vec<VarId>,
    depth: u32,
}

impl Ctx<'_> {
    fn f(&self, rng: &mut ChaCha8Rng) -> Formula {
        gen::formula(self.th, rng, self.depth, &self.vars)
    }

    fn fol(&self, rng: &mut ChaCha8Rng) -> Formula {
        gen::fol_formula(self.th, rng, self.depth, &self.vars)
    }

    fn p(&self, rng: &mut ChaCha8Rng) -> Program {
        gen::program(self.th, rng, 1)
    }

    fn var(&self, rng: &mut ChaCha8Rng) -> VarId {
        self.vars.choose(rng).expect("theories have variables").clone()
    }

    /// Closes `f` under the variables in `bad`, the generic side-condition
    /// repair.
    fn close(&self, f: Formula, bad: &VarSet) -> Formula {
        let vs: Vec<VarId> = fv_syn(self.th, &f).intersection(bad).cloned().collect();
        Formula::forall_many(&vs, f)
    }
}

fn vars_of(th: &dyn DynamicTheory, p: &Program) -> VarSet {
    let mut s = th.prog_fv(p);
    s.extend(th.prog_bv(p));
    s
}

/// Builds one instance of `schema` through the kernel. `Ok(None)` means no
/// instance satisfying the side conditions was drawn.
fn instance(schema: &str, rng: &mut ChaCha8Rng, kind: Kind) -> Result<Option<(TheoryHandle, Theorem)>, String> {
    let (th, worlds) = match kind {
        Kind::Kripke => (kripke(rng), None),
        Kind::Semiring => (semiring(rng), None),
        Kind::HeteroKripke | Kind::HeteroSemiring => {
            let (th, w) = hetero(rng, kind);
            (th, Some(w))
        }
    };
    let depth = if kind == Kind::Kripke { 3 } else { 2 };
    let c = Ctx { th: th.as_ref(), vars: th.state_vars(), depth };
    let t = th.as_ref();
    let err = |e: kernel::KernelError| e.to_string();
    let thm = match schema {
        "G" => {
            let k = kernel::ax_k(t, &c.p(rng), &c.f(rng), &c.f(rng)).map_err(err)?;
            kernel::rule_g(t, &k, &c.p(rng)).map_err(err)?
        }
        "K" => kernel::ax_k(t, &c.p(rng), &c.f(rng), &c.f(rng)).map_err(err)?,
        "V" => {
            let p = c.p(rng);
            let f = c.close(c.f(rng), &t.prog_bv(&p));
            kernel::ax_v(t, &p, &f).map_err(err)?
        }
        "B" => {
            let Some(w) = &worlds else { return Ok(None) };
            let p = gen::program(w[0].as_ref(), rng, 1);
            let used = vars_of(t, &p);
            let free: Vec<VarId> = c.vars.iter().filter(|v| !used.contains(*v)).cloned().collect();
            let Some(v) = free.choose(rng).cloned() else { return Ok(None) };
            kernel::ax_b(t, &p, &v, &c.f(rng)).map_err(err)?
        }
        "havoc" => kernel::ax_havoc(t, &c.var(rng), &c.f(rng)).map_err(err)?,
        "test" => kernel::ax_test(t, &c.fol(rng), &c.f(rng)).map_err(err)?,
        "seq" => kernel::ax_seq(t, &c.p(rng), &c.p(rng), &c.f(rng)).map_err(err)?,
        "choice" => kernel::ax_choice(t, &c.p(rng), &c.p(rng), &c.f(rng)).map_err(err)?,
        "star" => kernel::ax_star(t, &c.p(rng), &c.f(rng)).map_err(err)?,
        "I" => kernel::ax_i(t, &c.p(rng), &c.f(rng)).map_err(err)?,
        "C" => {
            let ind = t.inductive(None).ok_or("no inductive witness")?;
            let (n, m) = (VarId::new("n"), VarId::new("m"));
            let mut fvars = c.vars.clone();
            fvars.push(n.clone());
            let base = gen::formula(t, rng, 1, &fvars);
            let link = Formula::leq(Term::Var(n.clone()), Term::Var(c.var(rng)));
            let f = if rng.gen_bool(0.5) { Formula::and(base, link) } else { Formula::or(link, base) };
            kernel::ax_c(t, &ind, &c.p(rng), &f, &n, &m, None).map_err(err)?
        }
        "boxAnd" => derived::box_and(t, &c.p(rng), &c.f(rng), &c.f(rng)).map_err(err)?,
        "KDia" => derived::k_dia(t, &c.p(rng), &c.f(rng), &c.f(rng)).map_err(err)?,
        "MPDia" => {
            let p = c.p(rng);
            let mut vs: Vec<VarId> = t.prog_bv(&p).into_iter().collect();
            if rng.gen_bool(0.3) {
                let v = c.var(rng);
                if !vs.contains(&v) {
                    vs.push(v);
                }
            }
            derived::mp_dia(t, &p, &c.f(rng), &c.f(rng), &vs).map_err(err)?
        }
        "PB" => {
            let p = c.p(rng);
            let a = c.f(rng);
            let mut need = t.prog_bv(&p);
            need.extend(fv_syn(t, &Formula::diamond(p.clone(), a.clone())));
            let vs: Vec<VarId> = need.into_iter().collect();
            derived::pb(t, &p, &c.f(rng), &c.f(rng), &a, &vs).map_err(err)?
        }
        "Fi" => {
            let Some(w) = &worlds else { return Ok(None) };
            let i = rng.gen_range(0..2);
            let p = gen::program(w[1 - i].as_ref(), rng, 1);
            let own = w[i].state_vars();
            let a = gen::formula(w[i].as_ref(), rng, 2, &own);
            derived::fi(t, i, &c.f(rng), &p, &c.f(rng), &a).map_err(err)?
        }
        "ghost" => {
            let (v, w) = (c.var(rng), c.var(rng));
            let f = c.close(c.f(rng), &VarSet::from([v.clone()]));
            derived::ghost(t, &v, &w, &f).map_err(err)?
        }
        other => return Err(format!("unknown schema {other}")),
    };
    Ok(Some((th, thm)))
}

fn kinds(schema: &str) -> &'static [Kind] {
    match schema {
        "B" | "Fi" => &[Kind::HeteroKripke, Kind::HeteroSemiring],
        "C" | "ghost" => &[Kind::Semiring],
        _ => &[Kind::Kripke, Kind::Semiring],
    }
}

/// Checks one theorem: exhaustively when the theory is finite, otherwise by
/// screening. Returns a witness on failure and whether the check was
/// exhaustive.
pub fn check_theorem(th: &dyn DynamicTheory, thm: &Theorem, budget: &EvalBudget) -> (Option<String>, bool) {
    let f = thm.conclusion();
    if th.is_finite() {
        return match find_invalid(th, f) {
            Ok(None) => (None, true),
            Ok(Some(s)) => (Some(format!("{thm}\n  fails at {s}")), true),
            Err(e) => (Some(format!("{thm}\n  {e}")), true),
        };
    }
    match screen(th, f, budget) {
        Ok(r) => (r.counterexample.map(|ce| format!("{thm}\n{ce}")), false),
        Err(e) => (Some(format!("{thm}\n  {e}")), false),
    }
}

fn audit_schema(schema: &str, index: usize, trials: usize, seed: u64) -> Check {
    let budget = screening_budget();
    let parts: Vec<Check> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, 100 + index as u64, i);
            let ks = kinds(schema);
            let kind = ks[i % ks.len()];
            let mut c = Check::new(schema);
            match instance(schema, &mut rng, kind) {
                Ok(Some((th, thm))) => {
                    let (witness, exhaustive) = check_theorem(th.as_ref(), &thm, &budget);
                    if exhaustive {
                        c.exhaustive += 1;
                    }
                    match witness {
                        None => c.pass(),
                        Some(w) => c.fail(|| w),
                    }
                }
                Ok(None) | Err(_) => c.skipped += 1,
            }
            c
        })
        .collect();
    let mut out = Check::new(schema);
    for p in parts {
        out.merge(p);
    }
    out
}

pub fn validate_axiom_schemas(trials: usize, seed: u64) -> AuditReport {
    let start = Instant::now();
    let checks = SCHEMAS.iter().enumerate().map(|(i, s)| audit_schema(s, i, trials, seed)).collect();
    AuditReport { title: "axiom schema audit".into(), seed, checks, elapsed: start.elapsed() }
}

/// Negative control: `F -> [p]F` with the side condition skipped, so `F` may
/// read what `p` writes. On Kripke frames this is refuted quickly.
pub fn corrupted_v_control(trials: usize, seed: u64) -> Check {
    let parts: Vec<Check> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, 99, i);
            let th = kripke(&mut rng);
            let c = Ctx { th: th.as_ref(), vars: th.state_vars(), depth: 2 };
            let (p, f) = (c.p(&mut rng), c.f(&mut rng));
            let bogus = Formula::implies(f.clone(), Formula::boxed(p, f));
            let mut out = Check::new("corrupted-V");
            out.exhaustive += 1;
            match find_invalid(th.as_ref(), &bogus) {
                Ok(Some(s)) => out.fail(|| format!("{} fails at {s}", crate::print::formula(&bogus))),
                _ => out.pass(),
            }
            out
        })
        .collect();
    let mut out = Check::new("corrupted-V");
    for p in parts {
        out.merge(p);
    }
    out
}
