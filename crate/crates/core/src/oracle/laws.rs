//! Randomized audits of the theory contract: interpolation, coincidence for
//! atoms, formulas and programs, extensionality and bounded effect.

use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{gen, AuditReport, Check};
use crate::instances::InductiveExpressivity;
use crate::semantics::{eval, fv_syn};
use crate::state::{equal_on, State, Value, VarSel};
use crate::syntax::{Atom, Program, VarId, VarSet};
use crate::theory::{
    DynamicTheory, EvalBudget, Layer, SigError, Successors, TheoryHandle, TheoryId, Truth, Values,
};

pub(crate) fn trial_rng(seed: u64, stream: u64, trial: usize) -> ChaCha8Rng {
    let mix = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(trial as u64);
    ChaCha8Rng::seed_from_u64(mix)
}

/// The budget used by the law audits: small windows, shallow stars.
pub fn audit_budget() -> EvalBudget {
    let mut b = EvalBudget::with_window(-4, 4).star_depth(3);
    b.succ_cap = 5_000;
    b
}

fn random_subset(rng: &mut dyn RngCore, vars: &[VarId]) -> VarSet {
    vars.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

/// Runs `trials` independent trials in parallel and merges them in trial
/// order, so the result depends only on the seed.
fn run<F>(name: &str, trials: usize, seed: u64, stream: u64, f: F) -> Check
where
    F: Fn(&mut ChaCha8Rng, &mut Check) + Sync,
{
    let parts: Vec<Check> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, stream, i);
            let mut c = Check::new(name);
            f(&mut rng, &mut c);
            c
        })
        .collect();
    let mut out = Check::new(name);
    for p in parts {
        out.merge(p);
    }
    out
}

fn interpolation(th: &dyn DynamicTheory, trials: usize, seed: u64) -> Check {
    let vars = th.state_vars();
    run("interpolation", trials, seed, 1, |rng, c| {
        let (mu, nu) = (th.sample_state(rng), th.sample_state(rng));
        let sel = VarSel::Only(random_subset(rng, &vars));
        let w = mu.interpolate(&nu, &sel);
        let other = match &sel {
            VarSel::Only(s) => VarSel::AllBut(s.clone()),
            VarSel::AllBut(s) => VarSel::Only(s.clone()),
        };
        if equal_on(&w, &mu, &sel) && equal_on(&w, &nu, &other) {
            c.pass();
        } else {
            c.fail(|| format!("mu={mu} nu={nu} selection={sel:?} gave {w}"));
        }
    })
}

fn atom_coincidence(th: &dyn DynamicTheory, trials: usize, seed: u64) -> Check {
    run("atom-fv", trials, seed, 2, |rng, c| {
        let a = th.sample_atom(rng);
        let (mu, nu) = (th.sample_state(rng), th.sample_state(rng));
        let w = mu.interpolate(&nu, &VarSel::Only(th.atom_fv(&a)));
        let (x, y) = (th.eval_atom(&mu, &a), th.eval_atom(&w, &a));
        if x == Truth::Unknown || y == Truth::Unknown {
            c.skipped += 1;
        } else if x == y {
            c.pass();
        } else {
            c.fail(|| format!("atom {} is {x} at {mu} but {y} at {w}", crate::print::atom(&a)));
        }
    })
}

fn formula_coincidence(th: &dyn DynamicTheory, trials: usize, seed: u64) -> Check {
    let vars = th.state_vars();
    let budget = audit_budget();
    run("formula-fv", trials, seed, 3, |rng, c| {
        let f = gen::formula(th, rng, 2, &vars);
        let (mu, nu) = (th.sample_state(rng), th.sample_state(rng));
        let w = mu.interpolate(&nu, &VarSel::Only(fv_syn(th, &f)));
        let (x, y) = (eval(th, &mu, &f, &budget), eval(th, &w, &f, &budget));
        if x == Truth::Unknown || y == Truth::Unknown {
            c.skipped += 1;
        } else if x == y {
            c.pass();
        } else {
            c.fail(|| format!("{} is {x} at {mu} but {y} at {w}", crate::print::formula(&f)));
        }
    })
}

fn extensionality(th: &dyn DynamicTheory, trials: usize, seed: u64) -> Check {
    let budget = audit_budget();
    run("extensionality", trials, seed, 4, |rng, c| {
        let p = gen::program(th, rng, 2);
        let mu = th.sample_state(rng);
        let copy = State::from_pairs(mu.support().map(|(k, v)| (k.name(), v)).collect::<Vec<_>>());
        let (a, b) = (th.successors(&mu, &p, &budget), th.successors(&copy, &p, &budget));
        if set_of(&a) == set_of(&b) {
            c.pass();
        } else {
            c.fail(|| format!("{} from {mu} is not a function of the state", crate::print::program(&p)));
        }
    })
}

fn set_of(s: &Successors) -> std::collections::BTreeSet<&State> {
    s.states.iter().collect()
}

fn program_coincidence(th: &dyn DynamicTheory, trials: usize, seed: u64) -> Check {
    let vars = th.state_vars();
    let budget = audit_budget();
    run("program-fv", trials, seed, 5, |rng, c| {
        let p = gen::program(th, rng, 2);
        let mut v = th.prog_fv(&p);
        v.extend(random_subset(rng, &vars));
        let (mu, nu) = (th.sample_state(rng), th.sample_state(rng));
        let sel = VarSel::Only(v);
        let w = mu.interpolate(&nu, &sel);
        let (from_mu, from_w) = (th.successors(&mu, &p, &budget), th.successors(&w, &p, &budget));
        if !from_mu.complete || !from_w.complete {
            c.skipped += 1;
            return;
        }
        let miss = from_mu.states.iter().find(|m| !from_w.states.iter().any(|n| equal_on(m, n, &sel)));
        match miss {
            None => c.pass(),
            Some(m) => c.fail(|| {
                format!(
                    "{} from {mu} reaches {m}; from {w} (equal on {sel:?}) no run matches it",
                    crate::print::program(&p)
                )
            }),
        }
    })
}

fn bounded_effect(th: &dyn DynamicTheory, trials: usize, seed: u64) -> Check {
    let budget = audit_budget();
    run("bounded-effect", trials, seed, 6, |rng, c| {
        let p = gen::program(th, rng, 2);
        let mu = th.sample_state(rng);
        let sel = VarSel::AllBut(th.prog_bv(&p));
        let succ = th.successors(&mu, &p, &budget);
        match succ.states.iter().find(|t| !equal_on(&mu, t, &sel)) {
            None => c.pass(),
            Some(t) => c.fail(|| {
                format!(
                    "{} from {mu} reaches {t}, changing a variable outside {:?}",
                    crate::print::program(&p),
                    th.prog_bv(&p)
                )
            }),
        }
    })
}

fn report(title: String, seed: u64, start: Instant, checks: Vec<Check>) -> AuditReport {
    AuditReport { title, seed, checks, elapsed: start.elapsed() }
}

/// Interpolation, atom coincidence, extensionality, program coincidence and
/// bounded effect.
pub fn check_theory_laws(th: &dyn DynamicTheory, trials: usize, seed: u64) -> AuditReport {
    let start = Instant::now();
    let checks = vec![
        interpolation(th, trials, seed),
        atom_coincidence(th, trials, seed),
        extensionality(th, trials, seed),
        program_coincidence(th, trials, seed),
        bounded_effect(th, trials, seed),
    ];
    report(format!("laws of {}", th.describe()), seed, start, checks)
}

/// Coincidence for atoms, formulas and programs.
pub fn test_coincidence(th: &dyn DynamicTheory, trials: usize, seed: u64) -> AuditReport {
    let start = Instant::now();
    let checks = vec![
        atom_coincidence(th, trials, seed),
        formula_coincidence(th, trials, seed),
        program_coincidence(th, trials, seed),
    ];
    report(format!("coincidence for {}", th.describe()), seed, start, checks)
}

pub fn test_bounded_effect(th: &dyn DynamicTheory, trials: usize, seed: u64) -> AuditReport {
    let start = Instant::now();
    report(format!("bounded effect for {}", th.describe()), seed, start, vec![bounded_effect(th, trials, seed)])
}

/// Audits the three soundness clauses of an inductive-expressivity witness
/// against its value map on random states over `vars`.
pub fn audit_inductive(th: &dyn DynamicTheory, ind: &InductiveExpressivity, vars: [&VarId; 2], trials: usize, seed: u64) -> Check {
    let budget = EvalBudget::default();
    let [v, w] = vars;
    let window = |rng: &mut ChaCha8Rng| -> Value { rng.gen_range(-30..=30) };
    run("inductive", trials, seed, 7, |rng, c| {
        let s = State::new().with(v, window(rng)).with(w, window(rng));
        let s = if rng.gen_bool(0.3) { s.with(w, s.get(v) + 1) } else { s };
        let (x, y) = (s.get(v), s.get(w));
        if !th.admits(v, x) || !th.admits(w, y) {
            c.skipped += 1;
            return;
        }
        let (nx, ny) = (ind.u2n(x), ind.u2n(y));
        let expect = [nx > 0, nx == ny, ny == nx + 1];
        let got = [ind.natgt0(v), ind.nateq(v, w), ind.natplus1(v, w)].map(|f| eval(th, &s, &f, &budget));
        if got.iter().zip(expect).all(|(g, e)| *g == Truth::from_bool(e)) {
            c.pass();
        } else {
            c.fail(|| format!("at {s}: expected {expect:?}, builders gave {got:?}"));
        }
    })
}

/// Deliberately wrong free or bound variable declarations, used as negative
/// controls for the audits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Atoms claim to read nothing.
    EmptyAtomFv,
    /// Programs claim to read nothing.
    EmptyProgFv,
    /// Assignments claim to write nothing.
    EmptyAssignBv,
}

pub struct FaultyTheory {
    id: TheoryId,
    base: TheoryHandle,
    fault: Fault,
}

pub fn faulty(base: TheoryHandle, fault: Fault) -> TheoryHandle {
    std::sync::Arc::new(FaultyTheory { id: TheoryId::fresh(), base, fault })
}

impl DynamicTheory for FaultyTheory {
    fn id(&self) -> TheoryId {
        self.id
    }

    fn describe(&self) -> String {
        format!("{:?}({})", self.fault, self.base.describe())
    }

    fn layer(&self) -> Layer {
        Layer::Base
    }

    fn has_var(&self, v: &VarId) -> bool {
        self.base.has_var(v)
    }

    fn check_atom(&self, a: &Atom) -> Result<(), SigError> {
        self.base.check_atom(a)
    }

    fn check_program(&self, p: &Program) -> Result<(), SigError> {
        self.base.check_program(p)
    }

    fn eval_atom(&self, s: &State, a: &Atom) -> Truth {
        self.base.eval_atom(s, a)
    }

    fn successors(&self, s: &State, p: &Program, budget: &EvalBudget) -> Successors {
        self.base.successors(s, p, budget)
    }

    fn atom_fv(&self, a: &Atom) -> VarSet {
        match self.fault {
            Fault::EmptyAtomFv => VarSet::new(),
            _ => self.base.atom_fv(a),
        }
    }

    fn prog_fv(&self, p: &Program) -> VarSet {
        match self.fault {
            Fault::EmptyProgFv => VarSet::new(),
            _ => self.base.prog_fv(p),
        }
    }

    fn prog_bv(&self, p: &Program) -> VarSet {
        match (self.fault, p) {
            (Fault::EmptyAssignBv, Program::Assign(..)) => VarSet::new(),
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
        self.base.sample_program(rng, depth)
    }
}
