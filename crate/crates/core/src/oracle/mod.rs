//! Brute-force semantic oracle: exhaustive validity on finite theories,
//! bounded counterexample search elsewhere, and randomized audits.
//!
//! A `None` from [`falsify`] on an infinite theory means "screened": no
//! counterexample inside the budget. It is never reported as validity.

pub mod gen;
pub mod laws;
pub mod schemas;

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hetero::{full_hetero, int_worlds};
use crate::instances::{kripke_theory, semiring_theory, Carrier, KripkeModel};
use crate::lifting::full;
use crate::semantics::{all_states, check_formula, eval, explain, live_vars, EvalError};
use crate::state::{State, Value};
use crate::syntax::{Coupling, Formula, VarId};
use crate::theory::{DynamicTheory, EvalBudget, TheoryHandle, Truth};
pub use schemas::validate_axiom_schemas;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterExample {
    pub state: State,
    /// Which instance or run falsified each subformula on the way down.
    pub trace: Vec<String>,
    pub budget: EvalBudget,
}

impl CounterExample {
    /// Re-evaluates `f` at the recorded state and budget.
    pub fn reproduces(&self, th: &dyn DynamicTheory, f: &Formula) -> bool {
        eval(th, &self.state, f, &self.budget) == Truth::False
    }
}

impl fmt::Display for CounterExample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "counterexample at {}", self.state)?;
        for step in &self.trace {
            writeln!(f, "  {step}")?;
        }
        write!(
            f,
            "  (window {}..{}, star depth {})",
            self.budget.window.0, self.budget.window.1, self.budget.star_depth
        )
    }
}

/// How a formula fared under the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Screening {
    pub counterexample: Option<CounterExample>,
    pub states: u64,
    /// Every state of the window (or of a finite theory) was visited.
    pub exhaustive: bool,
    /// States where evaluation stayed undecided.
    pub unknown: u64,
}

impl Screening {
    pub fn verdict(&self) -> &'static str {
        if self.counterexample.is_some() {
            "counterexample"
        } else {
            "screened"
        }
    }
}

pub fn falsify(th: &dyn DynamicTheory, f: &Formula, budget: &EvalBudget) -> Result<Option<CounterExample>, EvalError> {
    Ok(screen(th, f, budget)?.counterexample)
}

/// Searches for a state where `f` evaluates to false. Finite theories are
/// enumerated outright. Otherwise the variables that can influence `f` are
/// enumerated over their windows, pruning on the antecedent of a top-level
/// implication; past `enum_cap` states the search falls back to sampling.
pub fn screen(th: &dyn DynamicTheory, f: &Formula, budget: &EvalBudget) -> Result<Screening, EvalError> {
    budget.validate().map_err(EvalError::Budget)?;
    check_formula(th, f)?;
    if th.is_finite() {
        let states = all_states(th)?;
        let mut unknown = 0;
        for s in &states {
            match eval(th, s, f, budget) {
                Truth::False => return Ok(found(th, f, budget, s.clone(), states.len() as u64, true, unknown)),
                Truth::Unknown => unknown += 1,
                Truth::True => {}
            }
        }
        return Ok(Screening { counterexample: None, states: states.len() as u64, exhaustive: true, unknown });
    }
    let vars: Vec<VarId> = order_vars(th, f);
    let guards = antecedent_guards(th, f, &vars);
    let mut search = Search { th, f, budget, vars: &vars, guards: &guards, visited: 0, unknown: 0, hit: None };
    let complete = search.dfs(State::new(), 0);
    if let Some(s) = search.hit.take() {
        return Ok(found(th, f, budget, s, search.visited, false, search.unknown));
    }
    if complete {
        return Ok(Screening { counterexample: None, states: search.visited, exhaustive: true, unknown: search.unknown });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut states = search.visited;
    let mut unknown = search.unknown;
    for _ in 0..budget.samples {
        let mut s = State::new();
        for v in &vars {
            let vals = th.values(v, budget);
            if !vals.is_empty() {
                s.set(v, rng.gen_range(vals.lo..=vals.hi));
            }
        }
        states += 1;
        match eval(th, &s, f, budget) {
            Truth::False => return Ok(found(th, f, budget, s, states, false, unknown)),
            Truth::Unknown => unknown += 1,
            Truth::True => {}
        }
    }
    Ok(Screening { counterexample: None, states, exhaustive: false, unknown })
}

fn found(
    th: &dyn DynamicTheory,
    f: &Formula,
    budget: &EvalBudget,
    s: State,
    states: u64,
    exhaustive: bool,
    unknown: u64,
) -> Screening {
    let ce = shrink(th, f, CounterExample { trace: Vec::new(), state: s, budget: budget.clone() });
    Screening { counterexample: Some(ce), states, exhaustive, unknown }
}

/// Variables that can influence `f`, those constrained by the antecedent
/// first so that pruning happens early.
fn order_vars(th: &dyn DynamicTheory, f: &Formula) -> Vec<VarId> {
    let live = live_vars(th, f);
    let mut out: Vec<VarId> = Vec::new();
    if let Some((a, _)) = f.as_implies() {
        for c in conjuncts(a) {
            for v in live_vars(th, c) {
                if live.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        }
    }
    for v in live {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(a, b) => {
            let mut v = conjuncts(a);
            v.extend(conjuncts(b));
            v
        }
        other => vec![other],
    }
}

/// Antecedent conjuncts paired with the index of the last variable they read.
fn antecedent_guards<'a>(th: &dyn DynamicTheory, f: &'a Formula, vars: &[VarId]) -> Vec<(usize, &'a Formula)> {
    let Some((a, _)) = f.as_implies() else { return Vec::new() };
    conjuncts(a)
        .into_iter()
        .filter(|c| c.is_modality_free())
        .filter_map(|c| {
            let fv = live_vars(th, c);
            let idx = fv.iter().map(|v| vars.iter().position(|x| x == v)).collect::<Option<Vec<_>>>()?;
            Some((idx.into_iter().max().unwrap_or(0), c))
        })
        .collect()
}

struct Search<'a> {
    th: &'a dyn DynamicTheory,
    f: &'a Formula,
    budget: &'a EvalBudget,
    vars: &'a [VarId],
    guards: &'a [(usize, &'a Formula)],
    visited: u64,
    unknown: u64,
    hit: Option<State>,
}

impl Search<'_> {
    /// Returns false when the search was cut short by the enumeration cap.
    fn dfs(&mut self, s: State, k: usize) -> bool {
        if self.hit.is_some() {
            return true;
        }
        if k == self.vars.len() {
            self.visited += 1;
            match eval(self.th, &s, self.f, self.budget) {
                Truth::False => self.hit = Some(s),
                Truth::Unknown => self.unknown += 1,
                Truth::True => {}
            }
            return true;
        }
        let v = &self.vars[k];
        let vals = self.th.values(v, self.budget);
        for c in vals.iter() {
            if self.visited >= self.budget.enum_cap {
                return false;
            }
            let t = s.with(v, c);
            let pruned = self
                .guards
                .iter()
                .any(|(at, g)| *at == k && eval(self.th, &t, g, self.budget) == Truth::False);
            if !pruned && !self.dfs(t, k + 1) {
                return false;
            }
            if self.hit.is_some() {
                return true;
            }
        }
        true
    }
}

/// Greedily moves the state towards the default and shrinks the window and
/// star depth, keeping only changes under which `f` is still false.
pub fn shrink(th: &dyn DynamicTheory, f: &Formula, mut ce: CounterExample) -> CounterExample {
    let falsifies = |s: &State, b: &EvalBudget| eval(th, s, f, b) == Truth::False;
    let vars: Vec<VarId> = ce.state.support().map(|(v, _)| v.clone()).collect();
    for v in &vars {
        loop {
            let x = ce.state.get(v);
            let cands: Vec<Value> = [0, x / 2, x - x.signum()].into_iter().filter(|c| *c != x).collect();
            match cands.into_iter().map(|c| ce.state.with(v, c)).find(|t| falsifies(t, &ce.budget)) {
                Some(t) => ce.state = t,
                None => break,
            }
        }
    }
    loop {
        let mut b = ce.budget.clone();
        b.star_depth = (b.star_depth / 2).max(1);
        if b.star_depth == ce.budget.star_depth || !falsifies(&ce.state, &b) {
            break;
        }
        ce.budget = b;
    }
    loop {
        let (lo, hi) = ce.budget.window;
        let mut b = ce.budget.clone();
        b.window = (lo / 2, hi / 2);
        b.var_windows = b.var_windows.iter().map(|(k, (l, h))| (k.clone(), (l / 2, h / 2))).collect();
        if b.window == ce.budget.window || b.window.0 > 0 || b.window.1 < 0 || !falsifies(&ce.state, &b) {
            break;
        }
        ce.budget = b;
    }
    ce.trace = explain(th, &ce.state, f, &ce.budget, false);
    ce
}

/// One audited property: how many trials ran, how many failed, and the first
/// failure's witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub trials: usize,
    /// Trials decided exhaustively (finite theories).
    pub exhaustive: usize,
    pub failures: usize,
    pub skipped: usize,
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: &str) -> Self {
        Check { name: name.to_string(), trials: 0, exhaustive: 0, failures: 0, skipped: 0, witness: None }
    }

    pub fn pass(&mut self) {
        self.trials += 1;
    }

    pub fn fail(&mut self, witness: impl FnOnce() -> String) {
        self.trials += 1;
        self.failures += 1;
        if self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    pub fn merge(&mut self, other: Check) {
        self.trials += other.trials;
        self.exhaustive += other.exhaustive;
        self.failures += other.failures;
        self.skipped += other.skipped;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub title: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    /// Wall-clock time; ignored by equality so reports stay reproducible.
    pub elapsed: Duration,
}

impl PartialEq for AuditReport {
    fn eq(&self, other: &Self) -> bool {
        self.title == other.title && self.seed == other.seed && self.checks == other.checks
    }
}

impl AuditReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    /// Human-readable lines followed by a `key=value` summary block.
    pub fn render(&self) -> String {
        let mut out = format!("{} (seed {})\n", self.title, self.seed);
        for c in &self.checks {
            let status = if c.failures == 0 { "ok" } else { "FAIL" };
            out.push_str(&format!(
                "  {status:4} {:<22} trials={:<6} exhaustive={:<6} skipped={:<5} failures={}\n",
                c.name, c.trials, c.exhaustive, c.skipped, c.failures
            ));
            if let Some(w) = &c.witness {
                for line in w.lines() {
                    out.push_str(&format!("         {line}\n"));
                }
            }
        }
        out.push_str("--- summary ---\n");
        for c in &self.checks {
            out.push_str(&format!(
                "check={} trials={} failures={} seed={}\n",
                c.name, c.trials, c.failures, self.seed
            ));
        }
        out.push_str(&format!(
            "total_failures={} elapsed_ms={}\n",
            self.failures(),
            self.elapsed.as_millis()
        ));
        out
    }
}

/// The instance theories audited by [`audit`]: both semirings, a small Kripke
/// frame, their full lifts and a coupled two-world theory.
pub fn instance_corpus() -> Vec<(&'static str, TheoryHandle)> {
    let int = semiring_theory(Carrier::Int, (-100, 100)).expect("valid window");
    let nat = semiring_theory(Carrier::Nat, (0, 100)).expect("valid window");
    let model = KripkeModel::new(&["s0", "s1", "s2"])
        .program("a", &[("s0", "s1"), ("s1", "s2"), ("s2", "s2")])
        .program("b", &[("s0", "s0"), ("s1", "s0"), ("s0", "s2")])
        .atom("q", &["s1"])
        .atom("r", &["s0", "s2"]);
    let kripke = kripke_theory(model).expect("valid model");
    let (c, p) = int_worlds((-100, 100)).expect("valid window");
    let couplings = vec![Coupling::eq("c.x", "p.x"), Coupling::scaled_eq("c.y", "p.y", 10)];
    let hetero = full_hetero(c, p, ["c.", "p."], couplings).expect("valid combination");
    vec![
        ("int", int.clone()),
        ("nat", nat.clone()),
        ("kripke", kripke.clone()),
        ("full-int", full(int)),
        ("full-nat", full(nat)),
        ("full-kripke", full(kripke)),
        ("hetero", hetero),
    ]
}

/// The schema audit followed by the theory-law and coincidence suites on
/// every corpus theory and the counting-predicate audit of both semirings.
pub fn audit(trials: usize, seed: u64) -> AuditReport {
    let start = Instant::now();
    let mut checks = validate_axiom_schemas(trials, seed).checks;
    for (label, th) in instance_corpus() {
        let laws = laws::check_theory_laws(th.as_ref(), trials, seed);
        let fv = laws::test_coincidence(th.as_ref(), trials, seed);
        let formula_fv = fv.checks.into_iter().filter(|c| c.name == "formula-fv");
        for mut c in laws.checks.into_iter().chain(formula_fv) {
            c.name = format!("{label}/{}", c.name);
            checks.push(c);
        }
        if let Some(ind) = th.inductive(None) {
            let (v, w) = (VarId::new("x"), VarId::new("y"));
            let mut c = laws::audit_inductive(th.as_ref(), &ind, [&v, &w], trials, seed);
            c.name = format!("{label}/{}", c.name);
            checks.push(c);
        }
    }
    AuditReport { title: "audit".into(), seed, checks, elapsed: start.elapsed() }
}
