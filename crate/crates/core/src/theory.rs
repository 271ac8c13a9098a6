//! The abstract dynamic-theory interface, evaluation budgets and truth values.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::RngCore;

use crate::instances::InductiveExpressivity;
use crate::state::{State, Value};
use crate::syntax::{Atom, Formula, Program, VarId, VarSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TheoryId(u64);

impl TheoryId {
    pub fn fresh() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(1);
        TheoryId(NEXT.fetch_add(1, Ordering::Relaxed))
    }
}

impl fmt::Display for TheoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Kleene three-valued truth. `Unknown` only arises from truncated
/// enumeration or arithmetic overflow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }

    pub fn is_true(self) -> bool {
        self == Truth::True
    }

    pub fn is_false(self) -> bool {
        self == Truth::False
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EvalBudget {
    /// Default value window for quantifiers, havoc and state enumeration.
    pub window: (Value, Value),
    /// Overrides keyed by a variable name or a world prefix ending in `.`.
    pub var_windows: Vec<(String, (Value, Value))>,
    pub quant_cap: usize,
    pub star_depth: usize,
    pub succ_cap: usize,
    /// Treat windows as the whole carrier. Only for oracle experiments that
    /// compare two window-relative semantics against each other.
    pub closed: bool,
    pub enum_cap: u64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget {
            window: (-100, 100),
            var_windows: Vec::new(),
            quant_cap: 201,
            star_depth: 30,
            succ_cap: 200_000,
            closed: false,
            enum_cap: 1_000_000,
            samples: 4096,
            seed: 7,
        }
    }
}

impl EvalBudget {
    pub fn with_window(lo: Value, hi: Value) -> Self {
        EvalBudget { window: (lo, hi), ..EvalBudget::default() }
    }

    pub fn star_depth(mut self, d: usize) -> Self {
        self.star_depth = d;
        self
    }

    pub fn var_window(mut self, key: &str, lo: Value, hi: Value) -> Self {
        self.var_windows.push((key.to_string(), (lo, hi)));
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.window.0 > self.window.1 {
            return Err("empty value window".into());
        }
        if self.quant_cap == 0 || self.star_depth == 0 || self.succ_cap == 0 || self.enum_cap == 0 {
            return Err("budget caps must be at least 1".into());
        }
        Ok(())
    }

    /// The raw window for `v`: the longest matching override, else the default.
    pub fn raw_window(&self, v: &VarId) -> (Value, Value) {
        let mut best: Option<(usize, (Value, Value))> = None;
        for (key, w) in &self.var_windows {
            let hit = if key.ends_with('.') { v.has_prefix(key) } else { v.name() == key };
            if hit && best.is_none_or(|(len, _)| key.len() > len) {
                best = Some((key.len(), *w));
            }
        }
        best.map_or(self.window, |(_, w)| w)
    }

    /// The window for `v` cut down to at most `quant_cap` values around 0.
    pub fn window_for(&self, v: &VarId) -> (Value, Value) {
        let (lo, hi) = self.raw_window(v);
        let cap = self.quant_cap as i128;
        let size = hi as i128 - lo as i128 + 1;
        if size <= cap {
            return (lo, hi);
        }
        let centre = 0i128.clamp(lo as i128, hi as i128);
        let mut a = (centre - (cap - 1) / 2).max(lo as i128);
        let b = (a + cap - 1).min(hi as i128);
        a = b - cap + 1;
        (a as Value, b as Value)
    }
}

/// A finite range of candidate values; `exact` when it covers the carrier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Values {
    pub lo: Value,
    pub hi: Value,
    pub exact: bool,
}

impl Values {
    pub fn iter(&self) -> impl Iterator<Item = Value> {
        self.lo..=self.hi
    }

    pub fn len(&self) -> u64 {
        if self.hi < self.lo {
            0
        } else {
            (self.hi as i128 - self.lo as i128 + 1) as u64
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Successor states of one program run; `complete` is false when the set was
/// truncated by a window, a depth bound, a cap, or overflow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Successors {
    pub states: Vec<State>,
    pub complete: bool,
}

impl Successors {
    pub fn exact(states: Vec<State>) -> Self {
        Successors { states, complete: true }
    }

    pub fn none() -> Self {
        Successors { states: Vec::new(), complete: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct SigError(pub String);

impl SigError {
    pub fn new(msg: impl Into<String>) -> Self {
        SigError(msg.into())
    }
}

pub type TheoryHandle = Arc<dyn DynamicTheory>;

/// How a theory was built; the kernel reads this to validate lifting rules.
#[derive(Clone)]
pub enum Layer {
    Base,
    Havoc(TheoryHandle),
    Regular(TheoryHandle),
    Combined { worlds: [TheoryHandle; 2], prefixes: [String; 2] },
}

pub trait DynamicTheory: Send + Sync {
    fn id(&self) -> TheoryId;
    fn describe(&self) -> String;
    fn layer(&self) -> Layer {
        Layer::Base
    }

    fn has_var(&self, v: &VarId) -> bool;
    fn check_atom(&self, a: &Atom) -> Result<(), SigError>;
    fn check_program(&self, p: &Program) -> Result<(), SigError>;

    fn eval_atom(&self, s: &State, a: &Atom) -> Truth;
    fn successors(&self, s: &State, p: &Program, budget: &EvalBudget) -> Successors;

    fn atom_fv(&self, a: &Atom) -> VarSet;
    fn prog_fv(&self, p: &Program) -> VarSet;
    fn prog_bv(&self, p: &Program) -> VarSet;

    /// Whether `x` is an admissible value of `v`.
    fn admits(&self, v: &VarId, x: Value) -> bool;
    fn values(&self, v: &VarId, budget: &EvalBudget) -> Values;

    fn is_finite(&self) -> bool {
        false
    }
    /// The variables the sampler varies; on finite theories, all variables.
    fn state_vars(&self) -> Vec<VarId>;
    fn sample_state(&self, rng: &mut dyn RngCore) -> State;
    fn sample_atom(&self, rng: &mut dyn RngCore) -> Atom;
    fn sample_program(&self, rng: &mut dyn RngCore, depth: u32) -> Program;

    /// Variable-for-variable renaming on atoms and programs is syntactic.
    fn renamable(&self) -> bool {
        false
    }
    fn eq_formula(&self, _v: &VarId, _w: &VarId) -> Option<Formula> {
        None
    }
    /// `v := t` sets `v` to the value of the semiring term `t` and nothing else.
    fn term_assignment(&self, _v: &VarId) -> bool {
        false
    }
    /// The inductive-expressivity witness; `side` selects a world in
    /// heterogeneous theories and is ignored elsewhere.
    fn inductive(&self, _side: Option<usize>) -> Option<InductiveExpressivity> {
        None
    }
}

impl fmt::Debug for dyn DynamicTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.describe(), self.id())
    }
}
