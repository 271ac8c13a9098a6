//! Finite-support states. Every variable not in the map holds the default 0,
//! so a state differs from the default on finitely many variables and equal
//! states are structurally equal.

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{VarId, VarSet};

pub type Value = i64;

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    vals: BTreeMap<VarId, Value>,
}

impl State {
    pub const DEFAULT: Value = 0;

    pub fn new() -> Self {
        State::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Value)>) -> Self {
        let mut s = State::new();
        for (k, v) in pairs {
            s.set(&VarId::new(k), v);
        }
        s
    }

    pub fn get(&self, v: &VarId) -> Value {
        self.vals.get(v).copied().unwrap_or(Self::DEFAULT)
    }

    pub fn set(&mut self, v: &VarId, val: Value) {
        if val == Self::DEFAULT {
            self.vals.remove(v);
        } else {
            self.vals.insert(v.clone(), val);
        }
    }

    pub fn with(&self, v: &VarId, val: Value) -> State {
        let mut s = self.clone();
        s.set(v, val);
        s
    }

    /// Variables whose value differs from the default.
    pub fn support(&self) -> impl Iterator<Item = (&VarId, Value)> {
        self.vals.iter().map(|(k, v)| (k, *v))
    }

    /// The part of the state whose variables carry `prefix`, i.e. one
    /// component of a product state.
    pub fn project(&self, prefix: &str) -> State {
        State {
            vals: self
                .vals
                .iter()
                .filter(|(k, _)| k.has_prefix(prefix))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    /// Joins two components with disjoint supports.
    pub fn merge(&self, other: &State) -> State {
        let mut s = self.clone();
        for (k, v) in other.support() {
            s.set(k, v);
        }
        s
    }

    /// The interpolant: agrees with `self` on `vars` and with `other` elsewhere.
    pub fn interpolate(&self, other: &State, vars: &VarSel) -> State {
        match vars {
            VarSel::Only(set) => {
                let mut s = other.clone();
                for v in set {
                    s.set(v, self.get(v));
                }
                s
            }
            VarSel::AllBut(set) => {
                let mut s = self.clone();
                for v in set {
                    s.set(v, other.get(v));
                }
                s
            }
        }
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.vals.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}↦{v}")?;
        }
        f.write_str("}")
    }
}

/// A finite set of variables or the complement of one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarSel {
    Only(VarSet),
    AllBut(VarSet),
}

impl VarSel {
    pub fn contains(&self, v: &VarId) -> bool {
        match self {
            VarSel::Only(s) => s.contains(v),
            VarSel::AllBut(s) => !s.contains(v),
        }
    }
}

/// `μ =_V ν`. For a cofinite selection only variables in either support or
/// outside the excluded set can differ, so the check stays finite.
pub fn equal_on(mu: &State, nu: &State, vars: &VarSel) -> bool {
    match vars {
        VarSel::Only(set) => set.iter().all(|v| mu.get(v) == nu.get(v)),
        VarSel::AllBut(excl) => mu
            .support()
            .map(|(k, _)| k)
            .chain(nu.support().map(|(k, _)| k))
            .filter(|k| !excl.contains(*k))
            .all(|k| mu.get(k) == nu.get(k)),
    }
}
