//! Dynamic theories with a shared modal formula language: the havoc and
//! regular-closure lifts, two-world heterogeneous combination, an LCF-style
//! proof kernel and a brute-force semantic oracle.

pub mod derived;
pub mod hetero;
pub mod instances;
pub mod kernel;
pub mod lifting;
pub mod oracle;
pub mod parse;
pub mod print;
pub mod script;
pub mod semantics;
pub mod state;
pub mod syntax;
pub mod theory;

pub use semantics::{eval_formula, fv_syn, is_valid_exhaustive};
pub use state::{equal_on, State, Value, VarSel};
pub use syntax::{Atom, Coupling, CouplingKind, Formula, Program, Term, VarId, VarSet};
pub use theory::{DynamicTheory, EvalBudget, TheoryHandle, Truth};
