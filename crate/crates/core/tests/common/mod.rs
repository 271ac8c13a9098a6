#![allow(dead_code)]

use hdl_core::instances::{kripke_theory, semiring_theory, Carrier, KripkeModel};
use hdl_core::lifting::full;
use hdl_core::parse::{parse_formula_in, parse_program_in};
use hdl_core::{Formula, Program, TheoryHandle};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn int() -> TheoryHandle {
    semiring_theory(Carrier::Int, (-100, 100)).unwrap()
}

pub fn nat() -> TheoryHandle {
    semiring_theory(Carrier::Nat, (0, 100)).unwrap()
}

pub fn int_window(lo: i64, hi: i64) -> TheoryHandle {
    semiring_theory(Carrier::Int, (lo, hi)).unwrap()
}

pub fn full_int() -> TheoryHandle {
    full(int())
}

/// s0 -a-> s1, q holds at s1.
pub fn two_state() -> TheoryHandle {
    kripke_theory(KripkeModel::new(&["s0", "s1"]).program("a", &[("s0", "s1")]).atom("q", &["s1"])).unwrap()
}

pub fn f(th: &TheoryHandle, text: &str) -> Formula {
    parse_formula_in(text, th.as_ref()).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn p(th: &TheoryHandle, text: &str) -> Program {
    parse_program_in(text, th.as_ref()).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub mod relational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
