//! Random generators for formulas, programs and finite Kripke models.

use rand::{Rng, RngCore};

use crate::instances::{KripkeModel, KripkeTheory};
use crate::syntax::{Formula, Program, VarId};
use crate::theory::{DynamicTheory, SigError, TheoryHandle};

/// A formula of depth at most `depth` over the theory's atoms and programs,
/// quantifying over `vars`.
pub fn formula(th: &dyn DynamicTheory, rng: &mut dyn RngCore, depth: u32, vars: &[VarId]) -> Formula {
    shaped(th, rng, depth, vars, true)
}

/// Like [`formula`] but without modalities.
pub fn fol_formula(th: &dyn DynamicTheory, rng: &mut dyn RngCore, depth: u32, vars: &[VarId]) -> Formula {
    shaped(th, rng, depth, vars, false)
}

fn shaped(th: &dyn DynamicTheory, rng: &mut dyn RngCore, depth: u32, vars: &[VarId], modal: bool) -> Formula {
    if depth == 0 || rng.gen_range(0..4) == 0 {
        return Formula::atom(th.sample_atom(rng));
    }
    let d = depth - 1;
    let pick = rng.gen_range(0..if modal { 8 } else { 6 });
    match pick {
        0 => Formula::not(shaped(th, rng, d, vars, modal)),
        1 => Formula::and(shaped(th, rng, d, vars, modal), shaped(th, rng, d, vars, modal)),
        2 => Formula::or(shaped(th, rng, d, vars, modal), shaped(th, rng, d, vars, modal)),
        3 => Formula::implies(shaped(th, rng, d, vars, modal), shaped(th, rng, d, vars, modal)),
        4 | 5 if !vars.is_empty() => {
            let v = vars[rng.gen_range(0..vars.len())].clone();
            let body = shaped(th, rng, d, vars, modal);
            if pick == 4 {
                Formula::forall(v, body)
            } else {
                Formula::exists(v, body)
            }
        }
        4 | 5 => Formula::not(shaped(th, rng, d, vars, modal)),
        6 => Formula::boxed(program(th, rng, 1), shaped(th, rng, d, vars, modal)),
        _ => Formula::diamond(program(th, rng, 1), shaped(th, rng, d, vars, modal)),
    }
}

pub fn program(th: &dyn DynamicTheory, rng: &mut dyn RngCore, depth: u32) -> Program {
    th.sample_program(rng, depth)
}

/// A random Kripke model with up to the given numbers of states, atomic
/// programs and atoms.
pub fn kripke_model(rng: &mut dyn RngCore, max_states: usize, max_progs: usize, max_atoms: usize) -> KripkeModel {
    let n = rng.gen_range(1..=max_states);
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut m = KripkeModel { states: names, ..Default::default() };
    for k in 0..rng.gen_range(1..=max_progs) {
        let density = rng.gen_range(0.0..0.7);
        let rel = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|_| rng.gen_bool(density))
            .collect();
        m.programs.push((["a", "b", "c"][k % 3].to_string(), rel));
    }
    for k in 0..rng.gen_range(1..=max_atoms) {
        let set = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        m.atoms.push((["q", "r", "s"][k % 3].to_string(), set));
    }
    m
}

pub fn kripke(rng: &mut dyn RngCore, max_states: usize, prefix: &str) -> Result<TheoryHandle, SigError> {
    let m = kripke_model(rng, max_states, 2, 3);
    Ok(KripkeTheory::with_prefix(m, prefix)?.handle())
}
