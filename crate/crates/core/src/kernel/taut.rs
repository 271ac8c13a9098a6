//! Propositional tautology check. Atoms, quantified and boxed subformulas
//! are opaque letters; `true` is the constant.

use std::collections::HashMap;

use crate::syntax::{Atom, Formula};

pub const MAX_LETTERS: usize = 20;

enum Prop {
    Const(bool),
    Letter(usize),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
}

fn compile<'a>(f: &'a Formula, letters: &mut HashMap<&'a Formula, usize>) -> Prop {
    match f {
        Formula::Atom(Atom::True) => Prop::Const(true),
        Formula::Not(g) => Prop::Not(Box::new(compile(g, letters))),
        Formula::And(a, b) => Prop::And(Box::new(compile(a, letters)), Box::new(compile(b, letters))),
        _ => {
            let n = letters.len();
            Prop::Letter(*letters.entry(f).or_insert(n))
        }
    }
}

fn eval(p: &Prop, bits: u32) -> bool {
    match p {
        Prop::Const(b) => *b,
        Prop::Letter(i) => bits >> i & 1 == 1,
        Prop::Not(q) => !eval(q, bits),
        Prop::And(a, b) => eval(a, bits) && eval(b, bits),
    }
}

/// `Ok(true)` iff `f` is a propositional tautology; `Err(n)` when it has
/// `n > MAX_LETTERS` letters.
pub fn is_tautology(f: &Formula) -> Result<bool, usize> {
    let mut letters = HashMap::new();
    let p = compile(f, &mut letters);
    let n = letters.len();
    if n > MAX_LETTERS {
        return Err(n);
    }
    Ok((0..1u32 << n).all(|bits| eval(&p, bits)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;

    fn taut(s: &str) -> bool {
        is_tautology(&parse_formula(s).unwrap()).unwrap()
    }

    #[test]
    fn contraposition_over_boxes() {
        assert!(taut("([a] q -> [b] r) -> (![b] r -> ![a] q)"));
        assert!(!taut("[a] q -> [b] r"));
        assert!(taut("true"));
        assert!(!taut("false"));
        assert!(taut("(forall x. x <= 0) | !(forall x. x <= 0)"));
    }

    #[test]
    fn letter_overflow() {
        let big: Vec<String> = (0..21).map(|i| format!("p{i}")).collect();
        let f = parse_formula(&big.join(" | ")).unwrap();
        assert_eq!(is_tautology(&f), Err(21));
    }
}
