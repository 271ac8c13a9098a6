//! Concrete syntax printer. The output re-parses to the identical AST: derived
//! connectives are shown only where their expansion matches exactly.

use std::fmt;

use crate::syntax::{Atom, CouplingKind, Formula, Program, Term};

pub fn formula(f: &Formula) -> String {
    let mut out = String::new();
    fml(f, 0, &mut out);
    out
}

pub fn program(p: &Program) -> String {
    let mut out = String::new();
    prog(p, 0, &mut out);
    out
}

pub fn atom(a: &Atom) -> String {
    let mut out = String::new();
    atom_into(a, &mut out);
    out
}

pub fn term(t: &Term) -> String {
    let mut out = String::new();
    term_into(t, 0, &mut out);
    out
}

fn term_into(t: &Term, ctx: u8, out: &mut String) {
    match t {
        Term::Lit(n) if *n < 0 => out.push_str(&format!("({n})")),
        Term::Lit(n) => out.push_str(&n.to_string()),
        Term::Var(v) => out.push_str(v.name()),
        Term::Add(a, b) => paren(ctx > 1, out, |out| {
            term_into(a, 1, out);
            out.push_str(" + ");
            term_into(b, 2, out);
        }),
        Term::Mul(a, b) => paren(ctx > 2, out, |out| {
            term_into(a, 2, out);
            out.push_str(" * ");
            term_into(b, 3, out);
        }),
    }
}

fn atom_into(a: &Atom, out: &mut String) {
    match a {
        Atom::True => out.push_str("true"),
        Atom::Leq(l, r) => {
            term_into(l, 0, out);
            out.push_str(" <= ");
            term_into(r, 0, out);
        }
        Atom::Prop(n) => out.push_str(n),
        Atom::Coupling(c) => match c.kind {
            CouplingKind::Eq => out.push_str(&format!("eq({}, {})", c.left, c.right)),
            CouplingKind::ScaledEq(k) => out.push_str(&format!("scaled_eq({}, {}, {k})", c.left, c.right)),
        },
    }
}

fn paren(wrap: bool, out: &mut String, body: impl FnOnce(&mut String)) {
    if wrap {
        out.push('(');
    }
    body(out);
    if wrap {
        out.push(')');
    }
}

/// `a <= b & b <= a`, shown as `a = b`.
fn as_eq(f: &Formula) -> Option<(&Term, &Term)> {
    if let Formula::And(l, r) = f {
        if let (Formula::Atom(Atom::Leq(a, b)), Formula::Atom(Atom::Leq(c, d))) = (l.as_ref(), r.as_ref()) {
            if a == d && b == c {
                return Some((a, b));
            }
        }
    }
    None
}

// Levels: 0 iff and quantifiers, 1 implication, 2 disjunction,
// 3 conjunction, 4 prefix operators, 5 atoms.
fn fml(f: &Formula, ctx: u8, out: &mut String) {
    if let Some((a, b)) = as_eq(f) {
        term_into(a, 0, out);
        out.push_str(" = ");
        term_into(b, 0, out);
        return;
    }
    if let Some((a, b)) = f.as_iff() {
        return paren(ctx > 0, out, |out| {
            fml(a, 1, out);
            out.push_str(" <-> ");
            fml(b, 1, out);
        });
    }
    if f.is_false() {
        out.push_str("false");
        return;
    }
    if let Some((a, b)) = f.as_or() {
        return paren(ctx > 2, out, |out| {
            fml(a, 2, out);
            out.push_str(" | ");
            fml(b, 3, out);
        });
    }
    if let Some((a, b)) = f.as_implies() {
        return paren(ctx > 1, out, |out| {
            fml(a, 2, out);
            out.push_str(" -> ");
            fml(b, 1, out);
        });
    }
    if let Some((v, body)) = f.as_exists() {
        return paren(ctx > 0, out, |out| {
            out.push_str(&format!("exists {v}. "));
            fml(body, 0, out);
        });
    }
    if let Some((p, body)) = f.as_diamond() {
        out.push('<');
        prog(p, 0, out);
        out.push_str("> ");
        fml(body, 4, out);
        return;
    }
    match f {
        Formula::Atom(a) => atom_into(a, out),
        Formula::Not(g) => {
            out.push('!');
            fml(g, 4, out);
        }
        Formula::And(a, b) => paren(ctx > 3, out, |out| {
            fml(a, 3, out);
            out.push_str(" & ");
            fml(b, 4, out);
        }),
        Formula::Forall(v, body) => paren(ctx > 0, out, |out| {
            out.push_str(&format!("forall {v}. "));
            fml(body, 0, out);
        }),
        Formula::Box(p, body) => {
            out.push('[');
            prog(p, 0, out);
            out.push_str("] ");
            fml(body, 4, out);
        }
    }
}

// Levels: 0 choice, 1 sequence, 2 star operand.
fn prog(p: &Program, ctx: u8, out: &mut String) {
    match p {
        Program::Assign(v, t) => {
            out.push_str(&format!("{v} := "));
            term_into(t, 0, out);
        }
        Program::Atomic(n) => out.push_str(n),
        Program::Havoc(v) => out.push_str(&format!("{v} := *")),
        Program::Test(f) => {
            out.push_str("?(");
            fml(f, 0, out);
            out.push(')');
        }
        Program::Seq(a, b) => paren(ctx > 1, out, |out| {
            prog(a, 2, out);
            out.push_str("; ");
            prog(b, 1, out);
        }),
        Program::Choice(a, b) => paren(ctx > 0, out, |out| {
            prog(a, 1, out);
            out.push_str(" ++ ");
            prog(b, 0, out);
        }),
        Program::Star(a) => {
            let bare = matches!(a.as_ref(), Program::Atomic(_) | Program::Test(_) | Program::Star(_));
            paren(!bare, out, |out| prog(a, 2, out));
            out.push('*');
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&term(self))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&atom(self))
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&program(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::VarId;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn eq1_text() {
        let f = Formula::implies(
            Formula::leq(Term::Lit(0), v("v")),
            Formula::boxed(
                Program::assign("w", Term::add(v("v"), Term::Lit(1))),
                Formula::leq(Term::Lit(1), v("w")),
            ),
        );
        assert_eq!(formula(&f), "0 <= v -> [w := v + 1] 1 <= w");
    }

    #[test]
    fn quantifier_parens() {
        let q = Formula::forall(VarId::new("x"), Formula::leq(v("x"), v("y")));
        assert_eq!(formula(&Formula::and(q.clone(), Formula::tt())), "(forall x. x <= y) & true");
        assert_eq!(formula(&q), "forall x. x <= y");
    }

    #[test]
    fn star_of_assignment() {
        let p = Program::star(Program::assign("i", Term::add(v("i"), Term::Lit(-1))));
        assert_eq!(program(&p), "(i := i + (-1))*");
    }
}
