//! Abstract syntax shared by every theory: variables, semiring terms, atoms,
//! programs and formulas over the five core connectives.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// A variable name. Inside a heterogeneous theory the world is the name's
/// prefix (`c.x`, `p.x`), so equality of names is equality of variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(Arc<str>);

impl VarId {
    pub fn new(name: &str) -> Self {
        VarId(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn has_prefix(&self, prefix: &str) -> bool {
        self.0.starts_with(prefix)
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VarId {
    fn from(s: &str) -> Self {
        VarId::new(s)
    }
}

pub type VarSet = BTreeSet<VarId>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Lit(i64),
    Var(VarId),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(VarId::new(name))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn vars_into(&self, out: &mut VarSet) {
        match self {
            Term::Lit(_) => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.vars_into(out);
                b.vars_into(out);
            }
        }
    }

    pub fn vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.vars_into(&mut out);
        out
    }

    pub fn mentions(&self, v: &VarId) -> bool {
        match self {
            Term::Lit(_) => false,
            Term::Var(w) => w == v,
            Term::Add(a, b) | Term::Mul(a, b) => a.mentions(v) || b.mentions(v),
        }
    }

    /// Evaluates with checked arithmetic; `None` on overflow or an unbound lookup.
    pub fn eval(&self, lookup: &dyn Fn(&VarId) -> i64) -> Option<i64> {
        match self {
            Term::Lit(n) => Some(*n),
            Term::Var(v) => Some(lookup(v)),
            Term::Add(a, b) => a.eval(lookup)?.checked_add(b.eval(lookup)?),
            Term::Mul(a, b) => a.eval(lookup)?.checked_mul(b.eval(lookup)?),
        }
    }

    pub fn subst(&self, v: &VarId, t: &Term) -> Term {
        match self {
            Term::Lit(n) => Term::Lit(*n),
            Term::Var(w) if w == v => t.clone(),
            Term::Var(w) => Term::Var(w.clone()),
            Term::Add(a, b) => Term::add(a.subst(v, t), b.subst(v, t)),
            Term::Mul(a, b) => Term::mul(a.subst(v, t), b.subst(v, t)),
        }
    }

    pub fn has_negative_literal(&self) -> bool {
        match self {
            Term::Lit(n) => *n < 0,
            Term::Var(_) => false,
            Term::Add(a, b) | Term::Mul(a, b) => a.has_negative_literal() || b.has_negative_literal(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CouplingKind {
    Eq,
    /// `scaled_eq(a, b, k)` holds iff `a = k * b`.
    ScaledEq(i64),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coupling {
    pub kind: CouplingKind,
    pub left: VarId,
    pub right: VarId,
}

impl Coupling {
    pub fn eq(left: &str, right: &str) -> Self {
        Coupling { kind: CouplingKind::Eq, left: left.into(), right: right.into() }
    }

    pub fn scaled_eq(left: &str, right: &str, k: i64) -> Self {
        Coupling { kind: CouplingKind::ScaledEq(k), left: left.into(), right: right.into() }
    }

    pub fn holds(&self, a: i64, b: i64) -> Option<bool> {
        match self.kind {
            CouplingKind::Eq => Some(a == b),
            CouplingKind::ScaledEq(k) => k.checked_mul(b).map(|kb| a == kb),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// Verum, available in every signature.
    True,
    Leq(Term, Term),
    /// Propositional letter of a Kripke model.
    Prop(Arc<str>),
    Coupling(Coupling),
}

impl Atom {
    pub fn leq(a: Term, b: Term) -> Atom {
        Atom::Leq(a, b)
    }

    pub fn prop(name: &str) -> Atom {
        Atom::Prop(Arc::from(name))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Program {
    Assign(VarId, Term),
    Atomic(Arc<str>),
    Havoc(VarId),
    Test(Box<Formula>),
    Seq(Box<Program>, Box<Program>),
    Choice(Box<Program>, Box<Program>),
    Star(Box<Program>),
}

impl Program {
    pub fn assign(v: &str, t: Term) -> Program {
        Program::Assign(VarId::new(v), t)
    }

    pub fn atomic(name: &str) -> Program {
        Program::Atomic(Arc::from(name))
    }

    pub fn havoc(v: &str) -> Program {
        Program::Havoc(VarId::new(v))
    }

    pub fn test(f: Formula) -> Program {
        Program::Test(Box::new(f))
    }

    pub fn seq(p: Program, q: Program) -> Program {
        Program::Seq(Box::new(p), Box::new(q))
    }

    pub fn choice(p: Program, q: Program) -> Program {
        Program::Choice(Box::new(p), Box::new(q))
    }

    pub fn star(p: Program) -> Program {
        Program::Star(Box::new(p))
    }

    /// `if F then p else q`, expanded into `?(F);p ++ ?(!F);q`.
    pub fn ite(f: Formula, p: Program, q: Program) -> Program {
        Program::choice(
            Program::seq(Program::test(f.clone()), p),
            Program::seq(Program::test(Formula::not(f)), q),
        )
    }

    pub fn size(&self) -> usize {
        match self {
            Program::Seq(p, q) | Program::Choice(p, q) => p.size() + q.size(),
            Program::Star(p) => p.size(),
            _ => 1,
        }
    }

    pub fn is_star_free(&self) -> bool {
        match self {
            Program::Star(_) => false,
            Program::Seq(p, q) | Program::Choice(p, q) => p.is_star_free() && q.is_star_free(),
            _ => true,
        }
    }

    /// Every variable name mentioned anywhere in the program text.
    pub fn names_into(&self, out: &mut VarSet) {
        match self {
            Program::Assign(v, t) => {
                out.insert(v.clone());
                t.vars_into(out);
            }
            Program::Atomic(_) => {}
            Program::Havoc(v) => {
                out.insert(v.clone());
            }
            Program::Test(f) => f.names_into(out),
            Program::Seq(p, q) | Program::Choice(p, q) => {
                p.names_into(out);
                q.names_into(out);
            }
            Program::Star(p) => p.names_into(out),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Forall(VarId, Box<Formula>),
    Box(Program, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn tt() -> Formula {
        Formula::Atom(Atom::True)
    }

    pub fn ff() -> Formula {
        Formula::not(Formula::tt())
    }

    pub fn leq(a: Term, b: Term) -> Formula {
        Formula::Atom(Atom::Leq(a, b))
    }

    /// `a = b` as the pair of inequalities.
    pub fn eq_terms(a: Term, b: Term) -> Formula {
        Formula::and(Formula::leq(a.clone(), b.clone()), Formula::leq(b, a))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn forall(v: VarId, f: Formula) -> Formula {
        Formula::Forall(v, Box::new(f))
    }

    pub fn exists(v: VarId, f: Formula) -> Formula {
        Formula::not(Formula::forall(v, Formula::not(f)))
    }

    pub fn boxed(p: Program, f: Formula) -> Formula {
        Formula::Box(p, Box::new(f))
    }

    pub fn diamond(p: Program, f: Formula) -> Formula {
        Formula::not(Formula::boxed(p, Formula::not(f)))
    }

    /// Conjunction of a list; the empty list gives `true`.
    pub fn conj(items: Vec<Formula>) -> Formula {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Formula::tt(),
            Some(last) => it.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    pub fn disj(items: Vec<Formula>) -> Formula {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Formula::ff(),
            Some(last) => it.fold(last, |acc, f| Formula::or(f, acc)),
        }
    }

    pub fn forall_many(vs: &[VarId], f: Formula) -> Formula {
        vs.iter().rev().fold(f, |acc, v| Formula::forall(v.clone(), acc))
    }

    pub fn exists_many(vs: &[VarId], f: Formula) -> Formula {
        vs.iter().rev().fold(f, |acc, v| Formula::exists(v.clone(), acc))
    }

    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::And(a, b) = inner.as_ref() {
                if let Formula::Not(b) = b.as_ref() {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn as_or(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::And(a, b) = inner.as_ref() {
                if let (Formula::Not(a), Formula::Not(b)) = (a.as_ref(), b.as_ref()) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn as_iff(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::And(l, r) = self {
            if let (Some((a, b)), Some((c, d))) = (l.as_implies(), r.as_implies()) {
                if a == d && b == c {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn as_exists(&self) -> Option<(&VarId, &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::Forall(v, body) = inner.as_ref() {
                if let Formula::Not(b) = body.as_ref() {
                    return Some((v, b));
                }
            }
        }
        None
    }

    pub fn as_diamond(&self) -> Option<(&Program, &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::Box(p, body) = inner.as_ref() {
                if let Formula::Not(b) = body.as_ref() {
                    return Some((p, b));
                }
            }
        }
        None
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::Not(inner) if matches!(inner.as_ref(), Formula::Atom(Atom::True)))
    }

    pub fn is_modality_free(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(f) | Formula::Forall(_, f) => f.is_modality_free(),
            Formula::And(a, b) => a.is_modality_free() && b.is_modality_free(),
            Formula::Box(..) => false,
        }
    }

    pub fn names_into(&self, out: &mut VarSet) {
        match self {
            Formula::Atom(a) => match a {
                Atom::True | Atom::Prop(_) => {}
                Atom::Leq(s, t) => {
                    s.vars_into(out);
                    t.vars_into(out);
                }
                Atom::Coupling(c) => {
                    out.insert(c.left.clone());
                    out.insert(c.right.clone());
                }
            },
            Formula::Not(f) => f.names_into(out),
            Formula::And(a, b) => {
                a.names_into(out);
                b.names_into(out);
            }
            Formula::Forall(v, f) => {
                out.insert(v.clone());
                f.names_into(out);
            }
            Formula::Box(p, f) => {
                p.names_into(out);
                f.names_into(out);
            }
        }
    }

    /// All variable names occurring in the text, bound or free.
    pub fn names(&self) -> VarSet {
        let mut out = VarSet::new();
        self.names_into(&mut out);
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Box(_, f) => 1 + f.depth(),
            Formula::And(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Self {
        Formula::Atom(a)
    }
}
