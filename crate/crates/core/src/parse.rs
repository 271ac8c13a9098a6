//! Parser for the concrete syntax produced by [`crate::print`].
//!
//! Formulas: `!` binds tightest, then `[p]`/`<p>`, `&`, `|`, `->` (right
//! associative), `<->`. `forall v. F` and `exists v. F` extend as far right as
//! possible. Programs: postfix `*`, then `;`, then `++`. Comparison macros
//! `=`, `<`, `>=`, `>` expand to `<=` at parse time.

use std::fmt;

use crate::semantics::check_formula;
use crate::syntax::{Atom, Coupling, CouplingKind, Formula, Program, Term, VarId};
use crate::theory::DynamicTheory;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
    pub src: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let col = self.src[..self.pos.min(self.src.len())].chars().count();
        write!(f, "syntax error at column {}: {}\n  {}\n  {}^", col + 1, self.msg, self.src, " ".repeat(col))
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReadError {
    #[error("{0}")]
    Syntax(#[from] ParseError),
    #[error("{0}")]
    Signature(#[from] crate::theory::SigError),
}

const KEYWORDS: &[&str] = &["forall", "exists", "true", "false", "if", "then", "else", "eq", "scaled_eq"];

const SYMBOLS: &[&str] = &[
    "<->", "->", "<=", ">=", ":=", "++", "<", ">", "=", "!", "&", "|", "[", "]", "(", ")", "?", ";", "*", "+", ",",
    ".", "-",
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i128),
    Sym(&'static str),
    Eof,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let err = |pos: usize, msg: String| ParseError { pos, msg, src: src.to_string() };
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            i += 1;
            while i < bytes.len() {
                let d = bytes[i];
                let dot_ok = d == b'.'
                    && bytes.get(i + 1).is_some_and(|n| n.is_ascii_alphabetic() || *n == b'_');
                if d.is_ascii_alphanumeric() || d == b'_' || d == b'\'' || dot_ok {
                    i += 1;
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: i128 = src[start..i].parse().map_err(|_| err(start, "integer literal too large".into()))?;
            out.push((Tok::Int(n), start));
            continue;
        }
        for s in SYMBOLS {
            if src[i..].starts_with(s) {
                out.push((Tok::Sym(s), i));
                i += s.len();
                continue 'outer;
            }
        }
        let ch = src[i..].chars().next().unwrap_or('?');
        return Err(err(i, format!("unexpected character '{ch}'")));
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    at: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> PResult<Self> {
        Ok(Parser { src, toks: lex(src)?, at: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError { pos: self.pos(), msg: msg.into(), src: self.src.to_string() })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected '{s}', found {}", self.describe()))
        }
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Int(n) => format!("'{n}'"),
            Tok::Sym(s) => format!("'{s}'"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn var(&mut self) -> PResult<VarId> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(VarId::new(&s))
            }
            _ => self.err(format!("expected a variable, found {}", self.describe())),
        }
    }

    fn end(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.err(format!("unexpected {}", self.describe()))
        }
    }

    // Terms.

    fn term(&mut self) -> PResult<Term> {
        let mut t = self.product()?;
        while self.eat("+") {
            t = Term::add(t, self.product()?);
        }
        Ok(t)
    }

    fn product(&mut self) -> PResult<Term> {
        let mut t = self.factor()?;
        while self.eat("*") {
            t = Term::mul(t, self.factor()?);
        }
        Ok(t)
    }

    fn literal(&mut self, neg: bool) -> PResult<Term> {
        let Tok::Int(n) = self.peek().clone() else {
            return self.err(format!("expected an integer, found {}", self.describe()));
        };
        let n = if neg { -n } else { n };
        match i64::try_from(n) {
            Ok(n) => {
                self.bump();
                Ok(Term::Lit(n))
            }
            Err(_) => self.err("integer literal out of range"),
        }
    }

    fn factor(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Int(_) => self.literal(false),
            Tok::Sym("-") => {
                self.bump();
                self.literal(true)
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.term()?;
                self.expect(")")?;
                Ok(t)
            }
            Tok::Ident(_) => Ok(Term::Var(self.var()?)),
            _ => self.err(format!("expected a term, found {}", self.describe())),
        }
    }

    // Formulas.

    fn formula(&mut self) -> PResult<Formula> {
        let mut f = self.implication()?;
        while self.eat("<->") {
            f = Formula::iff(f, self.implication()?);
        }
        Ok(f)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let f = self.disjunction()?;
        if self.eat("->") {
            return Ok(Formula::implies(f, self.implication()?));
        }
        Ok(f)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut f = self.conjunction()?;
        while self.eat("|") {
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while self.eat("&") {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat("!") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat("[") {
            let p = self.program()?;
            self.expect("]")?;
            return Ok(Formula::boxed(p, self.unary()?));
        }
        if self.eat("<") {
            let p = self.program()?;
            self.expect(">")?;
            return Ok(Formula::diamond(p, self.unary()?));
        }
        if self.is_kw("forall") || self.is_kw("exists") {
            let all = self.is_kw("forall");
            self.bump();
            let v = self.var()?;
            self.expect(".")?;
            let body = self.formula()?;
            return Ok(if all { Formula::forall(v, body) } else { Formula::exists(v, body) });
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Formula> {
        if self.is_kw("true") {
            self.bump();
            return Ok(Formula::tt());
        }
        if self.is_kw("false") {
            self.bump();
            return Ok(Formula::ff());
        }
        if self.is_kw("eq") || self.is_kw("scaled_eq") {
            return self.coupling();
        }
        let save = self.at;
        match self.comparison() {
            Ok(f) => Ok(f),
            Err(e1) if matches!(self.toks[save].0, Tok::Sym("(")) => {
                self.at = save + 1;
                match self.formula().and_then(|f| self.expect(")").map(|_| f)) {
                    Ok(f) => Ok(f),
                    Err(e2) => Err(if e2.pos >= e1.pos { e2 } else { e1 }),
                }
            }
            Err(e) => Err(e),
        }
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let lhs = self.term()?;
        let op = match self.peek() {
            Tok::Sym(s @ ("<=" | "<" | ">=" | ">" | "=")) => *s,
            _ => {
                if let Term::Var(v) = &lhs {
                    return Ok(Formula::atom(Atom::prop(v.name())));
                }
                return self.err(format!("expected a comparison, found {}", self.describe()));
            }
        };
        self.bump();
        let rhs = self.term()?;
        let one = Term::Lit(1);
        Ok(match op {
            "<=" => Formula::leq(lhs, rhs),
            "<" => Formula::leq(Term::add(lhs, one), rhs),
            ">=" => Formula::leq(rhs, lhs),
            ">" => Formula::leq(Term::add(rhs, one), lhs),
            _ => Formula::eq_terms(lhs, rhs),
        })
    }

    fn coupling(&mut self) -> PResult<Formula> {
        let scaled = self.is_kw("scaled_eq");
        self.bump();
        self.expect("(")?;
        let left = self.var()?;
        self.expect(",")?;
        let right = self.var()?;
        let kind = if scaled {
            self.expect(",")?;
            let neg = self.eat("-");
            let Term::Lit(k) = self.literal(neg)? else { unreachable!() };
            CouplingKind::ScaledEq(k)
        } else {
            CouplingKind::Eq
        };
        self.expect(")")?;
        Ok(Formula::atom(Atom::Coupling(Coupling { kind, left, right })))
    }

    // Programs.

    fn program(&mut self) -> PResult<Program> {
        let p = self.sequence()?;
        if self.eat("++") {
            return Ok(Program::choice(p, self.program()?));
        }
        Ok(p)
    }

    fn sequence(&mut self) -> PResult<Program> {
        let p = self.postfix()?;
        if self.eat(";") {
            return Ok(Program::seq(p, self.sequence()?));
        }
        Ok(p)
    }

    fn postfix(&mut self) -> PResult<Program> {
        let mut p = self.basic()?;
        while self.eat("*") {
            p = Program::star(p);
        }
        Ok(p)
    }

    fn basic(&mut self) -> PResult<Program> {
        if self.eat("(") {
            let p = self.program()?;
            self.expect(")")?;
            return Ok(p);
        }
        if self.eat("?") {
            self.expect("(")?;
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(Program::test(f));
        }
        if self.is_kw("if") {
            self.bump();
            let f = self.formula()?;
            if !self.is_kw("then") {
                return self.err(format!("expected 'then', found {}", self.describe()));
            }
            self.bump();
            let p = self.program()?;
            if !self.is_kw("else") {
                return self.err(format!("expected 'else', found {}", self.describe()));
            }
            self.bump();
            let q = self.postfix()?;
            return Ok(Program::ite(f, p, q));
        }
        if let Tok::Ident(_) = self.peek() {
            if *self.peek2() == Tok::Sym(":=") {
                let v = self.var()?;
                self.bump();
                if self.eat("*") {
                    return Ok(Program::Havoc(v));
                }
                return Ok(Program::Assign(v, self.term()?));
            }
            let v = self.var()?;
            return Ok(Program::atomic(v.name()));
        }
        self.err(format!("expected a program, found {}", self.describe()))
    }
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    p.end()?;
    Ok(f)
}

pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    let q = p.program()?;
    p.end()?;
    Ok(q)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.end()?;
    Ok(t)
}

pub fn parse_var(src: &str) -> Result<VarId, ParseError> {
    let mut p = Parser::new(src)?;
    let v = p.var()?;
    p.end()?;
    Ok(v)
}

/// Parses and checks every symbol against the theory's signature.
pub fn parse_formula_in(src: &str, th: &dyn DynamicTheory) -> Result<Formula, ReadError> {
    let f = parse_formula(src)?;
    check_formula(th, &f)?;
    Ok(f)
}

pub fn parse_program_in(src: &str, th: &dyn DynamicTheory) -> Result<Program, ReadError> {
    let p = parse_program(src)?;
    th.check_program(&p)?;
    Ok(p)
}
