//! Line-oriented proof scripts. Every step is replayed through the kernel;
//! the final theorem's assumptions are then screened by the oracle.
//!
//! ```text
//! theory T = full(semiring(int))
//! def Inv = "0 <= i"
//! goal "${Inv} -> ..."
//! 1: assume "..."
//! 2: @W bytaut "..." 1
//! qed 2
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::derived;
use crate::hetero::{combine, combined_core, coupling_eq, coupling_scaled_eq, full_hetero};
use crate::instances::{Carrier, KripkeModel, KripkeTheory, SemiringTheory};
use crate::kernel::{self, KernelError, Reduce, Theorem};
use crate::lifting::{full, lift_havoc, lift_regular};
use crate::oracle::{screen, Screening};
use crate::parse::{parse_formula_in, parse_program_in, parse_term, parse_var};
use crate::syntax::{Coupling, Formula, Program, Term, VarId, VarSet};
use crate::theory::{DynamicTheory, EvalBudget, SigError, TheoryHandle};

/// Step commands and their argument shapes: `F` formula, `P` program, `T`
/// term, `v` variable, `i` step index, `k` integer, `[k]` optional integer,
/// `v*` and `i*` any number of the preceding kind.
pub const COMMANDS: &[(&str, &str, &str)] = &[
    ("assume", "F", "{F} ⊢ F for a modality-free F"),
    ("taut", "F", "propositional tautology"),
    ("mp", "i i", "from A -> B and A infer B"),
    ("gen", "i v", "from F infer forall v. F"),
    ("inst", "v v F", "(forall v. F) -> F[w/v]"),
    ("allK", "v F F", "(forall v. (A -> B)) -> (forall v. A) -> forall v. B"),
    ("vac", "v F", "A -> forall v. A, v not free in A"),
    ("eqrefl", "v", "v ≐ v"),
    ("axK", "P F F", "[p](A -> B) -> [p]A -> [p]B"),
    ("axV", "P F", "A -> [p]A, no free variable of A bound by p"),
    ("axB", "P v F", "(forall v. [p]A) <-> [p]forall v. A"),
    ("G", "i P", "from A infer [p]A"),
    ("havoc", "v F", "[v := *]A <-> forall v. A"),
    ("test", "F F", "[?A]B <-> (A -> B)"),
    ("seq", "P P F", "[p; q]A <-> [p][q]A"),
    ("choice", "P P F", "[p ++ q]A <-> [p]A & [q]A"),
    ("star", "P F", "[p*]A <-> A & [p][p*]A"),
    ("I", "P F", "[p*](A -> [p]A) -> A -> [p*]A"),
    ("C", "P F v v [k]", "loop convergence over counting variables v, w (world k)"),
    ("HR", "i", "carry a base theorem into its havoc lift"),
    ("RR", "i", "carry a base theorem into its regular closure"),
    ("HR0", "i", "carry a world-0 theorem into the heterogeneous theory"),
    ("HR1", "i", "carry a world-1 theorem into the heterogeneous theory"),
    ("assign", "v T F", "[v := t]A <-> A[t/v]"),
    ("finite", "F", "F, checked in every state of a finite theory"),
    ("M", "i P", "from A -> B infer [p]A -> [p]B"),
    ("MR", "i i", "from X -> [p]A and A -> B infer X -> [p]B"),
    ("boxAnd", "P F F", "[p]A & [p]B <-> [p](A & B)"),
    ("KDia", "P F F", "[p](A -> B) -> <p>A -> <p>B"),
    ("MPDia", "P F F v*", "<p>B & (forall vs. (B -> A)) -> <p>A"),
    ("PB", "P F F F v*", "pullback: (forall us. (C -> <p>X)) & (exists us. (C & forall vs. (X -> A))) -> <p>A"),
    ("ind", "i", "from A -> [p]A infer A -> [p*]A"),
    ("Fi", "k F P F F", "frame: (C -> [p]X) -> A & C -> [p](X & A)"),
    ("ghost", "v v F", "[v := *; ?(v ≐ w)]A -> A, v not free in A"),
    ("bytaut", "F i*", "F from the cited steps by propositional reasoning"),
    ("allmono", "i v", "from A -> B infer (forall v. A) -> forall v. B"),
];

/// The command table as Markdown.
pub fn command_table() -> String {
    let mut out = String::from("| command | arguments | meaning |\n|---|---|---|\n");
    for (name, sig, what) in COMMANDS {
        out.push_str(&format!("| `{name}` | `{sig}` | {} |\n", what.replace('|', "\\|")));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ScriptError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}, step {step}: {err}")]
    Kernel { line: usize, step: usize, err: KernelError },
    #[error("{0}")]
    Io(String),
}

impl ScriptError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ScriptError::Parse { line, .. } | ScriptError::Kernel { line, .. } => Some(*line),
            ScriptError::Io(_) => None,
        }
    }
}

/// A gamma member and how it fared under screening.
#[derive(Clone, Debug)]
pub struct GammaStatus {
    pub formula: Formula,
    pub screening: Screening,
}

impl GammaStatus {
    /// No counterexample, and at least one state decided it.
    pub fn screened(&self) -> bool {
        self.screening.counterexample.is_none() && self.screening.unknown < self.screening.states
    }
}

#[derive(Clone, Debug)]
pub struct Step {
    pub index: usize,
    pub line: usize,
    pub theory: String,
    pub handle: TheoryHandle,
    pub theorem: Theorem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    /// Every gamma member screened.
    Checked,
    /// A gamma member has a counterexample.
    Refuted,
    /// A gamma member could not be decided anywhere in the budget.
    Unscreened,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub goal: Formula,
    pub theorem: Theorem,
    pub steps: Vec<Step>,
    pub gamma: Vec<GammaStatus>,
    pub transcript: Vec<String>,
}

impl CheckResult {
    pub fn status(&self) -> Status {
        if self.gamma.iter().any(|g| g.screening.counterexample.is_some()) {
            Status::Refuted
        } else if self.gamma.iter().all(GammaStatus::screened) {
            Status::Checked
        } else {
            Status::Unscreened
        }
    }

    /// The transcript followed by the screening summary.
    pub fn render(&self) -> String {
        let mut out = self.transcript.join("\n");
        out.push_str(&format!("\nqed: {}\n", self.theorem));
        if self.gamma.is_empty() {
            out.push_str("gamma: empty\n");
        }
        for g in &self.gamma {
            let s = &g.screening;
            let label = if s.counterexample.is_some() {
                "counterexample"
            } else if g.screened() {
                "screened"
            } else {
                "unscreened"
            };
            out.push_str(&format!(
                "gamma {label:<14} {} ({} states{})\n",
                crate::print::formula(&g.formula),
                s.states,
                if s.exhaustive { ", whole window" } else { "" }
            ));
            if let Some(ce) = &s.counterexample {
                out.push_str(&format!("{ce}\n"));
            }
        }
        out.push_str(&format!("status: {}\n", self.status()));
        out
    }
}

pub fn run_script(path: &Path, budget: &EvalBudget) -> Result<CheckResult, ScriptError> {
    let src = std::fs::read_to_string(path).map_err(|e| ScriptError::Io(format!("{}: {e}", path.display())))?;
    run_source(&src, budget)
}

pub fn run_source(src: &str, budget: &EvalBudget) -> Result<CheckResult, ScriptError> {
    let mut r = Runner::default();
    for (n, raw) in src.lines().enumerate() {
        r.line = n + 1;
        r.line_text(raw)?;
    }
    r.finish(budget)
}

#[derive(Default)]
struct Runner {
    line: usize,
    theories: Vec<(String, TheoryHandle)>,
    defs: BTreeMap<String, String>,
    names: VarSet,
    goal: Option<(String, Formula)>,
    steps: Vec<Step>,
    qed: Option<usize>,
    transcript: Vec<String>,
}

// Tokens of a script line.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Str(String),
    Int(i64),
    At(String),
    Label(usize),
    Punct(char),
    Range,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(line: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            break;
        } else if c == '"' {
            let start = i + 1;
            let end = chars[start..].iter().position(|&d| d == '"').ok_or("unterminated string")? + start;
            out.push(Tok::Str(chars[start..end].iter().collect()));
            i = end + 1;
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n: i64 = text.parse().map_err(|_| format!("bad number {text}"))?;
            if chars.get(i) == Some(&':') && out.is_empty() && n >= 0 {
                out.push(Tok::Label(n as usize));
                i += 1;
            } else {
                out.push(Tok::Int(n));
            }
        } else if c == '.' && chars.get(i + 1) == Some(&'.') {
            out.push(Tok::Range);
            i += 2;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Tok::Punct('>'));
            i += 2;
        } else if c == '@' || c.is_ascii_alphabetic() || c == '_' {
            let at = c == '@';
            let start = if at { i + 1 } else { i };
            i = start;
            while i < chars.len() {
                let d = chars[i];
                let dot_ok = d == '.' && chars.get(i + 1).is_some_and(|n| n.is_ascii_alphabetic() || *n == '_');
                if is_word_char(d) || dot_ok {
                    i += 1;
                } else {
                    break;
                }
            }
            let w: String = chars[start..i].iter().collect();
            if w.is_empty() {
                return Err("empty theory name after @".into());
            }
            out.push(if at { Tok::At(w) } else { Tok::Word(w) });
        } else if "(){}[],:=".contains(c) {
            out.push(Tok::Punct(c));
            i += 1;
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

/// Cursor over a token list for theory declarations.
struct Decl<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl Decl<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn punct(&mut self, c: char) -> Result<(), String> {
        match self.next() {
            Some(Tok::Punct(d)) if d == c => Ok(()),
            other => Err(format!("expected '{c}', found {other:?}")),
        }
    }

    fn word(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Tok::Word(w)) => Ok(w),
            other => Err(format!("expected a name, found {other:?}")),
        }
    }

    fn keyword(&mut self, k: &str) -> Result<(), String> {
        match self.word()? {
            w if w == k => Ok(()),
            w => Err(format!("expected {k}, found {w}")),
        }
    }

    fn int(&mut self) -> Result<i64, String> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(n),
            other => Err(format!("expected a number, found {other:?}")),
        }
    }

    fn string(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Tok::Str(s)) => Ok(s),
            other => Err(format!("expected a string, found {other:?}")),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
}

fn sig(e: SigError) -> String {
    e.to_string()
}

impl Runner {
    fn perr(&self, msg: impl Into<String>) -> ScriptError {
        ScriptError::Parse { line: self.line, msg: msg.into() }
    }

    fn theory(&self, name: &str) -> Result<TheoryHandle, ScriptError> {
        self.theories
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t.clone())
            .ok_or_else(|| self.perr(format!("unknown theory {name}")))
    }

    fn default_theory(&self) -> Result<(String, TheoryHandle), ScriptError> {
        self.theories.first().cloned().ok_or_else(|| self.perr("no theory declared"))
    }

    fn expand(&self, s: &str) -> Result<String, ScriptError> {
        let mut out = String::new();
        let mut rest = s;
        while let Some(i) = rest.find("${") {
            out.push_str(&rest[..i]);
            let j = rest[i..].find('}').ok_or_else(|| self.perr("unterminated ${"))? + i;
            let name = &rest[i + 2..j];
            let val = self.defs.get(name).ok_or_else(|| self.perr(format!("undefined ${{{name}}}")))?;
            out.push_str(val);
            rest = &rest[j + 1..];
        }
        out.push_str(rest);
        Ok(out)
    }

    fn line_text(&mut self, raw: &str) -> Result<(), ScriptError> {
        let toks = tokenize(raw).map_err(|m| self.perr(m))?;
        let Some(first) = toks.first() else { return Ok(()) };
        match first {
            Tok::Word(w) if w == "theory" => self.theory_line(&toks[1..]),
            Tok::Word(w) if w == "def" => self.def_line(&toks[1..]),
            Tok::Word(w) if w == "fresh" => self.fresh_line(&toks[1..]),
            Tok::Word(w) if w == "goal" => self.goal_line(&toks[1..]),
            Tok::Word(w) if w == "qed" => match &toks[1..] {
                [Tok::Int(n)] if *n > 0 => {
                    self.qed = Some(*n as usize);
                    Ok(())
                }
                _ => Err(self.perr("usage: qed <step>")),
            },
            _ => self.step_line(&toks),
        }
    }

    fn theory_line(&mut self, toks: &[Tok]) -> Result<(), ScriptError> {
        let [Tok::Word(name), Tok::Punct('='), rest @ ..] = toks else {
            return Err(self.perr("usage: theory NAME = DECL"));
        };
        if self.theories.iter().any(|(n, _)| n == name) {
            return Err(self.perr(format!("theory {name} is already declared")));
        }
        let mut d = Decl { toks: rest, pos: 0 };
        let mut extra = Vec::new();
        let th = self.decl(&mut d, "", &mut extra).map_err(|m| self.perr(m))?;
        if d.pos != rest.len() {
            return Err(self.perr(format!("trailing input in declaration of {name}")));
        }
        self.theories.push((name.clone(), th));
        for (suffix, w) in extra {
            self.theories.push((format!("{name}.{suffix}"), w));
        }
        Ok(())
    }

    fn decl(&self, d: &mut Decl, prefix: &str, extra: &mut Vec<(String, TheoryHandle)>) -> Result<TheoryHandle, String> {
        let head = d.word()?;
        match head.as_str() {
            "semiring" => {
                d.punct('(')?;
                let carrier = match d.word()?.as_str() {
                    "int" => Carrier::Int,
                    "nat" => Carrier::Nat,
                    other => return Err(format!("unknown carrier {other}")),
                };
                let mut window = (-100, 100);
                if d.eat(',') {
                    let lo = d.int()?;
                    match d.next() {
                        Some(Tok::Range) => {}
                        other => return Err(format!("expected '..', found {other:?}")),
                    }
                    window = (lo, d.int()?);
                }
                d.punct(')')?;
                let mut th = SemiringTheory::new(carrier, window).map_err(sig)?;
                if !prefix.is_empty() {
                    th = th.with_prefix(prefix);
                }
                Ok(th.handle())
            }
            "kripke" => {
                d.punct('{')?;
                let mut m = KripkeModel::default();
                while !d.eat('}') {
                    match d.word()?.as_str() {
                        "states" => {
                            d.punct('{')?;
                            while !d.eat('}') {
                                m.states.push(d.word()?);
                            }
                        }
                        "prog" => {
                            let name = d.word()?;
                            d.punct('{')?;
                            let mut rel = Vec::new();
                            while !d.eat('}') {
                                let a = d.word()?;
                                d.punct('>')?;
                                let b = d.word()?;
                                d.eat(',');
                                rel.push((state(&m, &a)?, state(&m, &b)?));
                            }
                            m.programs.push((name, rel));
                        }
                        "atom" => {
                            let name = d.word()?;
                            d.punct('{')?;
                            let mut set = Vec::new();
                            while !d.eat('}') {
                                let s = d.word()?;
                                d.eat(',');
                                set.push(state(&m, &s)?);
                            }
                            m.atoms.push((name, set));
                        }
                        other => return Err(format!("unknown Kripke item {other}")),
                    }
                }
                Ok(KripkeTheory::with_prefix(m, prefix).map_err(sig)?.handle())
            }
            "havoc" | "regular" | "full" => {
                d.punct('(')?;
                let base = self.decl(d, prefix, extra)?;
                d.punct(')')?;
                Ok(match head.as_str() {
                    "havoc" => lift_havoc(base),
                    "regular" => lift_regular(base),
                    _ => full(base),
                })
            }
            "combine" | "full_hetero" => {
                d.punct('(')?;
                let mut worlds = Vec::new();
                let mut prefixes = Vec::new();
                for i in 0..2 {
                    if i == 1 {
                        d.punct(',')?;
                    }
                    d.keyword(&format!("world{i}"))?;
                    d.punct(':')?;
                    let save = d.pos;
                    // The prefix comes after the world declaration; find it first.
                    let mut depth = 0i32;
                    let mut j = d.pos;
                    while j < d.toks.len() {
                        match &d.toks[j] {
                            Tok::Punct('(' | '{' | '[') => depth += 1,
                            Tok::Punct(')' | '}' | ']') => depth -= 1,
                            Tok::Word(w) if w == "prefix" && depth == 0 => break,
                            _ => {}
                        }
                        j += 1;
                    }
                    let p = match d.toks.get(j + 1) {
                        Some(Tok::Str(s)) => s.clone(),
                        _ => return Err(format!("world{i} needs a prefix \"...\"")),
                    };
                    d.pos = save;
                    let w = self.decl(d, &p, extra)?;
                    d.keyword("prefix")?;
                    d.string()?;
                    worlds.push(w);
                    prefixes.push(p);
                }
                let mut couplings = Vec::new();
                if d.eat(',') {
                    d.keyword("couplings")?;
                    d.punct(':')?;
                    d.punct('[')?;
                    while !d.eat(']') {
                        couplings.push(coupling(d)?);
                        d.eat(',');
                    }
                }
                d.punct(')')?;
                let ps = [prefixes[0].as_str(), prefixes[1].as_str()];
                let (w0, w1) = (worlds[0].clone(), worlds[1].clone());
                extra.push(("world0".into(), w0.clone()));
                extra.push(("world1".into(), w1.clone()));
                if head == "combine" {
                    combine(w0, w1, ps, couplings).map_err(sig)
                } else {
                    full_hetero(w0, w1, ps, couplings).map_err(sig)
                }
            }
            name => {
                let th = self.theory(name).map_err(|e| e.to_string())?;
                Ok(th)
            }
        }
    }

    fn def_line(&mut self, toks: &[Tok]) -> Result<(), ScriptError> {
        let [Tok::Word(name), Tok::Punct('='), Tok::Str(body)] = toks else {
            return Err(self.perr("usage: def NAME = \"text\""));
        };
        let body = self.expand(body)?;
        self.defs.insert(name.clone(), body);
        Ok(())
    }

    fn fresh_line(&mut self, toks: &[Tok]) -> Result<(), ScriptError> {
        for t in toks {
            let Tok::Word(w) = t else { return Err(self.perr("usage: fresh v...")) };
            let v = VarId::new(w);
            if self.names.contains(&v) {
                return Err(self.perr(format!("{w} is not fresh")));
            }
            self.names.insert(v);
        }
        Ok(())
    }

    fn goal_line(&mut self, toks: &[Tok]) -> Result<(), ScriptError> {
        if self.goal.is_some() {
            return Err(self.perr("a script has exactly one goal"));
        }
        let (name, th, rest) = match toks {
            [Tok::At(t), rest @ ..] => (t.clone(), self.theory(t)?, rest),
            rest => {
                let (n, t) = self.default_theory()?;
                (n, t, rest)
            }
        };
        let [Tok::Str(text)] = rest else { return Err(self.perr("usage: goal [@T] \"F\"")) };
        let f = self.formula(text, th.as_ref())?;
        self.goal = Some((name, f));
        Ok(())
    }

    fn formula(&mut self, text: &str, th: &dyn DynamicTheory) -> Result<Formula, ScriptError> {
        let text = self.expand(text)?;
        let f = parse_formula_in(&text, th).map_err(|e| self.perr(e.to_string()))?;
        f.names_into(&mut self.names);
        Ok(f)
    }

    fn program(&mut self, text: &str, th: &dyn DynamicTheory) -> Result<Program, ScriptError> {
        let text = self.expand(text)?;
        let p = parse_program_in(&text, th).map_err(|e| self.perr(e.to_string()))?;
        p.names_into(&mut self.names);
        Ok(p)
    }

    fn step_line(&mut self, toks: &[Tok]) -> Result<(), ScriptError> {
        let mut rest = toks;
        let expected = self.steps.len() + 1;
        if let [Tok::Label(n), tail @ ..] = rest {
            if *n != expected {
                return Err(self.perr(format!("step label {n} out of order, expected {expected}")));
            }
            rest = tail;
        }
        let (tname, th) = match rest {
            [Tok::At(t), tail @ ..] => {
                rest = tail;
                (t.clone(), self.theory(t)?)
            }
            _ => self.default_theory()?,
        };
        let [Tok::Word(cmd), args @ ..] = rest else {
            return Err(self.perr("expected a step command"));
        };
        let Some((_, shape, _)) = COMMANDS.iter().find(|(n, _, _)| n == cmd) else {
            return Err(self.perr(format!("unknown command {cmd}")));
        };
        let args = self.args(shape, args, th.as_ref())?;
        let thm = self.exec(cmd, &args, &th).map_err(|err| ScriptError::Kernel { line: self.line, step: expected, err })?;
        let shown = if self.default_theory()?.0 == tname { String::new() } else { format!("@{tname} ") };
        self.transcript.push(format!("{expected:>3}. {shown}{cmd:<7} {thm}"));
        self.steps.push(Step { index: expected, line: self.line, theory: tname, handle: th, theorem: thm });
        Ok(())
    }

    fn args(&mut self, shape: &str, toks: &[Tok], th: &dyn DynamicTheory) -> Result<Vec<Arg>, ScriptError> {
        let mut out = Vec::new();
        let mut pos = 0;
        for kind in shape.split_whitespace() {
            let (kind, many, optional) = match kind {
                k if k.ends_with('*') => (&k[..k.len() - 1], true, true),
                k if k.starts_with('[') => (&k[1..k.len() - 1], false, true),
                k => (k, false, false),
            };
            loop {
                let Some(t) = toks.get(pos) else {
                    if optional {
                        break;
                    }
                    return Err(self.perr(format!("missing argument: expected {shape}")));
                };
                let arg = match (kind, t) {
                    ("F", Tok::Str(s)) => Arg::F(self.formula(s, th)?),
                    ("P", Tok::Str(s)) => Arg::P(self.program(s, th)?),
                    ("T", Tok::Str(s)) => {
                        let s = self.expand(s)?;
                        Arg::T(parse_term(&s).map_err(|e| self.perr(e.to_string()))?)
                    }
                    ("v", Tok::Word(w)) => {
                        let v = parse_var(w).map_err(|e| self.perr(e.to_string()))?;
                        self.names.insert(v.clone());
                        Arg::V(v)
                    }
                    ("i", Tok::Int(n)) => {
                        let n = *n;
                        if n < 1 || n as usize > self.steps.len() {
                            return Err(self.perr(format!("step {n} does not refer to an earlier step")));
                        }
                        Arg::I(n as usize)
                    }
                    ("k", Tok::Int(n)) => Arg::K(*n),
                    _ => return Err(self.perr(format!("argument {} does not match {shape}", pos + 1))),
                };
                out.push(arg);
                pos += 1;
                if !many {
                    break;
                }
            }
        }
        if pos != toks.len() {
            return Err(self.perr(format!("too many arguments: expected {shape}")));
        }
        Ok(out)
    }

    fn thm(&self, i: usize) -> &Theorem {
        &self.steps[i - 1].theorem
    }

    fn exec(&self, cmd: &str, a: &[Arg], th: &TheoryHandle) -> Result<Theorem, KernelError> {
        let t = th.as_ref();
        let f = |k: usize| a[k].f();
        let p = |k: usize| a[k].p();
        let v = |k: usize| a[k].v();
        let s = |k: usize| self.thm(a[k].i());
        let vars_from = |k: usize| a[k..].iter().map(|x| x.v().clone()).collect::<Vec<_>>();
        match cmd {
            "assume" => kernel::assume(t, f(0)),
            "taut" => kernel::taut(t, f(0)),
            "mp" => kernel::mp(t, s(0), s(1)),
            "gen" => kernel::gen(t, s(0), v(1)),
            "inst" => kernel::inst(t, v(0), v(1), f(2)),
            "allK" => kernel::all_k(t, v(0), f(1), f(2)),
            "vac" => kernel::vac(t, v(0), f(1)),
            "eqrefl" => kernel::eq_refl(t, v(0)),
            "axK" => kernel::ax_k(t, p(0), f(1), f(2)),
            "axV" => kernel::ax_v(t, p(0), f(1)),
            "axB" => kernel::ax_b(t, p(0), v(1), f(2)),
            "G" => kernel::rule_g(t, s(0), p(1)),
            "havoc" => kernel::ax_havoc(t, v(0), f(1)),
            "test" => kernel::ax_test(t, f(0), f(1)),
            "seq" => kernel::ax_seq(t, p(0), p(1), f(2)),
            "choice" => kernel::ax_choice(t, p(0), p(1), f(2)),
            "star" => kernel::ax_star(t, p(0), f(1)),
            "I" => kernel::ax_i(t, p(0), f(1)),
            "C" => {
                let side = a.get(4).map(|x| x.k() as usize);
                let ind = match side {
                    Some(i) => {
                        crate::hetero::hetero_inductive_instance(i, th).map_err(|e| KernelError::Capability(e.0))?
                    }
                    None => t
                        .inductive(None)
                        .ok_or_else(|| KernelError::Capability(format!("{} is not inductively expressive", t.describe())))?,
                };
                kernel::ax_c(t, &ind, p(0), f(1), v(2), v(3), side)
            }
            "HR" => kernel::reduce(Reduce::Havoc, s(0), t),
            "RR" => kernel::reduce(Reduce::Regular, s(0), t),
            "HR0" => kernel::reduce(Reduce::World0, s(0), t),
            "HR1" => kernel::reduce(Reduce::World1, s(0), t),
            "assign" => kernel::ax_assign(t, v(0), a[1].t(), f(2)),
            "finite" => kernel::finite_valid(t, f(0)),
            "M" => derived::m(t, s(0), p(1)),
            "MR" => derived::mr(t, s(0), s(1)),
            "boxAnd" => derived::box_and(t, p(0), f(1), f(2)),
            "KDia" => derived::k_dia(t, p(0), f(1), f(2)),
            "MPDia" => derived::mp_dia(t, p(0), f(1), f(2), &vars_from(3)),
            "PB" => derived::pb(t, p(0), f(1), f(2), f(3), &vars_from(4)),
            "ind" => derived::ind(t, s(0)),
            "Fi" => {
                let i = a[0].k();
                if combined_core(t).is_none() {
                    return Err(KernelError::Shape(format!("{} is not heterogeneous", t.describe())));
                }
                derived::fi(t, i.max(0) as usize, f(1), p(2), f(3), f(4))
            }
            "ghost" => derived::ghost(t, v(0), v(1), f(2)),
            "bytaut" => {
                let prem: Vec<&Theorem> = a[1..].iter().map(|x| self.thm(x.i())).collect();
                derived::by_taut(t, f(0), &prem)
            }
            "allmono" => derived::forall_mono(t, s(0), v(1)),
            other => Err(KernelError::Shape(format!("unknown command {other}"))),
        }
    }

    fn finish(self, budget: &EvalBudget) -> Result<CheckResult, ScriptError> {
        let line = self.line;
        let perr = |msg: &str| ScriptError::Parse { line, msg: msg.to_string() };
        let (gname, goal) = self.goal.clone().ok_or_else(|| perr("no goal"))?;
        let q = self.qed.ok_or_else(|| perr("no qed"))?;
        let step = self.steps.get(q.wrapping_sub(1)).ok_or_else(|| perr("qed names a missing step"))?;
        if step.theorem.conclusion() != &goal {
            return Err(ScriptError::Parse {
                line: step.line,
                msg: format!(
                    "qed step {q} proves {}\n  but the goal is {}",
                    crate::print::formula(step.theorem.conclusion()),
                    crate::print::formula(&goal)
                ),
            });
        }
        if step.theory != gname {
            return Err(perr(&format!("qed step {q} is in theory {}, the goal in {gname}", step.theory)));
        }
        let th = step.handle.clone();
        let gamma = step
            .theorem
            .gamma()
            .iter()
            .map(|g| {
                let screening = screen(th.as_ref(), g, budget).unwrap_or(Screening {
                    counterexample: None,
                    states: 0,
                    exhaustive: false,
                    unknown: 0,
                });
                GammaStatus { formula: g.clone(), screening }
            })
            .collect();
        Ok(CheckResult {
            goal,
            theorem: step.theorem.clone(),
            steps: self.steps,
            gamma,
            transcript: self.transcript,
        })
    }
}

fn state(m: &KripkeModel, name: &str) -> Result<usize, String> {
    m.state_index(name).ok_or_else(|| format!("undeclared state {name}"))
}

fn coupling(d: &mut Decl) -> Result<Coupling, String> {
    let kind = d.word()?;
    d.punct('(')?;
    let a = VarId::new(&d.word()?);
    d.punct(',')?;
    let b = VarId::new(&d.word()?);
    let c = match kind.as_str() {
        "eq" => coupling_eq(&a, &b),
        "scaled_eq" => {
            d.punct(',')?;
            let k = d.int()?;
            coupling_scaled_eq(&a, &b, k)
        }
        other => return Err(format!("unknown coupling {other}")),
    };
    d.punct(')')?;
    c.map_err(sig)
}

enum Arg {
    F(Formula),
    P(Program),
    T(Term),
    V(VarId),
    I(usize),
    K(i64),
}

// Accessors; `args` has already checked every position against the shape.
impl Arg {
    fn f(&self) -> &Formula {
        match self {
            Arg::F(f) => f,
            _ => unreachable!("argument shape checked"),
        }
    }

    fn p(&self) -> &Program {
        match self {
            Arg::P(p) => p,
            _ => unreachable!("argument shape checked"),
        }
    }

    fn t(&self) -> &Term {
        match self {
            Arg::T(t) => t,
            _ => unreachable!("argument shape checked"),
        }
    }

    fn v(&self) -> &VarId {
        match self {
            Arg::V(v) => v,
            _ => unreachable!("argument shape checked"),
        }
    }

    fn i(&self) -> usize {
        match self {
            Arg::I(i) => *i,
            _ => unreachable!("argument shape checked"),
        }
    }

    fn k(&self) -> i64 {
        match self {
            Arg::K(k) => *k,
            _ => unreachable!("argument shape checked"),
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Checked => "checked",
            Status::Refuted => "refuted",
            Status::Unscreened => "unscreened",
        })
    }
}

/// A shipped proof script and the budget it is screened at.
pub struct Demo {
    pub name: &'static str,
    pub file: &'static str,
    pub source: &'static str,
    /// Goal variables and the windows the conclusion is falsified over.
    budget: fn() -> EvalBudget,
}

impl Demo {
    pub fn budget(&self) -> EvalBudget {
        (self.budget)()
    }

    pub fn run(&self) -> Result<CheckResult, ScriptError> {
        run_source(self.source, &self.budget())
    }
}

pub const DEMOS: &[Demo] = &[
    Demo { name: "eq1", file: "eq1.hdl", source: include_str!("../examples/eq1.hdl"), budget: EvalBudget::default },
    Demo {
        name: "gauss",
        file: "gauss.hdl",
        source: include_str!("../examples/gauss.hdl"),
        budget: || EvalBudget::default().var_window("n", 1, 25).star_depth(30),
    },
    Demo {
        name: "countdown",
        file: "countdown.hdl",
        source: include_str!("../examples/countdown.hdl"),
        budget: || EvalBudget::default().var_window("i", 0, 20).star_depth(30),
    },
    Demo {
        name: "hetero-stop",
        file: "hetero_stop.hdl",
        source: include_str!("../examples/hetero_stop.hdl"),
        budget: || EvalBudget::with_window(-50, 50).star_depth(8),
    },
];

pub fn demo(name: &str) -> Option<&'static Demo> {
    DEMOS.iter().find(|d| d.name == name)
}

/// Reads a theory declaration in script syntax, e.g. `full(semiring(int))`.
pub fn parse_theory(decl: &str) -> Result<TheoryHandle, ScriptError> {
    let mut r = Runner { line: 1, ..Runner::default() };
    r.line_text(&format!("theory T = {decl}"))?;
    r.theory("T")
}
