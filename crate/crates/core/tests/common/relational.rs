//! Finite-domain relational evaluation of modality-free formulas, and a
//! window-restricted transition relation for star-free programs. Both serve
//! as a reference for renditions, independent of the library evaluator.

use std::collections::{BTreeMap, BTreeSet};

use hdl_core::semantics::fv_syn;
use hdl_core::{DynamicTheory, EvalBudget, Formula, Program, State, Truth, VarId};

pub type Row = BTreeMap<VarId, i64>;

#[derive(Clone, Debug)]
pub struct Rel {
    pub vars: BTreeSet<VarId>,
    pub rows: BTreeSet<Row>,
}

pub struct Domain {
    pub lo: i64,
    pub hi: i64,
}

impl Domain {
    fn all(&self, vars: &BTreeSet<VarId>) -> BTreeSet<Row> {
        let mut out = BTreeSet::from([Row::new()]);
        for v in vars {
            out = out
                .into_iter()
                .flat_map(|r| {
                    (self.lo..=self.hi).map(move |x| {
                        let mut r = r.clone();
                        r.insert(v.clone(), x);
                        r
                    })
                })
                .collect();
        }
        out
    }

    fn pad(&self, rel: Rel, vars: &BTreeSet<VarId>) -> Rel {
        let extra: BTreeSet<VarId> = vars.difference(&rel.vars).cloned().collect();
        if extra.is_empty() {
            return rel;
        }
        let fill = self.all(&extra);
        let rows = rel
            .rows
            .iter()
            .flat_map(|r| {
                fill.iter().map(move |e| {
                    let mut r = r.clone();
                    r.extend(e.iter().map(|(k, v)| (k.clone(), *v)));
                    r
                })
            })
            .collect();
        Rel { vars: vars.clone(), rows }
    }

    fn join(&self, a: Rel, b: Rel) -> Rel {
        let shared: Vec<VarId> = a.vars.intersection(&b.vars).cloned().collect();
        let mut index: BTreeMap<Vec<i64>, Vec<&Row>> = BTreeMap::new();
        for r in &b.rows {
            index.entry(shared.iter().map(|v| r[v]).collect()).or_default().push(r);
        }
        let mut rows = BTreeSet::new();
        for r in &a.rows {
            let key: Vec<i64> = shared.iter().map(|v| r[v]).collect();
            for s in index.get(&key).into_iter().flatten() {
                let mut m = r.clone();
                m.extend(s.iter().map(|(k, v)| (k.clone(), *v)));
                rows.insert(m);
            }
        }
        Rel { vars: a.vars.union(&b.vars).cloned().collect(), rows }
    }

    /// Satisfying assignments of `f` over its free variables.
    pub fn eval(&self, th: &dyn DynamicTheory, f: &Formula) -> Rel {
        match f {
            Formula::Atom(a) => {
                let vars: BTreeSet<VarId> = fv_syn(th, f).into_iter().collect();
                let rows = self
                    .all(&vars)
                    .into_iter()
                    .filter(|r| th.eval_atom(&to_state(r), a) == Truth::True)
                    .collect();
                Rel { vars, rows }
            }
            Formula::And(a, b) => self.join(self.eval(th, a), self.eval(th, b)),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Not(g) => self.eval(th, g),
                Formula::Forall(v, body) => match body.as_ref() {
                    Formula::Not(g) => {
                        let r = self.eval(th, g);
                        let vars = r.vars.iter().filter(|w| *w != v).cloned().collect();
                        let rows = r.rows.into_iter().map(|mut row| {
                            row.remove(v);
                            row
                        });
                        Rel { vars, rows: rows.collect() }
                    }
                    _ => self.complement(th, inner),
                },
                Formula::And(a, b) => match (a.as_ref(), b.as_ref()) {
                    (Formula::Not(a), Formula::Not(b)) => {
                        let (a, b) = (self.eval(th, a), self.eval(th, b));
                        let vars: BTreeSet<VarId> = a.vars.union(&b.vars).cloned().collect();
                        let mut out = self.pad(a, &vars);
                        out.rows.extend(self.pad(b, &vars).rows);
                        out
                    }
                    _ => self.complement(th, inner),
                },
                _ => self.complement(th, inner),
            },
            Formula::Forall(v, body) => {
                let r = self.eval(th, body);
                let mut vars = r.vars.clone();
                vars.insert(v.clone());
                let r = self.pad(r, &vars);
                let mut counts: BTreeMap<Row, i64> = BTreeMap::new();
                for mut row in r.rows {
                    row.remove(v);
                    *counts.entry(row).or_default() += 1;
                }
                let width = self.hi - self.lo + 1;
                vars.remove(v);
                Rel { vars, rows: counts.into_iter().filter(|(_, n)| *n == width).map(|(r, _)| r).collect() }
            }
            Formula::Box(..) => panic!("modal formula in a rendition"),
        }
    }

    fn complement(&self, th: &dyn DynamicTheory, f: &Formula) -> Rel {
        let r = self.eval(th, f);
        assert!(r.vars.len() <= 4, "complement over {} variables", r.vars.len());
        let rows = self.all(&r.vars).difference(&r.rows).cloned().collect();
        Rel { vars: r.vars, rows }
    }
}

pub fn to_state(r: &Row) -> State {
    let mut s = State::new();
    for (k, v) in r {
        s.set(k, *v);
    }
    s
}

/// Runs of a star-free program whose every intermediate state stays in the
/// window, over the variables `xs`.
pub fn runs(th: &dyn DynamicTheory, p: &Program, xs: &[VarId], dom: &Domain) -> BTreeSet<(Row, Row)> {
    let mut b = EvalBudget::with_window(dom.lo, dom.hi);
    b.closed = true;
    let vars: BTreeSet<VarId> = xs.iter().cloned().collect();
    let inside = |r: &Row| r.values().all(|x| (dom.lo..=dom.hi).contains(x));
    let project = |s: &State| -> Row { xs.iter().map(|x| (x.clone(), s.get(x))).collect() };
    match p {
        Program::Seq(a, c) => {
            let left = runs(th, a, xs, dom);
            let right = runs(th, c, xs, dom);
            let mut by_start: BTreeMap<&Row, Vec<&Row>> = BTreeMap::new();
            for (m, n) in &right {
                by_start.entry(m).or_default().push(n);
            }
            left.iter()
                .flat_map(|(m, mid)| by_start.get(mid).into_iter().flatten().map(move |n| (m.clone(), (*n).clone())))
                .collect()
        }
        Program::Choice(a, c) => {
            let mut out = runs(th, a, xs, dom);
            out.extend(runs(th, c, xs, dom));
            out
        }
        _ => dom
            .all(&vars)
            .into_iter()
            .flat_map(|m| {
                let succ = th.successors(&to_state(&m), p, &b);
                assert!(succ.complete, "incomplete successors");
                succ.states.iter().map(project).filter(inside).map(|n| (m.clone(), n)).collect::<Vec<_>>()
            })
            .collect(),
    }
}

/// Pairs characterized by a rendition over `xs` and its twins `next`.
pub fn characterized(th: &dyn DynamicTheory, rendition: &Formula, xs: &[VarId], next: &[VarId], dom: &Domain) -> BTreeSet<(Row, Row)> {
    let mut want: BTreeSet<VarId> = xs.iter().cloned().collect();
    want.extend(next.iter().cloned());
    let rel = dom.pad(dom.eval(th, rendition), &want);
    rel.rows
        .into_iter()
        .map(|r| {
            let pre = xs.iter().map(|x| (x.clone(), r[x])).collect();
            let post = xs.iter().zip(next).map(|(x, n)| (x.clone(), r[n])).collect();
            (pre, post)
        })
        .collect()
}
