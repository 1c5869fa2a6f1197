//! Symbolic tableau for LTL with past over infinite words.
//!
//! Every `X`-rooted elementary subformula (including the implicit `X(φ U ψ)`
//! of each until) owns a next-variable; every `Y`-rooted one (including the
//! implicit `Y(φ S ψ)` of each since) owns a history variable that starts
//! false and is updated forward. Letters are state variables as well.
//! Variable `i` is represented by atom `2i` (current) and `2i+1` (next).

use std::collections::{BTreeMap, HashMap};

use crate::boolexpr::{ExprArena, ExprId};
use crate::formula::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Letter,
    Next,
    Past,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVar {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone)]
pub struct TransitionSystem {
    pub arena: ExprArena,
    pub vars: Vec<StateVar>,
    pub init: ExprId,
    /// Conjuncts of the transition relation.
    pub trans: Vec<ExprId>,
    /// Büchi conditions; a fair path meets each infinitely often.
    pub fairness: Vec<ExprId>,
    /// Truth of the input formula at the current state.
    pub formula: ExprId,
    letters: BTreeMap<String, usize>,
}

pub fn cur(i: usize) -> u32 {
    2 * i as u32
}

pub fn nxt(i: usize) -> u32 {
    2 * i as u32 + 1
}

impl TransitionSystem {
    pub fn letter(&self, name: &str) -> Option<usize> {
        self.letters.get(name).copied()
    }

    pub fn letters(&self) -> impl Iterator<Item = (&str, usize)> {
        self.letters.iter().map(|(n, &i)| (n.as_str(), i))
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars_of_kind(&self, kind: VarKind) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| self.vars[i].kind == kind).collect()
    }

    /// Conjunction of all transition constraints.
    pub fn trans_conjoined(&mut self) -> ExprId {
        let parts = self.trans.clone();
        self.arena.and_all(parts)
    }
}

struct Builder {
    arena: ExprArena,
    vars: Vec<StateVar>,
    letters: BTreeMap<String, usize>,
    elementary: HashMap<Formula, usize>,
    memo: HashMap<Formula, ExprId>,
    trans: Vec<ExprId>,
    fairness: Vec<ExprId>,
    history: Vec<usize>,
}

impl Builder {
    fn new_var(&mut self, name: String, kind: VarKind) -> usize {
        self.vars.push(StateVar { name, kind });
        self.vars.len() - 1
    }

    fn letter(&mut self, name: &str) -> usize {
        if let Some(&i) = self.letters.get(name) {
            return i;
        }
        let i = self.new_var(name.to_string(), VarKind::Letter);
        self.letters.insert(name.to_string(), i);
        i
    }

    /// The variable for an elementary formula, and whether it is new.
    fn elementary(&mut self, key: Formula, kind: VarKind) -> (usize, bool) {
        if let Some(&i) = self.elementary.get(&key) {
            return (i, false);
        }
        let i = self.new_var(key.to_string(), kind);
        self.elementary.insert(key, i);
        (i, true)
    }

    fn primed(&mut self, e: ExprId) -> ExprId {
        self.arena.substitute(e, &|a| {
            debug_assert!(a % 2 == 0, "primed copy of a primed atom");
            a + 1
        })
    }

    fn sat(&mut self, f: &Formula) -> ExprId {
        if let Some(&e) = self.memo.get(f) {
            return e;
        }
        use Formula::*;
        let e = match f {
            True => ExprArena::TRUE,
            False => ExprArena::FALSE,
            Var(v) => {
                let i = self.letter(v);
                self.arena.atom(cur(i))
            }
            Not(g) => {
                let g = self.sat(g);
                self.arena.not(g)
            }
            And(g, h) => {
                let (g, h) = (self.sat(g), self.sat(h));
                self.arena.and(g, h)
            }
            Or(g, h) => {
                let (g, h) = (self.sat(g), self.sat(h));
                self.arena.or(g, h)
            }
            Implies(g, h) => {
                let (g, h) = (self.sat(g), self.sat(h));
                self.arena.implies(g, h)
            }
            Iff(g, h) => {
                let (g, h) = (self.sat(g), self.sat(h));
                self.arena.iff(g, h)
            }
            // over infinite words the weak and strong next coincide
            Next(g) | WeakNext(g) => {
                let (x, new) = self.elementary(Formula::next((**g).clone()), VarKind::Next);
                let e = self.arena.atom(cur(x));
                if new {
                    let sg = self.sat(g);
                    let sg = self.primed(sg);
                    let t = self.arena.iff(e, sg);
                    self.trans.push(t);
                }
                e
            }
            Until(g, h) => {
                let (x, new) = self.elementary(Formula::next(f.clone()), VarKind::Next);
                let xe = self.arena.atom(cur(x));
                let (sg, sh) = (self.sat(g), self.sat(h));
                let step = self.arena.and(sg, xe);
                let e = self.arena.or(sh, step);
                self.memo.insert(f.clone(), e);
                if new {
                    let ep = self.primed(e);
                    let t = self.arena.iff(xe, ep);
                    self.trans.push(t);
                    let ne = self.arena.not(e);
                    let fair = self.arena.or(ne, sh);
                    self.fairness.push(fair);
                }
                e
            }
            Yesterday(g) => {
                let (y, new) = self.elementary(f.clone(), VarKind::Past);
                let e = self.arena.atom(cur(y));
                if new {
                    self.history.push(y);
                    let sg = self.sat(g);
                    let yp = self.arena.atom(nxt(y));
                    let t = self.arena.iff(yp, sg);
                    self.trans.push(t);
                }
                e
            }
            Since(g, h) => {
                let (y, new) = self.elementary(Formula::yesterday(f.clone()), VarKind::Past);
                let ye = self.arena.atom(cur(y));
                let (sg, sh) = (self.sat(g), self.sat(h));
                let step = self.arena.and(sg, ye);
                let e = self.arena.or(sh, step);
                self.memo.insert(f.clone(), e);
                if new {
                    self.history.push(y);
                    let yp = self.arena.atom(nxt(y));
                    let t = self.arena.iff(yp, e);
                    self.trans.push(t);
                }
                e
            }
            Eventually(g) => self.sat(&Formula::until(True, (**g).clone())),
            Globally(g) => self.sat(&Formula::not(Formula::eventually(Formula::not((**g).clone())))),
            Release(g, h) => self.sat(&Formula::not(Formula::until(
                Formula::not((**g).clone()),
                Formula::not((**h).clone()),
            ))),
            WeakYesterday(g) => self.sat(&Formula::not(Formula::yesterday(Formula::not((**g).clone())))),
            Once(g) => self.sat(&Formula::since(True, (**g).clone())),
            Historically(g) => self.sat(&Formula::not(Formula::once(Formula::not((**g).clone())))),
            Trigger(g, h) => self.sat(&Formula::not(Formula::since(
                Formula::not((**g).clone()),
                Formula::not((**h).clone()),
            ))),
        };
        self.memo.insert(f.clone(), e);
        e
    }
}

/// Builds the tableau of `f`. `letters_first` fixes the index order of the
/// listed letters; any other letter is numbered by first occurrence.
pub fn build(f: &Formula, letters_first: &[String]) -> TransitionSystem {
    let mut b = Builder {
        arena: ExprArena::new(),
        vars: Vec::new(),
        letters: BTreeMap::new(),
        elementary: HashMap::new(),
        memo: HashMap::new(),
        trans: Vec::new(),
        fairness: Vec::new(),
        history: Vec::new(),
    };
    for l in letters_first {
        b.letter(l);
    }
    for v in f.vars_in_order() {
        b.letter(&v);
    }
    let formula = b.sat(f);
    let mut init = formula;
    for y in b.history.clone() {
        let ny = b.arena.atom(cur(y));
        let ny = b.arena.not(ny);
        init = b.arena.and(init, ny);
    }
    TransitionSystem {
        arena: b.arena,
        vars: b.vars,
        init,
        trans: b.trans,
        fairness: b.fairness,
        formula,
        letters: b.letters,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula_with, ParseOptions};

    fn p(s: &str) -> Formula {
        parse_formula_with(s, ParseOptions { allow_reserved: true }).unwrap()
    }

    #[test]
    fn variables_per_elementary_subformula() {
        let ts = build(&p("(a U b) & X a & Y b & (a S b) & G c"), &[]);
        assert_eq!(ts.vars_of_kind(VarKind::Letter).len(), 3);
        // X(a U b), X a, X(F !c)
        assert_eq!(ts.vars_of_kind(VarKind::Next).len(), 3);
        // Y b, Y(a S b)
        assert_eq!(ts.vars_of_kind(VarKind::Past).len(), 2);
        assert_eq!(ts.fairness.len(), 2);
        assert_eq!(ts.trans.len(), 5);
    }

    #[test]
    fn constants_and_order() {
        let ts = build(&Formula::False, &[]);
        assert_eq!(ts.init, ExprArena::FALSE);
        let ts = build(&p("b & a"), &["a".to_string()]);
        assert_eq!(ts.letter("a"), Some(0));
        assert_eq!(ts.letter("b"), Some(1));
    }

    #[test]
    fn history_starts_false() {
        let ts = build(&p("Y a"), &[]);
        let y = ts.vars_of_kind(VarKind::Past)[0];
        // init = y & !y
        assert_eq!(ts.init, ExprArena::FALSE);
        assert_eq!(ts.vars[y].kind, VarKind::Past);
    }
}
