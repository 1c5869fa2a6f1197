//! Clause sets, DIMACS text and the Tseitin encoding of [`ExprArena`] terms.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use super::solver::{Lit, SatStatus, Solver, SolverConfig, Var};
use crate::boolexpr::{ExprArena, ExprId, Node};

/// Anything that accepts fresh variables and clauses.
pub trait ClauseSink {
    fn fresh_var(&mut self) -> Var;
    fn push_clause(&mut self, lits: &[Lit]);
}

impl ClauseSink for Solver {
    fn fresh_var(&mut self) -> Var {
        self.new_var()
    }

    fn push_clause(&mut self, lits: &[Lit]) {
        self.add_clause(lits);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
    /// Optional names for variables, e.g. `a@3` for letter `a` at step 3.
    pub names: BTreeMap<String, Var>,
}

impl ClauseSink for CnfFormula {
    fn fresh_var(&mut self) -> Var {
        self.num_vars += 1;
        Var(self.num_vars as u32 - 1)
    }

    fn push_clause(&mut self, lits: &[Lit]) {
        for l in lits {
            self.num_vars = self.num_vars.max(l.var().index() + 1);
        }
        self.clauses.push(lits.to_vec());
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {0}: malformed problem line")]
    Header(usize),
    #[error("line {line}: bad literal `{token}`")]
    Literal { line: usize, token: String },
}

impl CnfFormula {
    pub fn new() -> Self {
        CnfFormula::default()
    }

    pub fn named_var(&mut self, name: impl Into<String>) -> Var {
        let name = name.into();
        if let Some(&v) = self.names.get(&name) {
            return v;
        }
        let v = self.fresh_var();
        self.names.insert(name, v);
        v
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        for (name, v) in &self.names {
            let _ = writeln!(out, "c {} {}", v.index() + 1, name);
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{} ", l.to_dimacs());
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn from_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
        let mut f = CnfFormula::new();
        let mut current = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" {
                    return Err(DimacsError::Header(n + 1));
                }
                f.num_vars = parts[2].parse().map_err(|_| DimacsError::Header(n + 1))?;
                continue;
            }
            for tok in line.split_whitespace() {
                let d: i32 = tok.parse().map_err(|_| DimacsError::Literal { line: n + 1, token: tok.to_string() })?;
                if d == 0 {
                    f.push_clause(&current);
                    current.clear();
                } else {
                    current.push(Lit::from_dimacs(d));
                }
            }
        }
        if !current.is_empty() {
            f.push_clause(&current);
        }
        Ok(f)
    }

    /// Loads the clauses into a fresh solver.
    pub fn to_solver(&self, cfg: SolverConfig) -> Solver {
        let mut s = Solver::with_config(cfg);
        s.reserve_vars(self.num_vars);
        for c in &self.clauses {
            s.add_clause(c);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatOutcome {
    pub status: SatStatus,
    /// Values of variables `0..num_vars` when SAT.
    pub model: Option<Vec<bool>>,
    /// When UNSAT, assumptions that already conflict with the clauses.
    pub failed_assumptions: Option<Vec<Lit>>,
}

pub fn solve_assuming(f: &CnfFormula, assumptions: &[Lit]) -> SatOutcome {
    solve_assuming_with(f, assumptions, SolverConfig::default())
}

pub fn solve_assuming_with(f: &CnfFormula, assumptions: &[Lit], cfg: SolverConfig) -> SatOutcome {
    let mut s = f.to_solver(cfg);
    match s.solve(assumptions) {
        SatStatus::Sat => SatOutcome {
            status: SatStatus::Sat,
            model: Some((0..f.num_vars.max(s.num_vars())).map(|i| s.model_value(Var(i as u32))).collect()),
            failed_assumptions: None,
        },
        SatStatus::Unsat => {
            let mut failed = s.failed_assumptions().to_vec();
            failed.sort();
            SatOutcome { status: SatStatus::Unsat, model: None, failed_assumptions: Some(failed) }
        }
    }
}

/// Tseitin translation of arena terms into a clause sink. Atoms are mapped
/// to literals by `subst`; subterm literals are cached per encoder, so an
/// encoder must only be reused with the same substitution.
pub struct Encoder<'a, F: Fn(u32) -> Lit> {
    arena: &'a ExprArena,
    subst: F,
    cache: HashMap<ExprId, Lit>,
    truth: Option<Lit>,
}

impl<'a, F: Fn(u32) -> Lit> Encoder<'a, F> {
    pub fn new(arena: &'a ExprArena, subst: F) -> Self {
        Encoder { arena, subst, cache: HashMap::new(), truth: None }
    }

    fn truth<S: ClauseSink>(&mut self, sink: &mut S) -> Lit {
        *self.truth.get_or_insert_with(|| {
            let t = sink.fresh_var().pos();
            sink.push_clause(&[t]);
            t
        })
    }

    /// A literal equivalent to `id`.
    pub fn lit<S: ClauseSink>(&mut self, sink: &mut S, id: ExprId) -> Lit {
        if let Some(&l) = self.cache.get(&id) {
            return l;
        }
        let l = match self.arena.node(id) {
            Node::True => self.truth(sink),
            Node::False => !self.truth(sink),
            Node::Atom(a) => (self.subst)(a),
            Node::Not(x) => !self.lit(sink, x),
            Node::And(_, _) | Node::Or(_, _) => {
                let is_and = matches!(self.arena.node(id), Node::And(..));
                let mut kids = Vec::new();
                self.flatten(id, is_and, &mut kids);
                let ls: Vec<Lit> = kids.into_iter().map(|k| self.lit(sink, k)).collect();
                let t = sink.fresh_var().pos();
                // t <-> AND(ls)  or  t <-> OR(ls)
                let (t, ls) = if is_and { (t, ls) } else { (!t, ls.into_iter().map(|l| !l).collect()) };
                for &l in &ls {
                    sink.push_clause(&[!t, l]);
                }
                let mut big: Vec<Lit> = ls.iter().map(|&l| !l).collect();
                big.push(t);
                sink.push_clause(&big);
                if is_and {
                    t
                } else {
                    !t
                }
            }
            Node::Iff(x, y) => {
                let (a, b) = (self.lit(sink, x), self.lit(sink, y));
                let t = sink.fresh_var().pos();
                sink.push_clause(&[!t, !a, b]);
                sink.push_clause(&[!t, a, !b]);
                sink.push_clause(&[t, a, b]);
                sink.push_clause(&[t, !a, !b]);
                t
            }
        };
        self.cache.insert(id, l);
        l
    }

    fn flatten(&self, id: ExprId, is_and: bool, out: &mut Vec<ExprId>) {
        match self.arena.node(id) {
            Node::And(x, y) if is_and => {
                self.flatten(x, is_and, out);
                self.flatten(y, is_and, out);
            }
            Node::Or(x, y) if !is_and => {
                self.flatten(x, is_and, out);
                self.flatten(y, is_and, out);
            }
            _ => out.push(id),
        }
    }

    /// Asserts `id`: top-level conjunctions become separate constraints and
    /// a top-level disjunction becomes one clause.
    pub fn assert<S: ClauseSink>(&mut self, sink: &mut S, id: ExprId) {
        match self.arena.node(id) {
            Node::True => {}
            Node::False => sink.push_clause(&[]),
            Node::And(..) => {
                let mut kids = Vec::new();
                self.flatten(id, true, &mut kids);
                for k in kids {
                    self.assert(sink, k);
                }
            }
            Node::Or(..) => {
                let mut kids = Vec::new();
                self.flatten(id, false, &mut kids);
                let clause: Vec<Lit> = kids.into_iter().map(|k| self.lit(sink, k)).collect();
                sink.push_clause(&clause);
            }
            _ => {
                let l = self.lit(sink, id);
                sink.push_clause(&[l]);
            }
        }
    }
}

/// Equisatisfiable CNF for `root`; atom `k` becomes variable `k` (named `xk`).
pub fn tseitin(arena: &ExprArena, root: ExprId) -> CnfFormula {
    let atoms = arena.atoms(root);
    let mut f = CnfFormula::new();
    let top = atoms.iter().next_back().map_or(0, |&a| a as usize + 1);
    f.num_vars = top;
    for &a in &atoms {
        f.names.insert(format!("x{a}"), Var(a));
    }
    let mut enc = Encoder::new(arena, |a| Var(a).pos());
    enc.assert(&mut f, root);
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(f: &CnfFormula, fixed: &[Lit]) -> bool {
        let n = f.num_vars;
        (0u64..1 << n).any(|m| {
            let val = |l: &Lit| ((m >> l.var().index()) & 1 == 1) == l.is_positive();
            fixed.iter().all(val) && f.clauses.iter().all(|c| c.iter().any(val))
        })
    }

    #[test]
    fn tseitin_examples() {
        let mut a = ExprArena::new();
        let (x1, x2) = (a.atom(0), a.atom(1));
        let conj = a.and(x1, x2);
        let f = tseitin(&a, conj);
        assert_eq!(f.clauses, vec![vec![Var(0).pos()], vec![Var(1).pos()]]);
        let disj = a.or(x1, x2);
        assert_eq!(tseitin(&a, disj).clauses, vec![vec![Var(0).pos(), Var(1).pos()]]);

        let nand = a.not(conj);
        let f = tseitin(&a, nand);
        for m in 0..4u32 {
            let fixed = [Var(0).lit(m & 1 == 1), Var(1).lit(m & 2 == 2)];
            assert_eq!(brute(&f, &fixed), m != 3);
        }
    }

    #[test]
    fn dimacs_round_trip() {
        let f = CnfFormula::from_dimacs("c x\np cnf 3 2\n1 -2 0\n2 3 0\n").unwrap();
        assert_eq!(f.num_vars, 3);
        assert_eq!(f.clauses.len(), 2);
        let g = CnfFormula::from_dimacs(&f.to_dimacs()).unwrap();
        assert_eq!(f.clauses, g.clauses);
        assert!(CnfFormula::from_dimacs("p dnf 1 1").is_err());
    }

    #[test]
    fn outcome_shapes() {
        let f = CnfFormula::from_dimacs("p cnf 2 1\n1 2 0\n").unwrap();
        let o = solve_assuming(&f, &[Lit::from_dimacs(-1), Lit::from_dimacs(-2)]);
        assert_eq!(o.status, SatStatus::Unsat);
        assert_eq!(o.failed_assumptions.unwrap().len(), 2);
        let o = solve_assuming(&CnfFormula::new(), &[Lit::from_dimacs(1)]);
        assert_eq!(o.status, SatStatus::Sat);
        assert_eq!(o.model.unwrap(), vec![true]);
    }
}
