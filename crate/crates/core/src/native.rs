//! Core extraction by conflict-sequence search over the finite-trace
//! transition system of Ψ.
//!
//! A state is a set of obligations, each a past-free NNF formula that must
//! hold from the current position on. One solver holds, for every obligation
//! `ψ` of the closure, `cur_ψ → xnf(ψ)` with `X χ`/`N χ` read as the
//! next-state membership `nxt_χ`, and the final-state variant (strong next
//! false, weak next true) under a guard.
//!
//! Frame `j` holds cubes of obligations: every state containing a cube of
//! frame `j` or higher is non-final and cannot reach a final state within
//! `j` steps. If frame `i` adds nothing beyond frame `i+1`, the states of
//! frame `i` are closed under successors and contain the initial state, so
//! Ψ ∧ A is unsatisfiable.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use crate::activation::{activate, restrict_core, Algorithm, UcResult};
use crate::boolexpr::{ExprArena, ExprId};
use crate::budget::Deadline;
use crate::formula::{Formula, Spec, ACTIVATION_PREFIX};
use crate::sat::{Encoder, Lit, SatStatus, Solver, SolverConfig};
use crate::semantics::Trace;
use crate::translate::{remove_past, to_nnf, xnf};

#[derive(Debug, Clone, Copy)]
pub struct NativeConfig {
    pub deadline: Deadline,
    pub max_level: usize,
    pub seed: u64,
}

impl Default for NativeConfig {
    fn default() -> Self {
        NativeConfig { deadline: Deadline::never(), max_level: 100_000, seed: 0 }
    }
}

/// A blocked cube: obligations plus the activation letters it relies on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cube {
    pub obligations: BTreeSet<Formula>,
    pub activations: BTreeSet<String>,
}

#[derive(Debug, Clone)]
pub struct NativeRun {
    pub result: UcResult,
    /// Cubes per frame level as left at termination.
    pub frames: Vec<Vec<Cube>>,
    /// Level `i` whose frame was found closed, when UNSAT.
    pub fixpoint: Option<usize>,
}

/// `cur_ψ`/`nxt_ψ` variables for the closure of obligations.
struct Encoding {
    closure: Vec<Formula>,
    index: HashMap<Formula, usize>,
    cur: Vec<Lit>,
    nxt: Vec<Lit>,
    letters: BTreeMap<String, Lit>,
    final_guard: Lit,
}

enum Mode {
    Step,
    Final,
}

struct ExprBuilder<'a> {
    arena: ExprArena,
    atoms: Vec<Lit>,
    atom_of: HashMap<Lit, u32>,
    enc: &'a mut Encoding,
    solver: &'a mut Solver,
    pending: &'a mut Vec<usize>,
}

impl ExprBuilder<'_> {
    fn atom(&mut self, l: Lit) -> ExprId {
        let id = *self.atom_of.entry(l).or_insert_with(|| {
            self.atoms.push(l);
            self.atoms.len() as u32 - 1
        });
        self.arena.atom(id)
    }

    fn obligation(&mut self, f: &Formula) -> usize {
        if let Some(&i) = self.enc.index.get(f) {
            return i;
        }
        let i = self.enc.closure.len();
        self.enc.closure.push(f.clone());
        self.enc.index.insert(f.clone(), i);
        self.enc.cur.push(self.solver.new_var().pos());
        self.enc.nxt.push(self.solver.new_var().pos());
        self.pending.push(i);
        i
    }

    fn letter(&mut self, v: &str) -> Lit {
        if let Some(&l) = self.enc.letters.get(v) {
            return l;
        }
        let l = self.solver.new_var().pos();
        self.enc.letters.insert(v.to_string(), l);
        l
    }

    fn build(&mut self, f: &Formula, mode: &Mode) -> ExprId {
        use Formula::*;
        match f {
            True => ExprArena::TRUE,
            False => ExprArena::FALSE,
            Var(v) => {
                let l = self.letter(v);
                self.atom(l)
            }
            Not(g) => {
                let e = self.build(g, mode);
                self.arena.not(e)
            }
            And(g, h) => {
                let (a, b) = (self.build(g, mode), self.build(h, mode));
                self.arena.and(a, b)
            }
            Or(g, h) => {
                let (a, b) = (self.build(g, mode), self.build(h, mode));
                self.arena.or(a, b)
            }
            Next(g) | WeakNext(g) => match mode {
                Mode::Step => {
                    let i = self.obligation(g);
                    let l = self.enc.nxt[i];
                    self.atom(l)
                }
                Mode::Final if matches!(f, Next(_)) => ExprArena::FALSE,
                Mode::Final => ExprArena::TRUE,
            },
            other => panic!("unexpected operator in neXt normal form: {other}"),
        }
    }
}

impl Encoding {
    fn new(solver: &mut Solver, initial: &[Formula]) -> Encoding {
        let final_guard = solver.new_var().pos();
        let mut enc = Encoding {
            closure: Vec::new(),
            index: HashMap::new(),
            cur: Vec::new(),
            nxt: Vec::new(),
            letters: BTreeMap::new(),
            final_guard,
        };
        let mut pending = Vec::new();
        let mut b = ExprBuilder {
            arena: ExprArena::new(),
            atoms: Vec::new(),
            atom_of: HashMap::new(),
            enc: &mut enc,
            solver,
            pending: &mut pending,
        };
        for f in initial {
            b.obligation(f);
        }
        while let Some(i) = b.pending.pop() {
            let x = xnf(&b.enc.closure[i]);
            let step = b.build(&x, &Mode::Step);
            let fin = b.build(&x, &Mode::Final);
            let cur = b.enc.cur[i];
            let guard = b.enc.final_guard;
            let atoms = b.atoms.clone();
            let mut e = Encoder::new(&b.arena, |a: u32| atoms[a as usize]);
            let s = e.lit(b.solver, step);
            b.solver.add_clause(&[!cur, s]);
            let f = e.lit(b.solver, fin);
            b.solver.add_clause(&[!guard, !cur, f]);
        }
        // guarded conjuncts only occur in the initial state
        for (i, f) in enc.closure.iter().enumerate() {
            if f.free_vars().iter().any(|v| v.starts_with(ACTIVATION_PREFIX)) {
                solver.add_clause(&[!enc.nxt[i]]);
            }
        }
        enc
    }
}

struct Node {
    state: BTreeSet<usize>,
    parent: Option<usize>,
    /// Letters of the parent's state on the edge into this node.
    edge_letters: BTreeMap<String, bool>,
    final_core: Option<(BTreeSet<usize>, BTreeSet<String>)>,
}

enum Query {
    Sat,
    Unsat(BTreeSet<usize>, BTreeSet<String>),
}

struct Search<'a> {
    solver: Solver,
    enc: Encoding,
    acts: &'a [String],
    levels: Vec<Lit>,
    frames: Vec<Vec<(BTreeSet<usize>, BTreeSet<String>)>>,
}

impl Search<'_> {
    fn level(&mut self, j: usize) -> Lit {
        while self.levels.len() <= j {
            let l = self.solver.new_var().pos();
            if let Some(&prev) = self.levels.last() {
                // frame j also enforces every cube of frame j+1 and above
                self.solver.add_clause(&[!prev, l]);
            }
            self.levels.push(l);
            self.frames.push(Vec::new());
        }
        self.levels[j]
    }

    fn act_lits(&self) -> Vec<(String, Lit)> {
        self.acts.iter().filter_map(|a| self.enc.letters.get(a).map(|&l| (a.clone(), l))).collect()
    }

    fn query(&mut self, state: &BTreeSet<usize>, extra: &[Lit], deadline: &Deadline) -> Result<Query, ()> {
        let acts = self.act_lits();
        let mut assumptions: Vec<Lit> = acts.iter().map(|(_, l)| *l).collect();
        assumptions.extend(state.iter().map(|&i| self.enc.cur[i]));
        assumptions.extend(extra);
        match self.solver.solve_limited(&assumptions, deadline).map_err(|_| ())? {
            SatStatus::Sat => Ok(Query::Sat),
            SatStatus::Unsat => {
                let failed: BTreeSet<Lit> = self.solver.failed_assumptions().iter().copied().collect();
                let obls = state.iter().copied().filter(|&i| failed.contains(&self.enc.cur[i])).collect();
                let used = acts.into_iter().filter(|(_, l)| failed.contains(l)).map(|(n, _)| n).collect();
                Ok(Query::Unsat(obls, used))
            }
        }
    }

    fn block(&mut self, j: usize, obls: BTreeSet<usize>, acts: BTreeSet<String>) {
        let lvl = self.level(j);
        let mut clause: Vec<Lit> = obls.iter().map(|&i| !self.enc.nxt[i]).collect();
        clause.push(!lvl);
        self.solver.add_clause(&clause);
        self.frames[j].push((obls, acts));
    }

    fn letters(&self) -> BTreeMap<String, bool> {
        self.enc.letters.iter().map(|(n, &l)| (n.clone(), self.solver.lit_value(l))).collect()
    }

    fn next_state(&self) -> BTreeSet<usize> {
        (0..self.enc.closure.len()).filter(|&i| self.solver.lit_value(self.enc.nxt[i])).collect()
    }

    /// Is some state of frame `i` outside frame `i+1`?
    fn frame_grows(&mut self, i: usize, deadline: &Deadline) -> Result<bool, ()> {
        let upper = self.level(i + 1);
        let guard = self.solver.new_var().pos();
        let mut some = vec![!guard];
        for (obls, _) in self.frames[i].clone() {
            let sel = self.solver.new_var().pos();
            for &o in &obls {
                self.solver.add_clause(&[!sel, self.enc.nxt[o]]);
            }
            some.push(sel);
        }
        self.solver.add_clause(&some);
        let r = self.solver.solve_limited(&[guard, upper], deadline).map_err(|_| ())?;
        self.solver.add_clause(&[!guard]);
        Ok(r == SatStatus::Sat)
    }
}

pub fn algorithm3_uc(s: &Spec, cfg: &NativeConfig) -> UcResult {
    algorithm3_run(s, cfg).result
}

pub fn algorithm3_run(s: &Spec, cfg: &NativeConfig) -> NativeRun {
    let start = Instant::now();
    let activated = match activate(s) {
        Ok(a) => a,
        Err(e) => {
            return NativeRun {
                result: UcResult::unknown(Algorithm::Native, e.to_string()).with_elapsed(start.elapsed()),
                frames: vec![],
                fixpoint: None,
            }
        }
    };
    let future = to_nnf(&remove_past(&activated.psi).conjoined());
    let initial: Vec<Formula> =
        future.top_level_conjuncts().into_iter().filter(|f| *f != Formula::True).collect();

    let mut solver = Solver::with_config(SolverConfig { seed: cfg.seed, ..SolverConfig::default() });
    let enc = Encoding::new(&mut solver, &initial);
    let acts = activated.activation_vars();
    let mut search = Search { solver, enc, acts: &acts, levels: Vec::new(), frames: Vec::new() };

    let s0: BTreeSet<usize> = initial.iter().map(|f| search.enc.index[f]).collect();
    let mut nodes = vec![Node { state: s0.clone(), parent: None, edge_letters: BTreeMap::new(), final_core: None }];

    let export = |search: &Search| -> Vec<Vec<Cube>> {
        search
            .frames
            .iter()
            .map(|fr| {
                fr.iter()
                    .map(|(o, a)| Cube {
                        obligations: o.iter().map(|&i| search.enc.closure[i].clone()).collect(),
                        activations: a.clone(),
                    })
                    .collect()
            })
            .collect()
    };
    let unknown = |search: &Search, reason: &str, k: usize| NativeRun {
        result: UcResult::unknown(Algorithm::Native, reason).with_k(k).with_elapsed(start.elapsed()),
        frames: export(search),
        fixpoint: None,
    };
    let fin = search.enc.final_guard;

    for top in 0..=cfg.max_level {
        search.level(top);
        let mut stack = vec![(0usize, top)];
        while let Some((n, j)) = stack.pop() {
            if cfg.deadline.expired() {
                return unknown(&search, "time limit exceeded", top);
            }
            let state = nodes[n].state.clone();
            if nodes[n].final_core.is_none() {
                match search.query(&state, &[fin], &cfg.deadline) {
                    Err(()) => return unknown(&search, "time limit exceeded", top),
                    Ok(Query::Sat) => {
                        let mut rows = vec![search.letters()];
                        let mut cur = n;
                        while let Some(p) = nodes[cur].parent {
                            rows.push(nodes[cur].edge_letters.clone());
                            cur = p;
                        }
                        rows.reverse();
                        let trace = Trace::from_maps(s.alphabet.names().to_vec(), &rows);
                        return NativeRun {
                            result: UcResult::sat(Algorithm::Native, Some(trace)).with_k(top).with_elapsed(start.elapsed()),
                            frames: export(&search),
                            fixpoint: None,
                        };
                    }
                    Ok(Query::Unsat(o, a)) => nodes[n].final_core = Some((o, a)),
                }
            }
            let (o0, a0) = nodes[n].final_core.clone().expect("final query done");
            if j == 0 {
                search.block(0, o0, a0);
                continue;
            }
            let lower = search.level(j - 1);
            match search.query(&state, &[!fin, lower], &cfg.deadline) {
                Err(()) => return unknown(&search, "time limit exceeded", top),
                Ok(Query::Sat) => {
                    let next = search.next_state();
                    let letters = search.letters();
                    nodes.push(Node { state: next, parent: Some(n), edge_letters: letters, final_core: None });
                    stack.push((n, j));
                    stack.push((nodes.len() - 1, j - 1));
                }
                Ok(Query::Unsat(o1, a1)) => {
                    search.block(j, &o0 | &o1, &a0 | &a1);
                }
            }
        }
        for i in 0..top {
            match search.frame_grows(i, &cfg.deadline) {
                Err(()) => return unknown(&search, "time limit exceeded", top),
                Ok(true) => {}
                Ok(false) => {
                    let core_acts: BTreeSet<String> = search.frames[i..]
                        .iter()
                        .flatten()
                        .filter(|(o, _)| o.is_subset(&s0))
                        .flat_map(|(_, a)| a.iter().cloned())
                        .collect();
                    let core = restrict_core(&activated, core_acts.iter().map(String::as_str));
                    return NativeRun {
                        result: UcResult::unsat(Algorithm::Native, core).with_k(top).with_elapsed(start.elapsed()),
                        frames: export(&search),
                        fixpoint: Some(i),
                    };
                }
            }
        }
    }
    unknown(&search, "level limit reached", cfg.max_level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::Status;
    use crate::parser::{parse_formula, parse_spec};
    use crate::semantics::eval;

    fn labels(ls: &[&str]) -> BTreeSet<String> {
        ls.iter().map(|s| s.to_string()).collect()
    }

    fn run(text: &str) -> UcResult {
        algorithm3_uc(&parse_spec(text, "t").unwrap(), &NativeConfig::default())
    }

    #[test]
    fn contradiction() {
        let r = run("a & !a");
        assert_eq!(r.status, Status::Unsat);
        assert_eq!(r.core, Some(labels(&["c1", "c2"])));
    }

    #[test]
    fn strong_next_witness() {
        let r = run("X a");
        assert_eq!(r.status, Status::Sat);
        let w = r.witness.unwrap();
        assert_eq!(w.len(), 2);
        assert!(eval(&parse_formula("X a").unwrap(), &w, 0).unwrap());
    }

    #[test]
    fn irrelevant_conjunct_left_out() {
        let r = run("(G a) & (F !a) & b");
        assert_eq!(r.status, Status::Unsat);
        assert_eq!(r.core, Some(labels(&["c1", "c2"])));
    }

    #[test]
    fn past_and_weak_next() {
        assert_eq!(run("(H !a) & (O a)").status, Status::Unsat);
        assert_eq!(run("X (Y a) & G a").status, Status::Sat);
        assert_eq!(run("G (a -> N b) & a").status, Status::Sat);
        assert_eq!(run("G (a -> X a) & F a").status, Status::Unsat);
    }
}
