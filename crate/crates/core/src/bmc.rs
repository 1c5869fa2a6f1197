//! SAT-based bounded model checking of the tableau of Ψ′.
//!
//! For every bound `k` the same incremental solver answers two questions,
//! each guarded by a fresh literal:
//!
//! * witness: is there a fair lasso `s0 … sk` with `s(k+1) = sl`?
//! * completeness: in the tableau augmented with a loop-start guess, a
//!   saved post-state and one "seen" flag per fairness condition, is there a
//!   loop-free path of `k+1` augmented states, or a closed fair loop within
//!   `k` steps? If not, no fair lasso exists at all, and the activation
//!   assumptions used in the refutation name an unsatisfiable core.
//!
//! The post-state after step `i` is the next-variables of step `i` and the
//! history variables of step `i+1`; it determines every continuation.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::activation::{activate, restrict_core, Algorithm, UcResult};
use crate::automaton::{build, TransitionSystem, VarKind};
use crate::budget::{Deadline, Timeout};
use crate::formula::{Formula, Spec, END_VAR};
use crate::sat::{Encoder, Lit, SatStatus, Solver, SolverConfig};
use crate::semantics::Trace;
use crate::translate::ltlf_to_ltl;

pub const DEFAULT_K_MAX: usize = 50;

#[derive(Debug, Clone, Copy)]
pub struct BmcConfig {
    pub k_max: usize,
    pub deadline: Deadline,
    pub seed: u64,
}

impl Default for BmcConfig {
    fn default() -> Self {
        BmcConfig { k_max: DEFAULT_K_MAX, deadline: Deadline::never(), seed: 0 }
    }
}

/// Outcome of a bounded check of an LTL formula under assumptions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BmcVerdict {
    /// Letter values of `s0 … s(k+1)` and the loop target.
    Sat { k: usize, letters: Vec<String>, states: Vec<Vec<bool>>, loop_start: usize },
    /// Assumption letters used in the refutation.
    Unsat { k: usize, failed: BTreeSet<String> },
    Unknown { k: usize, reason: String },
}

struct Augmented {
    /// Bits of the augmented state, per step.
    bits: Vec<Vec<Lit>>,
    in_loop: Vec<Lit>,
    saved: Vec<Vec<Lit>>,
    seen: Vec<Vec<Lit>>,
    goals: Vec<Lit>,
    /// `diff[j][i]` for `i < j`: augmented states `i` and `j` differ.
    diff: Vec<Vec<Lit>>,
}

/// The incremental unrolling of a tableau.
pub struct Unrolling {
    ts: TransitionSystem,
    solver: Solver,
    steps: Vec<Vec<Lit>>,
    trans_encoded: usize,
    fair: Vec<Vec<Lit>>,
    aug: Augmented,
    assumptions: Vec<(String, Lit)>,
    truth: Lit,
}

fn gate_and(s: &mut Solver, xs: &[Lit]) -> Lit {
    let t = s.new_var().pos();
    for &x in xs {
        s.add_clause(&[!t, x]);
    }
    let mut big: Vec<Lit> = xs.iter().map(|&x| !x).collect();
    big.push(t);
    s.add_clause(&big);
    t
}

fn gate_or(s: &mut Solver, xs: &[Lit]) -> Lit {
    let negs: Vec<Lit> = xs.iter().map(|&x| !x).collect();
    !gate_and(s, &negs)
}

fn gate_iff(s: &mut Solver, a: Lit, b: Lit) -> Lit {
    let t = s.new_var().pos();
    s.add_clause(&[!t, !a, b]);
    s.add_clause(&[!t, a, !b]);
    s.add_clause(&[t, a, b]);
    s.add_clause(&[t, !a, !b]);
    t
}

/// `t → (a ≠ b)`; enough for the distinctness constraints.
fn gate_differs(s: &mut Solver, a: Lit, b: Lit) -> Lit {
    let t = s.new_var().pos();
    s.add_clause(&[!t, a, b]);
    s.add_clause(&[!t, !a, !b]);
    t
}

impl Unrolling {
    /// `assumption_letters` are assumed true at step 0 in every query.
    pub fn new(ts: TransitionSystem, assumption_letters: &[String], seed: u64) -> Self {
        let mut solver = Solver::with_config(SolverConfig { seed, ..SolverConfig::default() });
        let truth = solver.new_var().pos();
        solver.add_clause(&[truth]);
        let mut u = Unrolling {
            ts,
            solver,
            steps: Vec::new(),
            trans_encoded: 0,
            fair: Vec::new(),
            aug: Augmented {
                bits: Vec::new(),
                in_loop: Vec::new(),
                saved: Vec::new(),
                seen: Vec::new(),
                goals: Vec::new(),
                diff: Vec::new(),
            },
            assumptions: Vec::new(),
            truth,
        };
        u.ensure_step(0);
        let init = u.ts.init;
        u.assert_at(0, init);
        for a in assumption_letters {
            let lit = match u.ts.letter(a) {
                Some(i) => u.steps[0][i],
                // letters absent from the formula are unconstrained
                None => u.solver.new_var().pos(),
            };
            u.assumptions.push((a.clone(), lit));
        }
        u
    }

    fn ensure_step(&mut self, i: usize) {
        while self.steps.len() <= i {
            let vars = (0..self.ts.num_vars()).map(|_| self.solver.new_var().pos()).collect();
            self.steps.push(vars);
        }
    }

    fn assert_at(&mut self, i: usize, e: crate::boolexpr::ExprId) {
        let steps = &self.steps;
        let mut enc = Encoder::new(&self.ts.arena, |a: u32| {
            let v = (a / 2) as usize;
            steps[i + (a % 2) as usize][v]
        });
        enc.assert(&mut self.solver, e);
    }

    fn lits_at(&mut self, i: usize, es: &[crate::boolexpr::ExprId]) -> Vec<Lit> {
        let steps = &self.steps;
        let mut enc = Encoder::new(&self.ts.arena, |a: u32| {
            let v = (a / 2) as usize;
            steps[i + (a % 2) as usize][v]
        });
        es.iter().map(|&e| enc.lit(&mut self.solver, e)).collect()
    }

    /// Encodes transitions up to and including `s(k) → s(k+1)`.
    fn ensure_trans(&mut self, k: usize) {
        self.ensure_step(k + 1);
        while self.trans_encoded <= k {
            let i = self.trans_encoded;
            let parts = self.ts.trans.clone();
            for t in parts {
                self.assert_at(i, t);
            }
            self.trans_encoded += 1;
        }
    }

    fn fairness_at(&mut self, i: usize) -> Vec<Lit> {
        while self.fair.len() <= i {
            let j = self.fair.len();
            self.ensure_step(j + 1);
            let fs = self.ts.fairness.clone();
            let lits = self.lits_at(j, &fs);
            self.fair.push(lits);
        }
        self.fair[i].clone()
    }

    fn post(&self, i: usize) -> Vec<Lit> {
        let mut out = Vec::new();
        for (v, sv) in self.ts.vars.iter().enumerate() {
            match sv.kind {
                VarKind::Next => out.push(self.steps[i][v]),
                VarKind::Past => out.push(self.steps[i + 1][v]),
                VarKind::Letter => {}
            }
        }
        out
    }

    fn ensure_augmented(&mut self, k: usize) {
        self.ensure_trans(k);
        while self.aug.bits.len() <= k {
            let i = self.aug.bits.len();
            let post = self.post(i);
            let fair = self.fairness_at(i);
            let start = self.solver.new_var().pos();
            let (in_loop, saved, seen) = if i == 0 {
                let saved = post.iter().map(|&p| gate_and(&mut self.solver, &[start, p])).collect();
                let seen = vec![!self.truth; fair.len()];
                (start, saved, seen)
            } else {
                let prev = self.aug.in_loop[i - 1];
                let in_loop = gate_or(&mut self.solver, &[prev, start]);
                let fresh = gate_and(&mut self.solver, &[!prev, start]);
                let mut saved = Vec::with_capacity(post.len());
                for (b, &p) in post.iter().enumerate() {
                    let keep = gate_and(&mut self.solver, &[prev, self.aug.saved[i - 1][b]]);
                    let take = gate_and(&mut self.solver, &[fresh, p]);
                    saved.push(gate_or(&mut self.solver, &[keep, take]));
                }
                let mut seen = Vec::with_capacity(fair.len());
                for (m, &f) in fair.iter().enumerate() {
                    let acc = gate_or(&mut self.solver, &[self.aug.seen[i - 1][m], f]);
                    seen.push(gate_and(&mut self.solver, &[prev, acc]));
                }
                // closing the loop at step i
                let goal = self.solver.new_var().pos();
                self.solver.add_clause(&[!goal, prev]);
                for (b, &p) in post.iter().enumerate() {
                    let same = gate_iff(&mut self.solver, p, self.aug.saved[i - 1][b]);
                    self.solver.add_clause(&[!goal, same]);
                }
                for &s in &seen {
                    self.solver.add_clause(&[!goal, s]);
                }
                self.aug.goals.push(goal);
                (in_loop, saved, seen)
            };
            let mut bits = post.clone();
            bits.push(in_loop);
            bits.extend(&saved);
            bits.extend(&seen);
            let mut diffs = Vec::with_capacity(i);
            for j in 0..i {
                let other = self.aug.bits[j].clone();
                let ds: Vec<Lit> =
                    bits.iter().zip(&other).map(|(&a, &b)| gate_differs(&mut self.solver, a, b)).collect();
                let d = self.solver.new_var().pos();
                let mut clause = ds;
                clause.push(!d);
                self.solver.add_clause(&clause);
                diffs.push(d);
            }
            self.aug.bits.push(bits);
            self.aug.in_loop.push(in_loop);
            self.aug.saved.push(saved);
            self.aug.seen.push(seen);
            self.aug.diff.push(diffs);
        }
    }

    /// Guard literal of the witness query at bound `k`.
    pub fn enc_witness(&mut self, k: usize) -> Lit {
        self.ensure_trans(k);
        let guard = self.solver.new_var().pos();
        let selectors: Vec<Lit> = (0..=k).map(|_| self.solver.new_var().pos()).collect();
        let mut at_least = selectors.clone();
        at_least.push(!guard);
        self.solver.add_clause(&at_least);
        for a in 0..selectors.len() {
            for b in a + 1..selectors.len() {
                self.solver.add_clause(&[!selectors[a], !selectors[b]]);
            }
        }
        let nf = self.ts.fairness.len();
        let fair: Vec<Vec<Lit>> = (0..=k).map(|i| self.fairness_at(i)).collect();
        for (l, &sel) in selectors.iter().enumerate() {
            for v in 0..self.ts.num_vars() {
                let (a, b) = (self.steps[k + 1][v], self.steps[l][v]);
                self.solver.add_clause(&[!sel, !a, b]);
                self.solver.add_clause(&[!sel, a, !b]);
            }
            for m in 0..nf {
                let mut clause: Vec<Lit> = (l..=k).map(|i| fair[i][m]).collect();
                clause.push(!sel);
                self.solver.add_clause(&clause);
            }
        }
        guard
    }

    /// Guard literal of the completeness query at bound `k`.
    pub fn enc_complete(&mut self, k: usize) -> Lit {
        self.ensure_augmented(k);
        let all_distinct: Vec<Lit> = self.aug.diff[..=k].iter().flatten().copied().collect();
        let distinct = gate_and(&mut self.solver, &all_distinct);
        let guard = self.solver.new_var().pos();
        let mut clause = vec![!guard, distinct];
        clause.extend(&self.aug.goals[..k]);
        self.solver.add_clause(&clause);
        guard
    }

    fn solve(&mut self, guard: Lit, deadline: &Deadline) -> Result<SatStatus, Timeout> {
        let mut assumptions: Vec<Lit> = self.assumptions.iter().map(|(_, l)| *l).collect();
        assumptions.push(guard);
        self.solver.solve_limited(&assumptions, deadline)
    }

    fn failed_names(&self) -> BTreeSet<String> {
        let failed: BTreeSet<Lit> = self.solver.failed_assumptions().iter().copied().collect();
        self.assumptions.iter().filter(|(_, l)| failed.contains(l)).map(|(n, _)| n.clone()).collect()
    }

    /// Whether the witness query at bound `k` is satisfiable.
    pub fn witness_exists(&mut self, k: usize) -> bool {
        let g = self.enc_witness(k);
        self.solve(g, &Deadline::never()).expect("no deadline") == SatStatus::Sat
    }

    /// Assumption letters refuting the completeness query at bound `k`, if
    /// it is unsatisfiable.
    pub fn complete_refuted(&mut self, k: usize) -> Option<BTreeSet<String>> {
        let g = self.enc_complete(k);
        match self.solve(g, &Deadline::never()).expect("no deadline") {
            SatStatus::Unsat => Some(self.failed_names()),
            SatStatus::Sat => None,
        }
    }

    fn letter_states(&self, upto: usize) -> (Vec<String>, Vec<Vec<bool>>) {
        let letters: Vec<(String, usize)> = self.ts.letters().map(|(n, i)| (n.to_string(), i)).collect();
        let states = (0..=upto)
            .map(|i| letters.iter().map(|(_, v)| self.solver.lit_value(self.steps[i][*v])).collect())
            .collect();
        (letters.into_iter().map(|(n, _)| n).collect(), states)
    }
}

/// Bounded check of an LTL formula (infinite-word semantics) with the given
/// letters assumed true initially.
pub fn bmc_check(f: &Formula, assumption_letters: &[String], cfg: &BmcConfig) -> BmcVerdict {
    let ts = build(f, assumption_letters);
    let mut u = Unrolling::new(ts, assumption_letters, cfg.seed);
    for k in 0..=cfg.k_max {
        let gc = u.enc_complete(k);
        match u.solve(gc, &cfg.deadline) {
            Err(_) => return BmcVerdict::Unknown { k, reason: "time limit exceeded".into() },
            Ok(SatStatus::Unsat) => return BmcVerdict::Unsat { k, failed: u.failed_names() },
            Ok(SatStatus::Sat) => {}
        }
        let gp = u.enc_witness(k);
        match u.solve(gp, &cfg.deadline) {
            Err(_) => return BmcVerdict::Unknown { k, reason: "time limit exceeded".into() },
            Ok(SatStatus::Sat) => {
                let (letters, states) = u.letter_states(k + 1);
                let loop_start = (0..=k)
                    .find(|&l| (0..u.ts.num_vars()).all(|v| u.solver.lit_value(u.steps[l][v]) == u.solver.lit_value(u.steps[k + 1][v])))
                    .unwrap_or(0);
                return BmcVerdict::Sat { k, letters, states, loop_start };
            }
            Ok(SatStatus::Unsat) => {}
        }
    }
    BmcVerdict::Unknown { k: cfg.k_max, reason: format!("bound k_max = {} reached", cfg.k_max) }
}

/// Finite trace encoded by a lasso model of Ψ′: the states before the first
/// `end`, restricted to `alphabet`.
pub fn decode_witness(letters: &[String], states: &[Vec<bool>], alphabet: &[String]) -> Trace {
    let end = letters.iter().position(|l| l == END_VAR);
    let len = match end {
        Some(e) => states.iter().position(|s| s[e]).unwrap_or(states.len()),
        None => states.len(),
    };
    let mut t = Trace::new(alphabet.to_vec());
    for s in &states[..len] {
        let row = alphabet
            .iter()
            .map(|a| letters.iter().position(|l| l == a).is_some_and(|i| s[i]))
            .collect();
        t.push_state(row);
    }
    t
}

pub fn algorithm2_uc(s: &Spec, cfg: &BmcConfig) -> UcResult {
    let start = Instant::now();
    let activated = match activate(s) {
        Ok(a) => a,
        Err(e) => return UcResult::unknown(Algorithm::Bmc, e.to_string()).with_elapsed(start.elapsed()),
    };
    let psi_prime = ltlf_to_ltl(&activated.psi);
    let acts = activated.activation_vars();
    let r = match bmc_check(&psi_prime, &acts, cfg) {
        BmcVerdict::Sat { k, letters, states, .. } => {
            let w = decode_witness(&letters, &states, s.alphabet.names());
            UcResult::sat(Algorithm::Bmc, Some(w)).with_k(k)
        }
        BmcVerdict::Unsat { k, failed } => {
            UcResult::unsat(Algorithm::Bmc, restrict_core(&activated, failed.iter().map(String::as_str))).with_k(k)
        }
        BmcVerdict::Unknown { k, reason } => UcResult::unknown(Algorithm::Bmc, reason).with_k(k),
    };
    r.with_elapsed(start.elapsed())
}
