//! CDCL solver: two watched literals, first-UIP learning, VSIDS, phase
//! saving, Luby restarts and incremental solving under assumptions.

use std::fmt;
use std::ops::Not;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::{Deadline, Timeout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 << 1)
    }

    pub fn neg(self) -> Lit {
        Lit((self.0 << 1) | 1)
    }

    pub fn lit(self, positive: bool) -> Lit {
        if positive {
            self.pos()
        } else {
            self.neg()
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    fn code(self) -> usize {
        self.0 as usize
    }

    /// 1-based signed DIMACS literal.
    pub fn to_dimacs(self) -> i32 {
        let v = self.var().0 as i32 + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(d: i32) -> Lit {
        assert!(d != 0, "0 is not a DIMACS literal");
        Var(d.unsigned_abs() - 1).lit(d > 0)
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LBool {
    True,
    False,
    Undef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SatStatus {
    Sat,
    Unsat,
}

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub seed: u64,
    /// Probability of a random decision.
    pub random_freq: f64,
    pub restart_base: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { seed: 0, random_freq: 0.0, restart_base: 100 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
}

/// Indexed max-heap on variable activity.
#[derive(Debug, Clone, Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, None);
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize].is_some()
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p] as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i] as usize] = Some(i);
            i = p;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && act[self.heap[r] as usize] > act[self.heap[l] as usize] { r } else { l };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = Some(i);
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = Some(i);
        self.up(i, act);
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        if let Some(i) = self.pos[v as usize] {
            self.up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let (mut size, mut seq) = (1u64, 0u32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq as i32)
}

#[derive(Debug, Clone)]
pub struct Solver {
    cfg: SolverConfig,
    rng: ChaCha8Rng,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    ok: bool,
    model: Vec<bool>,
    failed: Vec<Lit>,
    num_learnts: usize,
    max_learnts: f64,
    pub stats: SolverStats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver::with_config(SolverConfig::default())
    }

    pub fn with_config(cfg: SolverConfig) -> Self {
        Solver {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            clauses: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: Vec::new(),
            ok: true,
            model: Vec::new(),
            failed: Vec::new(),
            num_learnts: 0,
            max_learnts: 0.0,
            stats: SolverStats::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.iter().filter(|c| !c.deleted && !c.learnt).count()
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.assigns.len();
        self.assigns.push(LBool::Undef);
        self.level.push(0);
        self.reason.push(None);
        self.polarity.push(false);
        self.activity.push(0.0);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow(v + 1);
        self.heap.insert(v as u32, &self.activity);
        Var(v as u32)
    }

    /// Makes sure variables `0..n` exist.
    pub fn reserve_vars(&mut self, n: usize) {
        while self.num_vars() < n {
            self.new_var();
        }
    }

    fn value(&self, l: Lit) -> LBool {
        match self.assigns[l.var().index()] {
            LBool::Undef => LBool::Undef,
            LBool::True if l.is_positive() => LBool::True,
            LBool::False if !l.is_positive() => LBool::True,
            _ => LBool::False,
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a permanent clause. Returns false once the clause set is known
    /// to be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        for l in lits {
            self.reserve_vars(l.var().index() + 1);
        }
        self.cancel_until(0);
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        if c.iter().any(|&l| self.value(l) == LBool::True) {
            return true;
        }
        c.retain(|&l| self.value(l) != LBool::False);
        match c.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(c, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0].code()].push(Watcher { cref, blocker: lits[1] });
        self.watches[lits[1].code()].push(Watcher { cref, blocker: lits[0] });
        self.clauses.push(Clause { lits, learnt, deleted: false, activity: 0.0 });
        if learnt {
            self.num_learnts += 1;
        }
        cref
    }

    fn enqueue(&mut self, l: Lit, reason: Option<u32>) {
        let v = l.var().index();
        self.assigns[v] = if l.is_positive() { LBool::True } else { LBool::False };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value(first) == LBool::True {
                    ws[j] = Watcher { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != LBool::False {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l.code()].push(Watcher { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { cref: w.cref, blocker: first };
                j += 1;
                if self.value(first) == LBool::False {
                    conflict = Some(w.cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for idx in (lim..self.trail.len()).rev() {
            let l = self.trail[idx];
            let v = l.var().index();
            self.assigns[v] = LBool::Undef;
            self.reason[v] = None;
            self.polarity[v] = l.is_positive();
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        if !self.clauses[cref].learnt {
            return;
        }
        self.clauses[cref].activity += self.cla_inc;
        if self.clauses[cref].activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            self.bump_clause(confl as usize);
            let start = usize::from(p.is_some());
            let lits = self.clauses[confl as usize].lits.clone();
            for &q in &lits[start..] {
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().index()] {
                    break;
                }
            }
            let pl = self.trail[idx];
            self.seen[pl.var().index()] = false;
            path -= 1;
            p = Some(pl);
            if path == 0 {
                break;
            }
            confl = self.reason[pl.var().index()].expect("implied literal has a reason");
        }
        learnt[0] = !p.unwrap();

        // drop literals implied by the rest of the clause
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                i == 0
                    || match self.reason[l.var().index()] {
                        None => true,
                        Some(r) => self.clauses[r as usize].lits[1..]
                            .iter()
                            .any(|q| !self.seen[q.var().index()] && self.level[q.var().index()] > 0),
                    }
            })
            .collect();
        for l in &learnt[1..] {
            self.seen[l.var().index()] = false;
        }
        let mut out: Vec<Lit> = learnt.iter().zip(keep).filter(|(_, k)| *k).map(|(l, _)| *l).collect();

        let mut bt = 0;
        if out.len() > 1 {
            let mut max_i = 1;
            for i in 2..out.len() {
                if self.level[out[i].var().index()] > self.level[out[max_i].var().index()] {
                    max_i = i;
                }
            }
            out.swap(1, max_i);
            bt = self.level[out[1].var().index()];
        }
        (out, bt)
    }

    /// Collects the assumptions responsible for assumption `a` being false.
    fn analyze_final(&mut self, a: Lit) {
        self.failed.clear();
        self.failed.push(a);
        if self.decision_level() == 0 {
            return;
        }
        self.seen[a.var().index()] = true;
        for idx in (self.trail_lim[0]..self.trail.len()).rev() {
            let l = self.trail[idx];
            let v = l.var().index();
            if !self.seen[v] {
                continue;
            }
            match self.reason[v] {
                None => {
                    if v != a.var().index() {
                        self.failed.push(l);
                    }
                }
                Some(r) => {
                    for q in self.clauses[r as usize].lits[1..].to_vec() {
                        if self.level[q.var().index()] > 0 {
                            self.seen[q.var().index()] = true;
                        }
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[a.var().index()] = false;
    }

    fn reduce_db(&mut self) {
        let mut learnts: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lits.len() > 2 && !self.locked(i)
            })
            .collect();
        learnts.sort_by(|&a, &b| self.clauses[a].activity.total_cmp(&self.clauses[b].activity));
        for &i in &learnts[..learnts.len() / 2] {
            self.clauses[i].deleted = true;
            self.clauses[i].lits = Vec::new();
            self.num_learnts -= 1;
        }
        for ws in &mut self.watches {
            ws.clear();
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if !c.deleted {
                self.watches[c.lits[0].code()].push(Watcher { cref: i as u32, blocker: c.lits[1] });
                self.watches[c.lits[1].code()].push(Watcher { cref: i as u32, blocker: c.lits[0] });
            }
        }
    }

    fn locked(&self, cref: usize) -> bool {
        let l = self.clauses[cref].lits[0];
        self.value(l) == LBool::True && self.reason[l.var().index()] == Some(cref as u32)
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        if self.cfg.random_freq > 0.0 && self.rng.gen::<f64>() < self.cfg.random_freq && !self.heap.heap.is_empty() {
            let i = self.rng.gen_range(0..self.heap.heap.len());
            let v = self.heap.heap[i] as usize;
            if self.assigns[v] == LBool::Undef {
                return Some(Var(v as u32).lit(self.polarity[v]));
            }
        }
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize] == LBool::Undef {
                return Some(Var(v).lit(self.polarity[v as usize]));
            }
        }
        None
    }

    fn search(&mut self, assumptions: &[Lit], budget: u64, deadline: &Deadline) -> Result<Option<SatStatus>, Timeout> {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    self.failed.clear();
                    return Ok(Some(SatStatus::Unsat));
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref as usize);
                    self.enqueue(first, Some(cref));
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if conflicts % 64 == 0 {
                    deadline.check()?;
                }
            } else {
                if conflicts >= budget {
                    self.cancel_until(0);
                    return Ok(None);
                }
                if self.num_learnts as f64 - self.trail.len() as f64 >= self.max_learnts {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                let mut next = None;
                while (self.decision_level() as usize) < assumptions.len() {
                    let a = assumptions[self.decision_level() as usize];
                    match self.value(a) {
                        LBool::True => self.trail_lim.push(self.trail.len()),
                        LBool::False => {
                            self.analyze_final(a);
                            return Ok(Some(SatStatus::Unsat));
                        }
                        LBool::Undef => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let d = match next {
                    Some(a) => a,
                    None => {
                        self.stats.decisions += 1;
                        match self.pick_branch() {
                            Some(l) => l,
                            None => return Ok(Some(SatStatus::Sat)),
                        }
                    }
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(d, None);
            }
        }
    }

    /// Solves under `assumptions`, giving up once `deadline` passes.
    pub fn solve_limited(&mut self, assumptions: &[Lit], deadline: &Deadline) -> Result<SatStatus, Timeout> {
        for a in assumptions {
            self.reserve_vars(a.var().index() + 1);
        }
        self.model.clear();
        self.failed.clear();
        if !self.ok {
            return Ok(SatStatus::Unsat);
        }
        self.max_learnts = (self.num_clauses() as f64 / 3.0).max(1000.0);
        let mut restart = 0u64;
        let status = loop {
            let budget = (luby(2.0, restart) * self.cfg.restart_base as f64) as u64;
            let r = self.search(assumptions, budget, deadline);
            match r {
                Err(t) => {
                    self.cancel_until(0);
                    return Err(t);
                }
                Ok(Some(s)) => break s,
                Ok(None) => {
                    self.stats.restarts += 1;
                    restart += 1;
                    deadline.check()?;
                }
            }
        };
        if status == SatStatus::Sat {
            self.model = self.assigns.iter().map(|&a| a == LBool::True).collect();
        }
        self.cancel_until(0);
        Ok(status)
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> SatStatus {
        self.solve_limited(assumptions, &Deadline::never()).expect("no deadline")
    }

    /// Value of `v` in the last model.
    pub fn model_value(&self, v: Var) -> bool {
        self.model.get(v.index()).copied().unwrap_or(false)
    }

    pub fn lit_value(&self, l: Lit) -> bool {
        self.model_value(l.var()) == l.is_positive()
    }

    pub fn model(&self) -> &[bool] {
        &self.model
    }

    /// Subset of the assumptions that suffices for the last UNSAT answer.
    pub fn failed_assumptions(&self) -> &[Lit] {
        &self.failed
    }

    pub fn is_ok(&self) -> bool {
        self.ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(xs: &[i32]) -> Vec<Lit> {
        xs.iter().map(|&d| Lit::from_dimacs(d)).collect()
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<u64> = (0..9).map(|i| luby(2.0, i) as u64).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1]);
    }

    #[test]
    fn assumption_cores() {
        let mut s = Solver::new();
        s.add_clause(&lits(&[1, 2]));
        assert_eq!(s.solve(&lits(&[-1, -2])), SatStatus::Unsat);
        let mut failed = s.failed_assumptions().to_vec();
        failed.sort();
        assert_eq!(failed, lits(&[-1, -2]));
        assert_eq!(s.solve(&lits(&[-1])), SatStatus::Sat);
        assert!(s.model_value(Var(1)));

        let mut s = Solver::new();
        assert_eq!(s.solve(&lits(&[1])), SatStatus::Sat);
        assert!(s.model_value(Var(0)));

        let mut s = Solver::new();
        s.add_clause(&lits(&[1]));
        assert_eq!(s.solve(&lits(&[-1])), SatStatus::Unsat);
        assert_eq!(s.failed_assumptions(), &lits(&[-1])[..]);
    }

    #[test]
    fn pigeonhole_is_unsat() {
        // 4 pigeons in 3 holes
        let (p, h) = (4, 3);
        let var = |i: i32, j: i32| i * h + j + 1;
        let mut s = Solver::new();
        for i in 0..p {
            s.add_clause(&lits(&(0..h).map(|j| var(i, j)).collect::<Vec<_>>()));
        }
        for j in 0..h {
            for a in 0..p {
                for b in a + 1..p {
                    s.add_clause(&lits(&[-var(a, j), -var(b, j)]));
                }
            }
        }
        assert_eq!(s.solve(&[]), SatStatus::Unsat);
        assert!(s.failed_assumptions().is_empty());
    }

    #[test]
    fn irrelevant_assumptions_are_not_blamed() {
        let mut s = Solver::new();
        s.add_clause(&lits(&[-1, 3]));
        s.add_clause(&lits(&[-2, -3]));
        assert_eq!(s.solve(&lits(&[4, 1, 5, 2])), SatStatus::Unsat);
        let mut f = s.failed_assumptions().to_vec();
        f.sort();
        assert_eq!(f, lits(&[1, 2]));
    }
}
