//! Reduced ordered binary decision diagrams.
//!
//! Variable `i` sits at level `i`; callers pick the order by choosing
//! indices. Plain nodes without complement edges.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU32, Ordering};

use thiserror::Error;

use crate::budget::Deadline;

pub const DEFAULT_NODE_BUDGET: usize = 5_000_000;

static NEXT_MANAGER: AtomicU32 = AtomicU32::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BddError {
    #[error("BDD handles belong to different managers")]
    ManagerMismatch,
    #[error("BDD node budget of {0} nodes exceeded")]
    NodeBudget(usize),
    #[error("time limit exceeded during BDD operation")]
    Timeout,
    #[error("operation requires a non-empty BDD")]
    Empty,
}

/// A handle to a node of a particular manager.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bdd {
    mgr: u32,
    node: u32,
}

impl Bdd {
    pub fn is_false(self) -> bool {
        self.node == FALSE
    }

    pub fn is_true(self) -> bool {
        self.node == TRUE
    }
}

const FALSE: u32 = 0;
const TRUE: u32 = 1;
const TERMINAL_VAR: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    lo: u32,
    hi: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
    Xor,
    Not,
}

pub type Cube = BTreeMap<u32, bool>;

#[derive(Debug)]
pub struct BddManager {
    id: u32,
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
    cache: HashMap<(Op, u32, u32), u32>,
    budget: usize,
    deadline: Deadline,
    ticks: u64,
}

impl Default for BddManager {
    fn default() -> Self {
        BddManager::new()
    }
}

impl BddManager {
    pub fn new() -> Self {
        BddManager::with_budget(DEFAULT_NODE_BUDGET)
    }

    pub fn with_budget(budget: usize) -> Self {
        let t = Node { var: TERMINAL_VAR, lo: 0, hi: 0 };
        BddManager {
            id: NEXT_MANAGER.fetch_add(1, Ordering::Relaxed),
            nodes: vec![t, Node { hi: 1, lo: 1, ..t }],
            unique: HashMap::new(),
            cache: HashMap::new(),
            budget,
            deadline: Deadline::never(),
            ticks: 0,
        }
    }

    pub fn set_deadline(&mut self, d: Deadline) {
        self.deadline = d;
    }

    /// Total nodes allocated, terminals included.
    pub fn allocated(&self) -> usize {
        self.nodes.len()
    }

    fn wrap(&self, node: u32) -> Bdd {
        Bdd { mgr: self.id, node }
    }

    fn own(&self, f: Bdd) -> Result<u32, BddError> {
        if f.mgr == self.id {
            Ok(f.node)
        } else {
            Err(BddError::ManagerMismatch)
        }
    }

    pub fn constant(&self, b: bool) -> Bdd {
        self.wrap(if b { TRUE } else { FALSE })
    }

    pub fn var(&mut self, i: u32) -> Result<Bdd, BddError> {
        let n = self.mk(i, FALSE, TRUE)?;
        Ok(self.wrap(n))
    }

    pub fn nvar(&mut self, i: u32) -> Result<Bdd, BddError> {
        let n = self.mk(i, TRUE, FALSE)?;
        Ok(self.wrap(n))
    }

    fn mk(&mut self, var: u32, lo: u32, hi: u32) -> Result<u32, BddError> {
        if lo == hi {
            return Ok(lo);
        }
        let key = Node { var, lo, hi };
        if let Some(&n) = self.unique.get(&key) {
            return Ok(n);
        }
        self.ticks += 1;
        if self.ticks % 4096 == 0 && self.deadline.expired() {
            return Err(BddError::Timeout);
        }
        if self.nodes.len() >= self.budget {
            return Err(BddError::NodeBudget(self.budget));
        }
        let n = self.nodes.len() as u32;
        self.nodes.push(key);
        self.unique.insert(key, n);
        Ok(n)
    }

    fn level(&self, n: u32) -> u32 {
        self.nodes[n as usize].var
    }

    fn cofactors(&self, n: u32, var: u32) -> (u32, u32) {
        let node = self.nodes[n as usize];
        if node.var == var {
            (node.lo, node.hi)
        } else {
            (n, n)
        }
    }

    fn cache_put(&mut self, key: (Op, u32, u32), v: u32) {
        if self.cache.len() > 4_000_000 {
            self.cache.clear();
        }
        self.cache.insert(key, v);
    }

    fn apply_rec(&mut self, op: Op, f: u32, g: u32) -> Result<u32, BddError> {
        let terminal = match op {
            Op::And => match (f, g) {
                (FALSE, _) | (_, FALSE) => Some(FALSE),
                (TRUE, x) | (x, TRUE) => Some(x),
                _ if f == g => Some(f),
                _ => None,
            },
            Op::Or => match (f, g) {
                (TRUE, _) | (_, TRUE) => Some(TRUE),
                (FALSE, x) | (x, FALSE) => Some(x),
                _ if f == g => Some(f),
                _ => None,
            },
            Op::Xor => match (f, g) {
                (FALSE, x) | (x, FALSE) => Some(x),
                _ if f == g => Some(FALSE),
                (TRUE, x) | (x, TRUE) => return self.not_rec(x),
                _ => None,
            },
            Op::Not => unreachable!(),
        };
        if let Some(t) = terminal {
            return Ok(t);
        }
        let (a, b) = if f <= g { (f, g) } else { (g, f) };
        if let Some(&r) = self.cache.get(&(op, a, b)) {
            return Ok(r);
        }
        let v = self.level(f).min(self.level(g));
        let (f0, f1) = self.cofactors(f, v);
        let (g0, g1) = self.cofactors(g, v);
        let lo = self.apply_rec(op, f0, g0)?;
        let hi = self.apply_rec(op, f1, g1)?;
        let r = self.mk(v, lo, hi)?;
        self.cache_put((op, a, b), r);
        Ok(r)
    }

    fn not_rec(&mut self, f: u32) -> Result<u32, BddError> {
        match f {
            FALSE => return Ok(TRUE),
            TRUE => return Ok(FALSE),
            _ => {}
        }
        if let Some(&r) = self.cache.get(&(Op::Not, f, 0)) {
            return Ok(r);
        }
        let n = self.nodes[f as usize];
        let lo = self.not_rec(n.lo)?;
        let hi = self.not_rec(n.hi)?;
        let r = self.mk(n.var, lo, hi)?;
        self.cache_put((Op::Not, f, 0), r);
        Ok(r)
    }

    fn binary(&mut self, op: Op, f: Bdd, g: Bdd) -> Result<Bdd, BddError> {
        let (f, g) = (self.own(f)?, self.own(g)?);
        let r = self.apply_rec(op, f, g)?;
        Ok(self.wrap(r))
    }

    pub fn and(&mut self, f: Bdd, g: Bdd) -> Result<Bdd, BddError> {
        self.binary(Op::And, f, g)
    }

    pub fn or(&mut self, f: Bdd, g: Bdd) -> Result<Bdd, BddError> {
        self.binary(Op::Or, f, g)
    }

    pub fn xor(&mut self, f: Bdd, g: Bdd) -> Result<Bdd, BddError> {
        self.binary(Op::Xor, f, g)
    }

    pub fn iff(&mut self, f: Bdd, g: Bdd) -> Result<Bdd, BddError> {
        let x = self.xor(f, g)?;
        self.not(x)
    }

    pub fn implies(&mut self, f: Bdd, g: Bdd) -> Result<Bdd, BddError> {
        let nf = self.not(f)?;
        self.or(nf, g)
    }

    pub fn not(&mut self, f: Bdd) -> Result<Bdd, BddError> {
        let f = self.own(f)?;
        let r = self.not_rec(f)?;
        Ok(self.wrap(r))
    }

    pub fn ite(&mut self, c: Bdd, t: Bdd, e: Bdd) -> Result<Bdd, BddError> {
        let a = self.and(c, t)?;
        let nc = self.not(c)?;
        let b = self.and(nc, e)?;
        self.or(a, b)
    }

    pub fn and_all<I: IntoIterator<Item = Bdd>>(&mut self, xs: I) -> Result<Bdd, BddError> {
        let mut acc = self.constant(true);
        for x in xs {
            acc = self.and(acc, x)?;
        }
        Ok(acc)
    }

    pub fn or_all<I: IntoIterator<Item = Bdd>>(&mut self, xs: I) -> Result<Bdd, BddError> {
        let mut acc = self.constant(false);
        for x in xs {
            acc = self.or(acc, x)?;
        }
        Ok(acc)
    }

    /// ∃vars. f
    pub fn exists(&mut self, vars: &BTreeSet<u32>, f: Bdd) -> Result<Bdd, BddError> {
        let t = self.constant(true);
        self.and_exists(f, t, vars)
    }

    /// ∀vars. f
    pub fn forall(&mut self, vars: &BTreeSet<u32>, f: Bdd) -> Result<Bdd, BddError> {
        let nf = self.not(f)?;
        let e = self.exists(vars, nf)?;
        self.not(e)
    }

    /// ∃vars. f ∧ g, without building the conjunction first.
    pub fn and_exists(&mut self, f: Bdd, g: Bdd, vars: &BTreeSet<u32>) -> Result<Bdd, BddError> {
        let (f, g) = (self.own(f)?, self.own(g)?);
        let mut memo = HashMap::new();
        let r = self.and_exists_rec(f, g, vars, &mut memo)?;
        Ok(self.wrap(r))
    }

    fn and_exists_rec(
        &mut self,
        f: u32,
        g: u32,
        vars: &BTreeSet<u32>,
        memo: &mut HashMap<(u32, u32), u32>,
    ) -> Result<u32, BddError> {
        if f == FALSE || g == FALSE {
            return Ok(FALSE);
        }
        if f == TRUE && g == TRUE {
            return Ok(TRUE);
        }
        let v = self.level(f).min(self.level(g));
        if vars.range(v..).next().is_none() {
            return self.apply_rec(Op::And, f, g);
        }
        let key = if f <= g { (f, g) } else { (g, f) };
        if let Some(&r) = memo.get(&key) {
            return Ok(r);
        }
        let (f0, f1) = self.cofactors(f, v);
        let (g0, g1) = self.cofactors(g, v);
        let r = if vars.contains(&v) {
            let lo = self.and_exists_rec(f0, g0, vars, memo)?;
            if lo == TRUE {
                TRUE
            } else {
                let hi = self.and_exists_rec(f1, g1, vars, memo)?;
                self.apply_rec(Op::Or, lo, hi)?
            }
        } else {
            let lo = self.and_exists_rec(f0, g0, vars, memo)?;
            let hi = self.and_exists_rec(f1, g1, vars, memo)?;
            self.mk(v, lo, hi)?
        };
        memo.insert(key, r);
        Ok(r)
    }

    /// Renames variables; unmapped variables are kept. The map need not
    /// preserve the order.
    pub fn rename(&mut self, f: Bdd, map: &HashMap<u32, u32>) -> Result<Bdd, BddError> {
        let f = self.own(f)?;
        let mut memo = HashMap::new();
        let r = self.rename_rec(f, map, &mut memo)?;
        Ok(self.wrap(r))
    }

    fn rename_rec(&mut self, f: u32, map: &HashMap<u32, u32>, memo: &mut HashMap<u32, u32>) -> Result<u32, BddError> {
        if f <= TRUE {
            return Ok(f);
        }
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let n = self.nodes[f as usize];
        let lo = self.rename_rec(n.lo, map, memo)?;
        let hi = self.rename_rec(n.hi, map, memo)?;
        let v = map.get(&n.var).copied().unwrap_or(n.var);
        let r = if v < self.level(lo).min(self.level(hi)) {
            self.mk(v, lo, hi)?
        } else {
            let x = self.mk(v, FALSE, TRUE)?;
            let a = self.apply_rec(Op::And, x, hi)?;
            let nx = self.mk(v, TRUE, FALSE)?;
            let b = self.apply_rec(Op::And, nx, lo)?;
            self.apply_rec(Op::Or, a, b)?
        };
        memo.insert(f, r);
        Ok(r)
    }

    /// Restricts `f` by a partial assignment.
    pub fn restrict(&mut self, f: Bdd, cube: &Cube) -> Result<Bdd, BddError> {
        let f = self.own(f)?;
        let mut memo = HashMap::new();
        let r = self.restrict_rec(f, cube, &mut memo)?;
        Ok(self.wrap(r))
    }

    fn restrict_rec(&mut self, f: u32, cube: &Cube, memo: &mut HashMap<u32, u32>) -> Result<u32, BddError> {
        if f <= TRUE {
            return Ok(f);
        }
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let n = self.nodes[f as usize];
        let r = match cube.get(&n.var) {
            Some(false) => self.restrict_rec(n.lo, cube, memo)?,
            Some(true) => self.restrict_rec(n.hi, cube, memo)?,
            None => {
                let lo = self.restrict_rec(n.lo, cube, memo)?;
                let hi = self.restrict_rec(n.hi, cube, memo)?;
                self.mk(n.var, lo, hi)?
            }
        };
        memo.insert(f, r);
        Ok(r)
    }

    pub fn eval(&self, f: Bdd, assign: &dyn Fn(u32) -> bool) -> bool {
        let mut n = f.node;
        while n > TRUE {
            let node = self.nodes[n as usize];
            n = if assign(node.var) { node.hi } else { node.lo };
        }
        n == TRUE
    }

    fn reachable(&self, f: u32) -> Vec<u32> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![f];
        while let Some(n) = stack.pop() {
            if n <= TRUE || !seen.insert(n) {
                continue;
            }
            let node = self.nodes[n as usize];
            stack.push(node.lo);
            stack.push(node.hi);
        }
        seen.into_iter().collect()
    }

    /// Internal (non-terminal) nodes reachable from `f`.
    pub fn node_count(&self, f: Bdd) -> usize {
        self.reachable(f.node).len()
    }

    pub fn support(&self, f: Bdd) -> BTreeSet<u32> {
        self.reachable(f.node).into_iter().map(|n| self.nodes[n as usize].var).collect()
    }

    /// One satisfying path, preferring the low branch. Variables off the
    /// path are don't-cares and absent from the cube.
    pub fn pick_one_cube(&self, f: Bdd) -> Result<Cube, BddError> {
        if f.is_false() {
            return Err(BddError::Empty);
        }
        let mut cube = Cube::new();
        let mut n = f.node;
        while n > TRUE {
            let node = self.nodes[n as usize];
            if node.lo != FALSE {
                cube.insert(node.var, false);
                n = node.lo;
            } else {
                cube.insert(node.var, true);
                n = node.hi;
            }
        }
        Ok(cube)
    }

    /// All satisfying paths as partial assignments.
    pub fn cubes(&self, f: Bdd) -> Vec<Cube> {
        let mut out = Vec::new();
        let mut path = Cube::new();
        self.cubes_rec(f.node, &mut path, &mut out);
        out
    }

    fn cubes_rec(&self, n: u32, path: &mut Cube, out: &mut Vec<Cube>) {
        match n {
            FALSE => {}
            TRUE => out.push(path.clone()),
            _ => {
                let node = self.nodes[n as usize];
                path.insert(node.var, false);
                self.cubes_rec(node.lo, path, out);
                path.insert(node.var, true);
                self.cubes_rec(node.hi, path, out);
                path.remove(&node.var);
            }
        }
    }

    /// Every total assignment over `restrict_to` that extends to a model of
    /// `f`; other variables are projected away first.
    pub fn all_sat_cubes(&mut self, f: Bdd, restrict_to: &BTreeSet<u32>) -> Result<Vec<Cube>, BddError> {
        let others: BTreeSet<u32> = self.support(f).difference(restrict_to).copied().collect();
        let p = self.exists(&others, f)?;
        let vars: Vec<u32> = restrict_to.iter().copied().collect();
        let mut out = Vec::new();
        let mut cur = Cube::new();
        self.expand_rec(p.node, &vars, 0, &mut cur, &mut out);
        Ok(out)
    }

    fn expand_rec(&self, n: u32, vars: &[u32], i: usize, cur: &mut Cube, out: &mut Vec<Cube>) {
        if n == FALSE {
            return;
        }
        if i == vars.len() {
            out.push(cur.clone());
            return;
        }
        let v = vars[i];
        let (lo, hi) = self.cofactors(n, v);
        cur.insert(v, false);
        self.expand_rec(lo, vars, i + 1, cur, out);
        cur.insert(v, true);
        self.expand_rec(hi, vars, i + 1, cur, out);
        cur.remove(&v);
    }

    /// Number of models over variables `0..num_vars`.
    pub fn sat_count(&self, f: Bdd, num_vars: u32) -> f64 {
        let mut memo = HashMap::new();
        let level = |n: u32| if n <= TRUE { num_vars } else { self.nodes[n as usize].var };
        fn rec(m: &BddManager, n: u32, memo: &mut HashMap<u32, f64>, level: &dyn Fn(u32) -> u32) -> f64 {
            if n == FALSE {
                return 0.0;
            }
            if n == TRUE {
                return 1.0;
            }
            if let Some(&c) = memo.get(&n) {
                return c;
            }
            let node = m.nodes[n as usize];
            let lo = rec(m, node.lo, memo, level) * 2f64.powi((level(node.lo) - node.var - 1) as i32);
            let hi = rec(m, node.hi, memo, level) * 2f64.powi((level(node.hi) - node.var - 1) as i32);
            memo.insert(n, lo + hi);
            lo + hi
        }
        rec(self, f.node, &mut memo, &level) * 2f64.powi(level(f.node) as i32)
    }

    /// A model of `f` with the fewest variables set to true among those in
    /// `vars`; everything else on the chosen path is completed with false.
    pub fn min_true_cube(&self, f: Bdd, vars: &BTreeSet<u32>) -> Result<(usize, Cube), BddError> {
        if f.is_false() {
            return Err(BddError::Empty);
        }
        let mut cost: HashMap<u32, usize> = HashMap::new();
        for n in self.reachable(f.node).into_iter().rev() {
            self.min_cost(n, vars, &mut cost);
        }
        let best = self.min_cost(f.node, vars, &mut cost);
        let mut cube = Cube::new();
        let mut n = f.node;
        while n > TRUE {
            let node = self.nodes[n as usize];
            let w = usize::from(vars.contains(&node.var));
            let lo = self.min_cost(node.lo, vars, &mut cost);
            let hi = self.min_cost(node.hi, vars, &mut cost).saturating_add(w);
            if lo <= hi {
                cube.insert(node.var, false);
                n = node.lo;
            } else {
                cube.insert(node.var, true);
                n = node.hi;
            }
        }
        Ok((best, cube))
    }

    fn min_cost(&self, n: u32, vars: &BTreeSet<u32>, cost: &mut HashMap<u32, usize>) -> usize {
        match n {
            FALSE => usize::MAX,
            TRUE => 0,
            _ => {
                if let Some(&c) = cost.get(&n) {
                    return c;
                }
                let node = self.nodes[n as usize];
                let w = usize::from(vars.contains(&node.var));
                let c = self.min_cost(node.lo, vars, cost).min(self.min_cost(node.hi, vars, cost).saturating_add(w));
                cost.insert(n, c);
                c
            }
        }
    }

    /// Graphviz rendering; `name` labels variables.
    pub fn to_dot(&self, f: Bdd, name: &dyn Fn(u32) -> String) -> String {
        let mut out = String::from("digraph bdd {\n  f0 [shape=box,label=\"0\"];\n  f1 [shape=box,label=\"1\"];\n");
        for n in self.reachable(f.node) {
            let node = self.nodes[n as usize];
            let _ = writeln!(out, "  f{n} [label=\"{}\"];", name(node.var));
            let _ = writeln!(out, "  f{n} -> f{} [style=dashed];", node.lo);
            let _ = writeln!(out, "  f{n} -> f{};", node.hi);
        }
        let _ = writeln!(out, "  root -> f{};\n  root [shape=plaintext];\n}}", f.node);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_identities() {
        let mut m = BddManager::new();
        let x = m.var(0).unwrap();
        let y = m.var(1).unwrap();
        let nx = m.not(x).unwrap();
        assert!(m.and(x, nx).unwrap().is_false());
        let t = m.constant(true);
        assert!(m.or(x, t).unwrap().is_true());
        assert_eq!(m.ite(x, y, y).unwrap(), y);
    }

    #[test]
    fn quantification_examples() {
        let mut m = BddManager::new();
        let x = m.var(0).unwrap();
        let y = m.var(1).unwrap();
        let xy = m.and(x, y).unwrap();
        assert_eq!(m.exists(&BTreeSet::from([0]), xy).unwrap(), y);
        let z = m.xor(x, x).unwrap();
        assert!(m.exists(&BTreeSet::from([0]), z).unwrap().is_false());
        let e = m.iff(x, y).unwrap();
        assert!(m.exists(&BTreeSet::from([1]), e).unwrap().is_true());
    }

    #[test]
    fn cube_examples() {
        let mut m = BddManager::new();
        let x = m.var(0).unwrap();
        let y = m.var(1).unwrap();
        let xy = m.and(x, y).unwrap();
        let both = BTreeSet::from([0, 1]);
        assert_eq!(m.all_sat_cubes(xy, &both).unwrap(), vec![Cube::from([(0, true), (1, true)])]);
        let xoy = m.or(x, y).unwrap();
        assert_eq!(m.all_sat_cubes(xoy, &both).unwrap().len(), 3);
        assert_eq!(m.sat_count(xoy, 2), 3.0);
        let t = m.constant(true);
        assert!(m.pick_one_cube(t).unwrap().is_empty());
        assert!(matches!(m.pick_one_cube(m.constant(false)), Err(BddError::Empty)));
    }

    #[test]
    fn mismatched_managers_and_budget() {
        let mut a = BddManager::new();
        let mut b = BddManager::new();
        let x = a.var(0).unwrap();
        let y = b.var(0).unwrap();
        assert_eq!(a.and(x, y), Err(BddError::ManagerMismatch));
        let mut small = BddManager::with_budget(4);
        let v: Result<Vec<_>, _> = (0..10).map(|i| small.var(i)).collect();
        assert_eq!(v, Err(BddError::NodeBudget(4)));
    }

    #[test]
    fn rename_and_min_cube() {
        let mut m = BddManager::new();
        let x0 = m.var(0).unwrap();
        let x3 = m.var(3).unwrap();
        let f = m.and(x0, x3).unwrap();
        let r = m.rename(f, &HashMap::from([(0, 5), (3, 1)])).unwrap();
        let x5 = m.var(5).unwrap();
        let x1 = m.var(1).unwrap();
        assert_eq!(r, m.and(x5, x1).unwrap());

        let g = m.or(x0, x1).unwrap();
        let g = m.or(g, x3).unwrap();
        let (c, cube) = m.min_true_cube(g, &BTreeSet::from([0, 1, 3])).unwrap();
        assert_eq!(c, 1);
        assert_eq!(cube.values().filter(|b| **b).count(), 1);
        assert!(m.to_dot(g, &|v| format!("v{v}")).contains("digraph"));
    }

    #[test]
    fn and_chain_is_linear() {
        let mut m = BddManager::new();
        let vars: Vec<Bdd> = (0..12).map(|i| m.var(i).unwrap()).collect();
        let f = m.and_all(vars).unwrap();
        assert_eq!(m.node_count(f), 12);
    }
}
