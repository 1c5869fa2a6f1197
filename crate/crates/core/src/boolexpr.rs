//! Hash-consed propositional expressions over numbered atoms.
//!
//! The automaton is built once as expressions and then compiled either to
//! BDDs or, step by step, to CNF.

use std::collections::{BTreeSet, HashMap};

pub type ExprId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    True,
    False,
    Atom(u32),
    Not(ExprId),
    And(ExprId, ExprId),
    Or(ExprId, ExprId),
    Iff(ExprId, ExprId),
}

#[derive(Debug, Clone)]
pub struct ExprArena {
    nodes: Vec<Node>,
    table: HashMap<Node, ExprId>,
}

impl Default for ExprArena {
    fn default() -> Self {
        ExprArena::new()
    }
}

impl ExprArena {
    pub const TRUE: ExprId = 0;
    pub const FALSE: ExprId = 1;

    pub fn new() -> Self {
        let mut a = ExprArena { nodes: Vec::new(), table: HashMap::new() };
        a.intern(Node::True);
        a.intern(Node::False);
        a
    }

    fn intern(&mut self, n: Node) -> ExprId {
        if let Some(&id) = self.table.get(&n) {
            return id;
        }
        let id = self.nodes.len() as ExprId;
        self.nodes.push(n);
        self.table.insert(n, id);
        id
    }

    pub fn node(&self, id: ExprId) -> Node {
        self.nodes[id as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn constant(&mut self, b: bool) -> ExprId {
        if b {
            Self::TRUE
        } else {
            Self::FALSE
        }
    }

    pub fn atom(&mut self, a: u32) -> ExprId {
        self.intern(Node::Atom(a))
    }

    pub fn not(&mut self, x: ExprId) -> ExprId {
        match self.node(x) {
            Node::True => Self::FALSE,
            Node::False => Self::TRUE,
            Node::Not(y) => y,
            _ => self.intern(Node::Not(x)),
        }
    }

    fn is_negation_of(&self, x: ExprId, y: ExprId) -> bool {
        matches!(self.node(x), Node::Not(z) if z == y) || matches!(self.node(y), Node::Not(z) if z == x)
    }

    pub fn and(&mut self, x: ExprId, y: ExprId) -> ExprId {
        match (self.node(x), self.node(y)) {
            (Node::False, _) | (_, Node::False) => Self::FALSE,
            (Node::True, _) => y,
            (_, Node::True) => x,
            _ if x == y => x,
            _ if self.is_negation_of(x, y) => Self::FALSE,
            _ => self.intern(Node::And(x.min(y), x.max(y))),
        }
    }

    pub fn or(&mut self, x: ExprId, y: ExprId) -> ExprId {
        match (self.node(x), self.node(y)) {
            (Node::True, _) | (_, Node::True) => Self::TRUE,
            (Node::False, _) => y,
            (_, Node::False) => x,
            _ if x == y => x,
            _ if self.is_negation_of(x, y) => Self::TRUE,
            _ => self.intern(Node::Or(x.min(y), x.max(y))),
        }
    }

    pub fn iff(&mut self, x: ExprId, y: ExprId) -> ExprId {
        match (self.node(x), self.node(y)) {
            (Node::True, _) => y,
            (_, Node::True) => x,
            (Node::False, _) => self.not(y),
            (_, Node::False) => self.not(x),
            _ if x == y => Self::TRUE,
            _ if self.is_negation_of(x, y) => Self::FALSE,
            _ => self.intern(Node::Iff(x.min(y), x.max(y))),
        }
    }

    pub fn implies(&mut self, x: ExprId, y: ExprId) -> ExprId {
        let nx = self.not(x);
        self.or(nx, y)
    }

    pub fn xor(&mut self, x: ExprId, y: ExprId) -> ExprId {
        let e = self.iff(x, y);
        self.not(e)
    }

    pub fn ite(&mut self, c: ExprId, t: ExprId, e: ExprId) -> ExprId {
        let a = self.and(c, t);
        let nc = self.not(c);
        let b = self.and(nc, e);
        self.or(a, b)
    }

    pub fn and_all<I: IntoIterator<Item = ExprId>>(&mut self, xs: I) -> ExprId {
        xs.into_iter().fold(Self::TRUE, |acc, x| self.and(acc, x))
    }

    pub fn or_all<I: IntoIterator<Item = ExprId>>(&mut self, xs: I) -> ExprId {
        xs.into_iter().fold(Self::FALSE, |acc, x| self.or(acc, x))
    }

    pub fn eval(&self, id: ExprId, assign: &dyn Fn(u32) -> bool) -> bool {
        let mut memo = HashMap::new();
        self.eval_memo(id, assign, &mut memo)
    }

    fn eval_memo(&self, id: ExprId, assign: &dyn Fn(u32) -> bool, memo: &mut HashMap<ExprId, bool>) -> bool {
        if let Some(&v) = memo.get(&id) {
            return v;
        }
        let v = match self.node(id) {
            Node::True => true,
            Node::False => false,
            Node::Atom(a) => assign(a),
            Node::Not(x) => !self.eval_memo(x, assign, memo),
            Node::And(x, y) => self.eval_memo(x, assign, memo) && self.eval_memo(y, assign, memo),
            Node::Or(x, y) => self.eval_memo(x, assign, memo) || self.eval_memo(y, assign, memo),
            Node::Iff(x, y) => self.eval_memo(x, assign, memo) == self.eval_memo(y, assign, memo),
        };
        memo.insert(id, v);
        v
    }

    /// Atoms occurring under `id`.
    pub fn atoms(&self, id: ExprId) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            if !seen.insert(x) {
                continue;
            }
            match self.node(x) {
                Node::Atom(a) => {
                    out.insert(a);
                }
                Node::Not(y) => stack.push(y),
                Node::And(y, z) | Node::Or(y, z) | Node::Iff(y, z) => {
                    stack.push(y);
                    stack.push(z);
                }
                Node::True | Node::False => {}
            }
        }
        out
    }

    /// Replaces atoms according to `f`, rebuilding the expression in place.
    pub fn substitute(&mut self, id: ExprId, f: &dyn Fn(u32) -> u32) -> ExprId {
        let mut memo = HashMap::new();
        self.subst_memo(id, f, &mut memo)
    }

    fn subst_memo(&mut self, id: ExprId, f: &dyn Fn(u32) -> u32, memo: &mut HashMap<ExprId, ExprId>) -> ExprId {
        if let Some(&v) = memo.get(&id) {
            return v;
        }
        let v = match self.node(id) {
            Node::True | Node::False => id,
            Node::Atom(a) => self.atom(f(a)),
            Node::Not(x) => {
                let x = self.subst_memo(x, f, memo);
                self.not(x)
            }
            Node::And(x, y) => {
                let (x, y) = (self.subst_memo(x, f, memo), self.subst_memo(y, f, memo));
                self.and(x, y)
            }
            Node::Or(x, y) => {
                let (x, y) = (self.subst_memo(x, f, memo), self.subst_memo(y, f, memo));
                self.or(x, y)
            }
            Node::Iff(x, y) => {
                let (x, y) = (self.subst_memo(x, f, memo), self.subst_memo(y, f, memo));
                self.iff(x, y)
            }
        };
        memo.insert(id, v);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_consing_and_folding() {
        let mut a = ExprArena::new();
        let x = a.atom(0);
        let y = a.atom(1);
        assert_eq!(a.and(x, y), a.and(y, x));
        let nx = a.not(x);
        assert_eq!(a.and(x, nx), ExprArena::FALSE);
        assert_eq!(a.or(x, nx), ExprArena::TRUE);
        assert_eq!(a.not(nx), x);
        assert_eq!(a.iff(x, x), ExprArena::TRUE);
        let t = a.constant(true);
        assert_eq!(a.and(t, y), y);
    }

    #[test]
    fn evaluation_and_substitution() {
        let mut a = ExprArena::new();
        let (x, y) = (a.atom(0), a.atom(1));
        let e = a.xor(x, y);
        assert!(a.eval(e, &|v| v == 0));
        assert!(!a.eval(e, &|_| true));
        let e2 = a.substitute(e, &|v| v + 10);
        assert_eq!(a.atoms(e2), BTreeSet::from([10, 11]));
    }
}
