//! Explicit-state decision procedure used to validate the symbolic engines.
//!
//! Past operators are eliminated first; the remaining future-only formula is
//! explored breadth-first over obligation sets obtained by one-step tableau
//! expansion (the disjunctive form of its neXt normal form). A state is final
//! when one of its expansions has no pending strong-next obligation.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Spec};
use crate::semantics::Trace;
use crate::translate::{remove_past, to_nnf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle state budget of {0} states exceeded")]
    StateBudget(usize),
    #[error("no witness of length <= {0} and the state space is not exhausted")]
    LengthBudget(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_len: usize,
    pub max_states: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_len: 1_000, max_states: 200_000 }
    }
}

/// Outcome of a satisfiability check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub satisfiable: bool,
    /// A model; present iff `satisfiable`.
    pub witness: Option<Trace>,
}

/// An obligation set: the conjunction of its members must hold from the
/// current position on.
pub type Obligations = BTreeSet<Formula>;

/// One disjunct of the one-step expansion of an obligation set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    /// Partial assignment to the current letter.
    pub literals: BTreeMap<String, bool>,
    /// Obligations for the next position.
    pub next: Obligations,
    /// Whether a next position is required (some strong-next obligation).
    pub strong: bool,
}

impl Branch {
    fn empty() -> Self {
        Branch { literals: BTreeMap::new(), next: BTreeSet::new(), strong: false }
    }

    fn merge(&self, other: &Branch) -> Option<Branch> {
        let mut literals = self.literals.clone();
        for (v, b) in &other.literals {
            if let Some(prev) = literals.insert(v.clone(), *b) {
                if prev != *b {
                    return None;
                }
            }
        }
        let next = self.next.union(&other.next).cloned().collect();
        Some(Branch { literals, next, strong: self.strong || other.strong })
    }

    /// Whether the trace may end at this position.
    pub fn is_final(&self) -> bool {
        !self.strong
    }
}

fn obligations_of(f: &Formula) -> Obligations {
    f.top_level_conjuncts().into_iter().filter(|g| *g != Formula::True).collect()
}

fn product(a: Vec<Branch>, b: &[Branch]) -> Vec<Branch> {
    let mut out = BTreeSet::new();
    for x in &a {
        for y in b {
            if let Some(m) = x.merge(y) {
                out.insert(m);
            }
        }
    }
    out.into_iter().collect()
}

fn union(mut a: Vec<Branch>, b: Vec<Branch>) -> Vec<Branch> {
    a.extend(b);
    a.sort();
    a.dedup();
    a
}

fn next_branch(f: &Formula, strong: bool) -> Vec<Branch> {
    let mut b = Branch::empty();
    b.next = obligations_of(f);
    b.strong = strong;
    vec![b]
}

/// Expansion of a single NNF, past-free formula.
pub fn expand_formula(f: &Formula) -> Vec<Branch> {
    use Formula::*;
    match f {
        True => vec![Branch::empty()],
        False => vec![],
        Var(v) => {
            let mut b = Branch::empty();
            b.literals.insert(v.clone(), true);
            vec![b]
        }
        Not(g) => match &**g {
            Var(v) => {
                let mut b = Branch::empty();
                b.literals.insert(v.clone(), false);
                vec![b]
            }
            _ => expand_formula(&to_nnf(f)),
        },
        And(g, h) => product(expand_formula(g), &expand_formula(h)),
        Or(g, h) => union(expand_formula(g), expand_formula(h)),
        Next(g) => next_branch(g, true),
        WeakNext(g) => next_branch(g, false),
        Eventually(g) => union(expand_formula(g), next_branch(f, true)),
        Globally(g) => product(expand_formula(g), &next_branch(f, false)),
        Until(g, h) => union(expand_formula(h), product(expand_formula(g), &next_branch(f, true))),
        Release(g, h) => product(expand_formula(h), &union(expand_formula(g), next_branch(f, false))),
        Implies(..) | Iff(..) => expand_formula(&to_nnf(f)),
        _ => panic!("tableau expansion requires a past-free formula, got {f}"),
    }
}

/// Expansion of an obligation set: the product of its members' expansions.
pub fn expand(state: &Obligations) -> Vec<Branch> {
    let mut acc = vec![Branch::empty()];
    for f in state {
        acc = product(acc, &expand_formula(f));
        if acc.is_empty() {
            break;
        }
    }
    acc
}

/// Breadth-first search for a shortest model of `f`.
pub fn oracle_sat(f: &Formula, max_len: usize) -> Result<Verdict, OracleError> {
    oracle_sat_with(f, &OracleConfig { max_len, ..OracleConfig::default() })
}

pub fn oracle_sat_with(f: &Formula, cfg: &OracleConfig) -> Result<Verdict, OracleError> {
    let original_vars = f.vars_in_order();
    let future = to_nnf(&remove_past(f).conjoined());
    let mut all_vars = original_vars.clone();
    for v in future.vars_in_order() {
        if !all_vars.contains(&v) {
            all_vars.push(v);
        }
    }

    let init = obligations_of(&future);
    let mut ids: HashMap<Obligations, usize> = HashMap::new();
    // (parent id, letter that led here, depth)
    let mut parents: Vec<Option<(usize, BTreeMap<String, bool>)>> = Vec::new();
    let mut states: Vec<Obligations> = Vec::new();
    let mut depth: Vec<usize> = Vec::new();
    let mut queue = VecDeque::new();

    ids.insert(init.clone(), 0);
    states.push(init);
    parents.push(None);
    depth.push(0);
    queue.push_back(0usize);

    while let Some(id) = queue.pop_front() {
        if depth[id] + 1 > cfg.max_len {
            return Err(OracleError::LengthBudget(cfg.max_len));
        }
        let branches = expand(&states[id]);
        if let Some(fin) = branches.iter().find(|b| b.is_final()) {
            let mut letters = vec![fin.literals.clone()];
            let mut cur = id;
            while let Some((parent, letter)) = &parents[cur] {
                letters.push(letter.clone());
                cur = *parent;
            }
            letters.reverse();
            let full = Trace::from_maps(all_vars.clone(), &letters);
            return Ok(Verdict { satisfiable: true, witness: Some(full.project(&original_vars)) });
        }
        for b in branches {
            if ids.contains_key(&b.next) {
                continue;
            }
            if states.len() >= cfg.max_states {
                return Err(OracleError::StateBudget(cfg.max_states));
            }
            let nid = states.len();
            ids.insert(b.next.clone(), nid);
            states.push(b.next);
            parents.push(Some((id, b.literals)));
            depth.push(depth[id] + 1);
            queue.push_back(nid);
        }
    }
    Ok(Verdict { satisfiable: false, witness: None })
}

/// Satisfiability of the conjunction of the conjuncts named by `labels`.
pub fn oracle_sat_subset(spec: &Spec, labels: &BTreeSet<String>, cfg: &OracleConfig) -> Result<bool, OracleError> {
    let f = Formula::conjunction(
        spec.conjuncts.iter().filter(|(l, _)| labels.contains(l)).map(|(_, f)| f.clone()),
    );
    Ok(oracle_sat_with(&f, cfg)?.satisfiable)
}

/// Every subset of Γ (as label sets) whose conjunction is unsatisfiable.
pub fn oracle_unsat_subsets(spec: &Spec, cfg: &OracleConfig) -> Result<BTreeSet<BTreeSet<String>>, OracleError> {
    let n = spec.len();
    assert!(n <= 20, "subset scan over {n} conjuncts is too large");
    let labels = spec.labels();
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        let subset: BTreeSet<String> =
            (0..n).filter(|i| mask & (1 << i) != 0).map(|i| labels[i].clone()).collect();
        if !oracle_sat_subset(spec, &subset, cfg)? {
            out.insert(subset);
        }
    }
    Ok(out)
}

/// All ⊆-minimal unsatisfiable cores by exhaustive subset scan.
pub fn oracle_all_min_ucs(spec: &Spec, max_len: usize) -> Result<BTreeSet<BTreeSet<String>>, OracleError> {
    let cfg = OracleConfig { max_len, ..OracleConfig::default() };
    let unsat = oracle_unsat_subsets(spec, &cfg)?;
    Ok(minimal_sets(&unsat))
}

/// The ⊆-minimal members of a family of sets.
pub fn minimal_sets(family: &BTreeSet<BTreeSet<String>>) -> BTreeSet<BTreeSet<String>> {
    family
        .iter()
        .filter(|s| !family.iter().any(|t| t != *s && t.is_subset(s)))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_spec};
    use crate::semantics::eval;

    fn sat(s: &str) -> Verdict {
        oracle_sat(&parse_formula(s).unwrap(), 50).unwrap()
    }

    fn labels(ls: &[&str]) -> BTreeSet<String> {
        ls.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn contradiction_is_unsat() {
        assert!(!sat("a & !a").satisfiable);
        assert!(!sat("(G a) & (F !a)").satisfiable);
        assert!(!sat("G false").satisfiable);
    }

    #[test]
    fn next_needs_two_states() {
        let v = sat("X a");
        assert!(v.satisfiable);
        let w = v.witness.unwrap();
        assert_eq!(w.len(), 2);
        assert!(eval(&parse_formula("X a").unwrap(), &w, 0).unwrap());
    }

    #[test]
    fn past_is_handled() {
        assert!(sat("O a").satisfiable);
        assert!(!sat("(H !a) & (O a)").satisfiable);
        let v = sat("X (Y a) & G a");
        assert!(v.satisfiable);
        assert_eq!(v.witness.unwrap().len(), 2);
        assert!(!sat("Y a").satisfiable);
        assert!(sat("Z a").satisfiable);
    }

    #[test]
    fn length_budget() {
        let f = parse_formula("X X X a").unwrap();
        assert!(matches!(oracle_sat(&f, 2), Err(OracleError::LengthBudget(2))));
        assert_eq!(oracle_sat(&f, 4).unwrap().witness.unwrap().len(), 4);
    }

    #[test]
    fn min_ucs_examples() {
        let s = parse_spec("a & !a & b", "s").unwrap();
        assert_eq!(oracle_all_min_ucs(&s, 20).unwrap(), BTreeSet::from([labels(&["c1", "c2"])]));
        let s = parse_spec("a", "s").unwrap();
        assert!(oracle_all_min_ucs(&s, 20).unwrap().is_empty());
        // strong next cannot hold at the last state, so c1 & c3 is also a core
        let s = parse_spec("(G a) & (F !a) & (G (a -> X b))", "s").unwrap();
        assert_eq!(
            oracle_all_min_ucs(&s, 20).unwrap(),
            BTreeSet::from([labels(&["c1", "c2"]), labels(&["c1", "c3"])])
        );
        let s = parse_spec("(G a) & (F !a) & (G (a -> N b))", "s").unwrap();
        assert_eq!(oracle_all_min_ucs(&s, 20).unwrap(), BTreeSet::from([labels(&["c1", "c2"])]));
    }

    #[test]
    fn expansion_of_until() {
        let f = parse_formula("a U b").unwrap();
        let bs = expand_formula(&f);
        assert_eq!(bs.len(), 2);
        assert!(bs.iter().any(|b| b.is_final() && b.literals.get("b") == Some(&true)));
        assert!(bs.iter().any(|b| b.strong && b.next.contains(&f)));
    }
}
