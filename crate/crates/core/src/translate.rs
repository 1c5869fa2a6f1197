//! Formula transformations: LTLf to LTL with an `end` marker, past-operator
//! elimination, negation normal form and neXt normal form.

use std::collections::HashMap;

use crate::formula::{Formula, END_VAR, PAST_PREFIX};

fn end() -> Formula {
    Formula::var(END_VAR)
}

fn not_end() -> Formula {
    Formula::not(end())
}

/// Recursive LTLf to LTL translation guarding temporal operators with `end`.
/// Past operators keep their shape and translate their arguments.
pub fn ftol(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True | False | Var(_) => f.clone(),
        Not(g) => Formula::not(ftol(g)),
        And(g, h) => Formula::and(ftol(g), ftol(h)),
        Or(g, h) => Formula::or(ftol(g), ftol(h)),
        Implies(g, h) => Formula::implies(ftol(g), ftol(h)),
        Iff(g, h) => Formula::iff(ftol(g), ftol(h)),
        Next(g) => Formula::next(Formula::and(ftol(g), not_end())),
        WeakNext(g) => Formula::next(Formula::or(ftol(g), end())),
        Eventually(g) => Formula::eventually(Formula::and(ftol(g), not_end())),
        Globally(g) => Formula::globally(Formula::or(ftol(g), end())),
        Until(g, h) => Formula::until(ftol(g), Formula::and(ftol(h), not_end())),
        Release(g, h) => Formula::release(Formula::and(ftol(g), not_end()), Formula::or(ftol(h), end())),
        Yesterday(g) => Formula::yesterday(ftol(g)),
        WeakYesterday(g) => Formula::weak_yesterday(ftol(g)),
        Once(g) => Formula::once(ftol(g)),
        Historically(g) => Formula::historically(ftol(g)),
        Since(g, h) => Formula::since(ftol(g), ftol(h)),
        Trigger(g, h) => Formula::trigger(ftol(g), ftol(h)),
    }
}

/// The LTL conjuncts that make `end` mark the end of a non-empty finite
/// prefix: `!end`, `F end` and `G (end -> X end)`.
pub fn end_axioms() -> Vec<Formula> {
    vec![
        not_end(),
        Formula::eventually(end()),
        Formula::globally(Formula::implies(end(), Formula::next(end()))),
    ]
}

/// LTL formula satisfiable over infinite traces iff `f` is satisfiable over
/// finite non-empty traces.
pub fn ltlf_to_ltl(f: &Formula) -> Formula {
    let mut parts = end_axioms();
    parts.push(ftol(f));
    Formula::conjunction(parts)
}

/// Output of past elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PastRemovalResult {
    pub future_formula: Formula,
    /// Monitor formulas tying each history variable to its past subformula.
    pub monitors: Vec<Formula>,
    /// History variables in creation order.
    pub fresh_vars: Vec<String>,
}

impl PastRemovalResult {
    /// `future_formula ∧ ⋀ monitors`, equi-satisfiable with the input.
    pub fn conjoined(&self) -> Formula {
        let mut parts = vec![self.future_formula.clone()];
        parts.extend(self.monitors.iter().cloned());
        Formula::conjunction(parts)
    }
}

/// Rewrites `Z`, `O`, `H` and `T` into `Y` and `S`.
fn normalize_past(f: &Formula) -> Formula {
    use Formula::*;
    let n = normalize_past;
    match f {
        True | False | Var(_) => f.clone(),
        Not(g) => Formula::not(n(g)),
        And(g, h) => Formula::and(n(g), n(h)),
        Or(g, h) => Formula::or(n(g), n(h)),
        Implies(g, h) => Formula::implies(n(g), n(h)),
        Iff(g, h) => Formula::iff(n(g), n(h)),
        Next(g) => Formula::next(n(g)),
        WeakNext(g) => Formula::weak_next(n(g)),
        Eventually(g) => Formula::eventually(n(g)),
        Globally(g) => Formula::globally(n(g)),
        Until(g, h) => Formula::until(n(g), n(h)),
        Release(g, h) => Formula::release(n(g), n(h)),
        Yesterday(g) => Formula::yesterday(n(g)),
        WeakYesterday(g) => Formula::not(Formula::yesterday(Formula::not(n(g)))),
        Once(g) => Formula::since(True, n(g)),
        Historically(g) => Formula::not(Formula::since(True, Formula::not(n(g)))),
        Since(g, h) => Formula::since(n(g), n(h)),
        Trigger(g, h) => Formula::not(Formula::since(Formula::not(n(g)), Formula::not(n(h)))),
    }
}

struct PastEliminator {
    names: HashMap<Formula, String>,
    monitors: Vec<Formula>,
    fresh: Vec<String>,
}

impl PastEliminator {
    fn fresh_for(&mut self, key: &Formula) -> (String, bool) {
        if let Some(n) = self.names.get(key) {
            return (n.clone(), false);
        }
        let name = format!("{PAST_PREFIX}{}", self.fresh.len() + 1);
        self.names.insert(key.clone(), name.clone());
        self.fresh.push(name.clone());
        (name, true)
    }

    /// Monitors `!p` and `G ((X p -> u) & (u -> N p))`: `p` is false at the
    /// first state and at every later state equals `u` one step earlier.
    fn monitor(&mut self, p: &str, unfolded: Formula) {
        let pv = Formula::var(p);
        self.monitors.push(Formula::not(pv.clone()));
        self.monitors.push(Formula::globally(Formula::and(
            Formula::implies(Formula::next(pv.clone()), unfolded.clone()),
            Formula::implies(unfolded, Formula::weak_next(pv)),
        )));
    }

    fn run(&mut self, f: &Formula) -> Formula {
        use Formula::*;
        match f {
            True | False | Var(_) => f.clone(),
            Not(g) => Formula::not(self.run(g)),
            And(g, h) => Formula::and(self.run(g), self.run(h)),
            Or(g, h) => Formula::or(self.run(g), self.run(h)),
            Implies(g, h) => Formula::implies(self.run(g), self.run(h)),
            Iff(g, h) => Formula::iff(self.run(g), self.run(h)),
            Next(g) => Formula::next(self.run(g)),
            WeakNext(g) => Formula::weak_next(self.run(g)),
            Eventually(g) => Formula::eventually(self.run(g)),
            Globally(g) => Formula::globally(self.run(g)),
            Until(g, h) => Formula::until(self.run(g), self.run(h)),
            Release(g, h) => Formula::release(self.run(g), self.run(h)),
            Yesterday(g) => {
                let inner = self.run(g);
                let (p, new) = self.fresh_for(f);
                if new {
                    self.monitor(&p, inner);
                }
                Formula::var(p)
            }
            Since(g, h) => {
                let (l, r) = (self.run(g), self.run(h));
                let (p, new) = self.fresh_for(f);
                let unfolded = Formula::or(r, Formula::and(l, Formula::var(p.clone())));
                if new {
                    self.monitor(&p, unfolded.clone());
                }
                unfolded
            }
            WeakYesterday(_) | Once(_) | Historically(_) | Trigger(..) => {
                unreachable!("normalized before elimination")
            }
        }
    }
}

/// Replaces every past subformula by a fresh history variable plus monitors.
/// History names are `_past_1, _past_2, ...` in post-order of first occurrence.
pub fn remove_past(f: &Formula) -> PastRemovalResult {
    let normalized = normalize_past(f);
    let mut e = PastEliminator { names: HashMap::new(), monitors: Vec::new(), fresh: Vec::new() };
    let future_formula = e.run(&normalized);
    PastRemovalResult { future_formula, monitors: e.monitors, fresh_vars: e.fresh }
}

/// Constant folding for the boolean layer and the temporal identities that
/// hold on every non-empty finite trace.
pub fn simplify(f: &Formula) -> Formula {
    use Formula::*;
    let s = simplify;
    match f {
        True | False | Var(_) => f.clone(),
        Not(g) => match s(g) {
            True => False,
            False => True,
            Not(h) => *h,
            h => Formula::not(h),
        },
        And(g, h) => match (s(g), s(h)) {
            (False, _) | (_, False) => False,
            (True, x) | (x, True) => x,
            (x, y) => Formula::and(x, y),
        },
        Or(g, h) => match (s(g), s(h)) {
            (True, _) | (_, True) => True,
            (False, x) | (x, False) => x,
            (x, y) => Formula::or(x, y),
        },
        Implies(g, h) => match (s(g), s(h)) {
            (False, _) | (_, True) => True,
            (True, x) => x,
            (x, False) => s(&Formula::not(x)),
            (x, y) => Formula::implies(x, y),
        },
        Iff(g, h) => match (s(g), s(h)) {
            (True, x) | (x, True) => x,
            (False, x) | (x, False) => s(&Formula::not(x)),
            (x, y) => Formula::iff(x, y),
        },
        Next(g) => match s(g) {
            False => False,
            x => Formula::next(x),
        },
        WeakNext(g) => match s(g) {
            True => True,
            x => Formula::weak_next(x),
        },
        Eventually(g) => match s(g) {
            x @ (True | False) => x,
            x => Formula::eventually(x),
        },
        Globally(g) => match s(g) {
            x @ (True | False) => x,
            x => Formula::globally(x),
        },
        Until(g, h) => match (s(g), s(h)) {
            (_, x @ (True | False)) => x,
            (False, y) => y,
            (True, y) => Formula::eventually(y),
            (x, y) => Formula::until(x, y),
        },
        Release(g, h) => match (s(g), s(h)) {
            (_, x @ (True | False)) => x,
            (True, y) => y,
            (False, y) => Formula::globally(y),
            (x, y) => Formula::release(x, y),
        },
        Yesterday(g) => match s(g) {
            False => False,
            x => Formula::yesterday(x),
        },
        WeakYesterday(g) => match s(g) {
            True => True,
            x => Formula::weak_yesterday(x),
        },
        Once(g) => match s(g) {
            x @ (True | False) => x,
            x => Formula::once(x),
        },
        Historically(g) => match s(g) {
            x @ (True | False) => x,
            x => Formula::historically(x),
        },
        Since(g, h) => match (s(g), s(h)) {
            (_, x @ (True | False)) => x,
            (False, y) => y,
            (x, y) => Formula::since(x, y),
        },
        Trigger(g, h) => match (s(g), s(h)) {
            (_, x @ (True | False)) => x,
            (True, y) => y,
            (x, y) => Formula::trigger(x, y),
        },
    }
}

/// Negation normal form: negations only on variables, no `->`/`<->`.
/// Uses the finite-trace dualities `!X f = N !f` and `!Y f = Z !f`.
pub fn to_nnf(f: &Formula) -> Formula {
    simplify(&nnf(f, false))
}

fn nnf(f: &Formula, neg: bool) -> Formula {
    use Formula::*;
    let pos = |g: &Formula| nnf(g, false);
    let ngt = |g: &Formula| nnf(g, true);
    let same = |g: &Formula| nnf(g, neg);
    match (f, neg) {
        (True, false) | (False, true) => True,
        (True, true) | (False, false) => False,
        (Var(_), false) => f.clone(),
        (Var(_), true) => Formula::not(f.clone()),
        (Not(g), _) => nnf(g, !neg),
        (And(g, h), false) | (Or(g, h), true) => Formula::and(same(g), same(h)),
        (Or(g, h), false) | (And(g, h), true) => Formula::or(same(g), same(h)),
        (Implies(g, h), false) => Formula::or(ngt(g), pos(h)),
        (Implies(g, h), true) => Formula::and(pos(g), ngt(h)),
        (Iff(g, h), false) => Formula::or(Formula::and(pos(g), pos(h)), Formula::and(ngt(g), ngt(h))),
        (Iff(g, h), true) => Formula::or(Formula::and(pos(g), ngt(h)), Formula::and(ngt(g), pos(h))),
        (Next(g), false) | (WeakNext(g), true) => Formula::next(same(g)),
        (WeakNext(g), false) | (Next(g), true) => Formula::weak_next(same(g)),
        (Eventually(g), false) | (Globally(g), true) => Formula::eventually(same(g)),
        (Globally(g), false) | (Eventually(g), true) => Formula::globally(same(g)),
        (Until(g, h), false) | (Release(g, h), true) => Formula::until(same(g), same(h)),
        (Release(g, h), false) | (Until(g, h), true) => Formula::release(same(g), same(h)),
        (Yesterday(g), false) | (WeakYesterday(g), true) => Formula::yesterday(same(g)),
        (WeakYesterday(g), false) | (Yesterday(g), true) => Formula::weak_yesterday(same(g)),
        (Once(g), false) | (Historically(g), true) => Formula::once(same(g)),
        (Historically(g), false) | (Once(g), true) => Formula::historically(same(g)),
        (Since(g, h), false) | (Trigger(g, h), true) => Formula::since(same(g), same(h)),
        (Trigger(g, h), false) | (Since(g, h), true) => Formula::trigger(same(g), same(h)),
    }
}

/// True when `f` is in negation normal form.
pub fn is_nnf(f: &Formula) -> bool {
    match f {
        Formula::Not(g) => matches!(**g, Formula::Var(_)),
        Formula::Implies(..) | Formula::Iff(..) => false,
        _ => f.children().into_iter().all(is_nnf),
    }
}

/// neXt normal form of a past-free formula: every `U`, `R`, `F`, `G` at the
/// top boolean layer is unfolded once so that temporal obligations only
/// appear under `X` or `N`. Inputs not in NNF are normalized first.
pub fn xnf(f: &Formula) -> Formula {
    if is_nnf(f) {
        xnf_nnf(f)
    } else {
        xnf_nnf(&to_nnf(f))
    }
}

fn xnf_nnf(f: &Formula) -> Formula {
    use Formula::*;
    debug_assert!(!f.is_past(), "xnf expects a past-free formula");
    match f {
        True | False | Var(_) | Not(_) | Next(_) | WeakNext(_) => f.clone(),
        And(g, h) => Formula::and(xnf_nnf(g), xnf_nnf(h)),
        Or(g, h) => Formula::or(xnf_nnf(g), xnf_nnf(h)),
        Eventually(g) => Formula::or(xnf_nnf(g), Formula::next(f.clone())),
        Globally(g) => Formula::and(xnf_nnf(g), Formula::weak_next(f.clone())),
        Until(g, h) => Formula::or(xnf_nnf(h), Formula::and(xnf_nnf(g), Formula::next(f.clone()))),
        Release(g, h) => Formula::and(xnf_nnf(h), Formula::or(xnf_nnf(g), Formula::weak_next(f.clone()))),
        _ => f.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_formula_with, ParseOptions};

    fn p(s: &str) -> Formula {
        parse_formula_with(s, ParseOptions { allow_reserved: true }).unwrap()
    }

    #[test]
    fn ftol_table_rows() {
        assert_eq!(ftol(&p("x")), p("x"));
        assert_eq!(ftol(&p("X a")), p("X (a & !end)"));
        assert_eq!(ftol(&p("N a")), p("X (a | end)"));
        assert_eq!(ftol(&p("F a")), p("F (a & !end)"));
        assert_eq!(ftol(&p("G a")), p("G (a | end)"));
        assert_eq!(ftol(&p("a U b")), p("a U (b & !end)"));
        assert_eq!(ftol(&p("a R b")), p("(a & !end) R (b | end)"));
        assert_eq!(ftol(&p("Y a")), p("Y a"));
        assert_eq!(ftol(&p("Y (X a)")), p("Y (X (a & !end))"));
        assert_eq!(ftol(&p("a S b")), p("a S b"));
    }

    #[test]
    fn ltlf_to_ltl_shape() {
        let axioms = "!end & (F end) & (G (end -> X end))";
        assert_eq!(ltlf_to_ltl(&p("a")), p(&format!("{axioms} & a")));
        assert_eq!(ltlf_to_ltl(&p("X a")), p(&format!("{axioms} & X (a & !end)")));
        assert_eq!(ltlf_to_ltl(&Formula::True), p(&format!("{axioms} & true")));
    }

    #[test]
    fn ftol_preserves_past_count_and_keeps_end_out_of_past() {
        let f = p("(Y (a U b)) & G (O a -> X (a S b))");
        let g = ftol(&f);
        assert_eq!(f.count_past(), g.count_past());
    }

    #[test]
    fn remove_past_base_case() {
        let r = remove_past(&p("x"));
        assert_eq!(r.future_formula, p("x"));
        assert!(r.monitors.is_empty());
        assert!(r.fresh_vars.is_empty());
    }

    #[test]
    fn remove_past_yesterday() {
        let r = remove_past(&p("Y a"));
        assert_eq!(r.future_formula, p("_past_1"));
        assert_eq!(r.monitors, vec![p("!_past_1"), p("G ((X _past_1 -> a) & (a -> N _past_1))")]);
        assert_eq!(r.fresh_vars, vec!["_past_1".to_string()]);
    }

    #[test]
    fn remove_past_since() {
        let r = remove_past(&p("a S b"));
        let unfolded = "(b | (a & _past_1))";
        assert_eq!(r.future_formula, p(unfolded));
        assert_eq!(
            r.monitors,
            vec![p("!_past_1"), p(&format!("G ((X _past_1 -> {unfolded}) & ({unfolded} -> N _past_1))"))]
        );
    }

    #[test]
    fn remove_past_shares_repeated_subformulas() {
        let r = remove_past(&p("(Y a) & G (Y a -> b)"));
        assert_eq!(r.fresh_vars.len(), 1);
        assert!(!r.conjoined().has_past());
        let r = remove_past(&p("H (a T (Z b)) | O c"));
        assert!(!r.conjoined().has_past());
        assert_eq!(remove_past(&p("H (a T (Z b)) | O c")), r);
    }

    #[test]
    fn nnf_dualities() {
        assert_eq!(to_nnf(&p("!(X a)")), p("N !a"));
        assert_eq!(to_nnf(&p("!(N a)")), p("X !a"));
        assert_eq!(to_nnf(&p("!(a U b)")), p("!a R !b"));
        assert_eq!(to_nnf(&p("!(G (a -> F b))")), p("F (a & G !b)"));
        assert_eq!(to_nnf(&p("!(Y a)")), p("Z !a"));
        assert_eq!(to_nnf(&p("!(a S b)")), p("!a T !b"));
        assert!(is_nnf(&to_nnf(&p("!((a <-> b) -> !(c R H d))"))));
    }

    #[test]
    fn xnf_examples() {
        assert_eq!(xnf(&p("a U b")), p("b | (a & X (a U b))"));
        assert_eq!(xnf(&p("G a")), p("a & N (G a)"));
        assert_eq!(xnf(&p("a")), p("a"));
        assert_eq!(xnf(&p("F a")), p("a | X (F a)"));
        assert_eq!(xnf(&p("a R b")), p("b & (a | N (a R b))"));
        assert_eq!(xnf(&p("X (a U b)")), p("X (a U b)"));
    }

    #[test]
    fn simplify_folds_constants() {
        assert_eq!(simplify(&p("a & true")), p("a"));
        assert_eq!(simplify(&p("G false | b")), p("b"));
        assert_eq!(simplify(&p("X false")), Formula::False);
        assert_eq!(simplify(&p("X true")), p("X true"));
        assert_eq!(simplify(&parse_formula("!!a").unwrap()), p("a"));
    }
}
