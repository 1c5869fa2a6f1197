//! LTLf abstract syntax with the full future and past operator set.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Name of the end-of-trace marker introduced by the LTLf to LTL translation.
pub const END_VAR: &str = "end";
/// Prefix of activation variables guarding the conjuncts of a spec.
pub const ACTIVATION_PREFIX: &str = "_act_";
/// Prefix of the history variables introduced by past elimination.
pub const PAST_PREFIX: &str = "_past_";

/// Returns true for identifiers that user formulas may not use.
pub fn is_reserved(name: &str) -> bool {
    name == END_VAR || name.starts_with(ACTIVATION_PREFIX) || name.starts_with(PAST_PREFIX)
}

/// A formula of LTLf with past operators.
///
/// The same node set doubles as the LTL (infinite-trace) representation
/// produced by the translations module; only the interpretation differs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Formula {
    True,
    False,
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// Strong next.
    Next(Box<Formula>),
    /// Weak next: true at the last state.
    WeakNext(Box<Formula>),
    Eventually(Box<Formula>),
    Globally(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    /// Strong yesterday: false at the first state.
    Yesterday(Box<Formula>),
    /// Weak yesterday: true at the first state.
    WeakYesterday(Box<Formula>),
    Once(Box<Formula>),
    Historically(Box<Formula>),
    Since(Box<Formula>, Box<Formula>),
    Trigger(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(f: Formula, g: Formula) -> Formula {
        Formula::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: Formula, g: Formula) -> Formula {
        Formula::Or(Box::new(f), Box::new(g))
    }

    pub fn implies(f: Formula, g: Formula) -> Formula {
        Formula::Implies(Box::new(f), Box::new(g))
    }

    pub fn iff(f: Formula, g: Formula) -> Formula {
        Formula::Iff(Box::new(f), Box::new(g))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn weak_next(f: Formula) -> Formula {
        Formula::WeakNext(Box::new(f))
    }

    pub fn eventually(f: Formula) -> Formula {
        Formula::Eventually(Box::new(f))
    }

    pub fn globally(f: Formula) -> Formula {
        Formula::Globally(Box::new(f))
    }

    pub fn until(f: Formula, g: Formula) -> Formula {
        Formula::Until(Box::new(f), Box::new(g))
    }

    pub fn release(f: Formula, g: Formula) -> Formula {
        Formula::Release(Box::new(f), Box::new(g))
    }

    pub fn yesterday(f: Formula) -> Formula {
        Formula::Yesterday(Box::new(f))
    }

    pub fn weak_yesterday(f: Formula) -> Formula {
        Formula::WeakYesterday(Box::new(f))
    }

    pub fn once(f: Formula) -> Formula {
        Formula::Once(Box::new(f))
    }

    pub fn historically(f: Formula) -> Formula {
        Formula::Historically(Box::new(f))
    }

    pub fn since(f: Formula, g: Formula) -> Formula {
        Formula::Since(Box::new(f), Box::new(g))
    }

    pub fn trigger(f: Formula, g: Formula) -> Formula {
        Formula::Trigger(Box::new(f), Box::new(g))
    }

    /// Conjunction of all items; `true` for an empty iterator.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let mut acc = match items.pop() {
            Some(f) => f,
            None => return Formula::True,
        };
        while let Some(f) = items.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// Disjunction of all items; `false` for an empty iterator.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let mut acc = match items.pop() {
            Some(f) => f,
            None => return Formula::False,
        };
        while let Some(f) = items.pop() {
            acc = Formula::or(f, acc);
        }
        acc
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            True | False | Var(_) => vec![],
            Not(f) | Next(f) | WeakNext(f) | Eventually(f) | Globally(f) | Yesterday(f)
            | WeakYesterday(f) | Once(f) | Historically(f) => vec![f],
            And(f, g) | Or(f, g) | Implies(f, g) | Iff(f, g) | Until(f, g) | Release(f, g)
            | Since(f, g) | Trigger(f, g) => vec![f, g],
        }
    }

    /// Free variables in first-occurrence order (left to right, depth first).
    pub fn vars_in_order(&self) -> Vec<String> {
        fn walk(f: &Formula, seen: &mut BTreeSet<String>, out: &mut Vec<String>) {
            if let Formula::Var(v) = f {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
            for c in f.children() {
                walk(c, seen, out);
            }
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        walk(self, &mut seen, &mut out);
        out
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.vars_in_order().into_iter().collect()
    }

    pub fn is_past(&self) -> bool {
        matches!(
            self,
            Formula::Yesterday(_)
                | Formula::WeakYesterday(_)
                | Formula::Once(_)
                | Formula::Historically(_)
                | Formula::Since(..)
                | Formula::Trigger(..)
        )
    }

    /// True when some subformula is rooted in a past operator.
    pub fn has_past(&self) -> bool {
        self.is_past() || self.children().into_iter().any(Formula::has_past)
    }

    pub fn count_past(&self) -> usize {
        usize::from(self.is_past()) + self.children().into_iter().map(Formula::count_past).sum::<usize>()
    }

    /// Nesting depth of temporal operators.
    pub fn temporal_depth(&self) -> usize {
        let below = self.children().into_iter().map(Formula::temporal_depth).max().unwrap_or(0);
        match self {
            Formula::True
            | Formula::False
            | Formula::Var(_)
            | Formula::Not(_)
            | Formula::And(..)
            | Formula::Or(..)
            | Formula::Implies(..)
            | Formula::Iff(..) => below,
            _ => below + 1,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Splits nested top-level conjunctions into a flat list.
    pub fn top_level_conjuncts(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::And(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
                other => out.push(other.clone()),
            }
        }
        out
    }
}

fn write_unary(f: &mut fmt::Formatter<'_>, op: &str, arg: &Formula) -> fmt::Result {
    write!(f, "({op} {arg})")
}

fn write_binary(f: &mut fmt::Formatter<'_>, op: &str, l: &Formula, r: &Formula) -> fmt::Result {
    write!(f, "({l} {op} {r})")
}

/// Fully parenthesized rendering in the `.ltlf` text syntax.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Var(v) => write!(f, "{v}"),
            Not(a) => write_unary(f, "!", a),
            Next(a) => write_unary(f, "X", a),
            WeakNext(a) => write_unary(f, "N", a),
            Eventually(a) => write_unary(f, "F", a),
            Globally(a) => write_unary(f, "G", a),
            Yesterday(a) => write_unary(f, "Y", a),
            WeakYesterday(a) => write_unary(f, "Z", a),
            Once(a) => write_unary(f, "O", a),
            Historically(a) => write_unary(f, "H", a),
            And(a, b) => write_binary(f, "&", a, b),
            Or(a, b) => write_binary(f, "|", a, b),
            Implies(a, b) => write_binary(f, "->", a, b),
            Iff(a, b) => write_binary(f, "<->", a, b),
            Until(a, b) => write_binary(f, "U", a, b),
            Release(a, b) => write_binary(f, "R", a, b),
            Since(a, b) => write_binary(f, "S", a, b),
            Trigger(a, b) => write_binary(f, "T", a, b),
        }
    }
}

/// Renders a formula in the text syntax accepted by [`crate::parser::parse_formula`].
pub fn print(f: &Formula) -> String {
    f.to_string()
}

/// Variables of a spec with stable indices assigned in first-occurrence order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut a = Alphabet::new();
        for n in names {
            a.insert(n.into());
        }
        a
    }

    /// Adds `name` if absent and returns its index.
    pub fn insert(&mut self, name: String) -> usize {
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let i = self.names.len();
        self.index.insert(name.clone(), i);
        self.names.push(name);
        i
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

/// A named, ordered set of conjuncts Γ whose meaning is their conjunction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spec {
    pub name: String,
    pub conjuncts: Vec<(String, Formula)>,
    pub alphabet: Alphabet,
}

impl Spec {
    /// Builds a spec labelling the conjuncts `c1..cN` in order.
    pub fn from_conjuncts(name: impl Into<String>, conjuncts: Vec<Formula>) -> Spec {
        let labelled = conjuncts
            .into_iter()
            .enumerate()
            .map(|(i, f)| (format!("c{}", i + 1), f))
            .collect();
        Spec::from_labelled(name, labelled)
    }

    pub fn from_labelled(name: impl Into<String>, conjuncts: Vec<(String, Formula)>) -> Spec {
        let mut alphabet = Alphabet::new();
        for (_, f) in &conjuncts {
            for v in f.vars_in_order() {
                alphabet.insert(v);
            }
        }
        Spec { name: name.into(), conjuncts, alphabet }
    }

    /// The conjunction of all conjuncts.
    pub fn formula(&self) -> Formula {
        Formula::conjunction(self.conjuncts.iter().map(|(_, f)| f.clone()))
    }

    pub fn labels(&self) -> Vec<String> {
        self.conjuncts.iter().map(|(l, _)| l.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.conjuncts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conjuncts.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&Formula> {
        self.conjuncts.iter().find(|(l, _)| l == label).map(|(_, f)| f)
    }

    /// The sub-spec made of the conjuncts whose labels are in `labels`, in spec order.
    pub fn restrict<'a, I>(&self, labels: I) -> Spec
    where
        I: IntoIterator<Item = &'a String>,
    {
        let keep: BTreeSet<&String> = labels.into_iter().collect();
        let conjuncts = self.conjuncts.iter().filter(|(l, _)| keep.contains(l)).cloned().collect();
        Spec::from_labelled(self.name.clone(), conjuncts)
    }
}

impl fmt::Display for Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conjuncts.is_empty() {
            return write!(f, "true");
        }
        for (i, (_, c)) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Formula {
        Formula::var("a")
    }
    fn b() -> Formula {
        Formula::var("b")
    }

    #[test]
    fn printing() {
        assert_eq!(print(&Formula::globally(a())), "(G a)");
        assert_eq!(print(&Formula::since(a(), b())), "(a S b)");
        assert_eq!(print(&Formula::not(Formula::yesterday(a()))), "(! (Y a))");
        assert_eq!(print(&a()), "a");
    }

    #[test]
    fn free_vars_examples() {
        let f = Formula::globally(Formula::implies(a(), Formula::next(b())));
        assert_eq!(f.free_vars(), ["a", "b"].iter().map(|s| s.to_string()).collect());
        assert!(Formula::True.free_vars().is_empty());
        let g = Formula::and(Formula::since(a(), b()), Formula::yesterday(a()));
        assert_eq!(g.free_vars().len(), 2);
    }

    #[test]
    fn conjunct_split_flattens_nested_ands() {
        let f = Formula::and(Formula::and(a(), b()), Formula::globally(a()));
        assert_eq!(f.top_level_conjuncts(), vec![a(), b(), Formula::globally(a())]);
    }

    #[test]
    fn spec_alphabet_is_first_occurrence_ordered() {
        let s = Spec::from_conjuncts("s", vec![Formula::or(b(), a()), Formula::var("c"), a()]);
        assert_eq!(s.alphabet.names(), &["b", "a", "c"]);
        assert_eq!(s.labels(), vec!["c1", "c2", "c3"]);
    }

    #[test]
    fn temporal_depth_counts_nesting() {
        let f = Formula::globally(Formula::implies(a(), Formula::next(b())));
        assert_eq!(f.temporal_depth(), 2);
        assert_eq!(Formula::and(a(), b()).temporal_depth(), 0);
    }
}
