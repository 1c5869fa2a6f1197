//! Finite-trace semantics.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("position {index} out of range for trace of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("variable `{0}` is not assigned by the trace")]
    UnknownVariable(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// A finite sequence of total assignments over a fixed alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    alphabet: Vec<String>,
    states: Vec<Vec<bool>>,
}

impl Trace {
    pub fn new(alphabet: Vec<String>) -> Self {
        Trace { alphabet, states: Vec::new() }
    }

    /// Builds a trace from per-state name/value maps. Variables missing from
    /// a state are false.
    pub fn from_maps(alphabet: Vec<String>, states: &[BTreeMap<String, bool>]) -> Self {
        let mut t = Trace::new(alphabet);
        for s in states {
            let row = t.alphabet.iter().map(|v| s.get(v).copied().unwrap_or(false)).collect();
            t.states.push(row);
        }
        t
    }

    pub fn push_state(&mut self, values: Vec<bool>) {
        assert_eq!(values.len(), self.alphabet.len(), "state must assign every variable");
        self.states.push(values);
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn value(&self, step: usize, var: &str) -> Option<bool> {
        let i = self.alphabet.iter().position(|v| v == var)?;
        self.states.get(step).map(|s| s[i])
    }

    pub fn state(&self, step: usize) -> BTreeMap<String, bool> {
        self.alphabet.iter().cloned().zip(self.states[step].iter().copied()).collect()
    }

    /// Restricts the trace to the given variables; unknown ones read as false.
    pub fn project(&self, vars: &[String]) -> Trace {
        let cols: Vec<Option<usize>> =
            vars.iter().map(|v| self.alphabet.iter().position(|a| a == v)).collect();
        let states = self
            .states
            .iter()
            .map(|s| cols.iter().map(|c| c.map(|i| s[i]).unwrap_or(false)).collect())
            .collect();
        Trace { alphabet: vars.to_vec(), states }
    }
}

/// One state per line as `var=0|1` pairs separated by `;`.
impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.states.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let pairs: Vec<String> = self
                .alphabet
                .iter()
                .zip(s)
                .map(|(v, b)| format!("{v}={}", u8::from(*b)))
                .collect();
            write!(f, "{}", pairs.join(";"))?;
        }
        Ok(())
    }
}

impl FromStr for Trace {
    type Err = TraceError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut alphabet: Option<Vec<String>> = None;
        let mut states = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| TraceError::Format { line: n + 1, message };
            let mut names = Vec::new();
            let mut values = Vec::new();
            for pair in line.split(';').map(str::trim).filter(|p| !p.is_empty()) {
                let (name, value) = pair.split_once('=').ok_or_else(|| err(format!("expected var=0|1, got `{pair}`")))?;
                let value = match value.trim() {
                    "0" => false,
                    "1" => true,
                    other => return Err(err(format!("bad value `{other}`"))),
                };
                names.push(name.trim().to_string());
                values.push(value);
            }
            match &alphabet {
                None => alphabet = Some(names),
                Some(a) => {
                    if *a != names {
                        return Err(err("state does not assign the same variables as the first".into()));
                    }
                }
            }
            states.push(values);
        }
        Ok(Trace { alphabet: alphabet.unwrap_or_default(), states })
    }
}

/// Truth value of `f` at every position of `t`.
pub fn eval_all(f: &Formula, t: &Trace) -> Result<Vec<bool>, TraceError> {
    use Formula::*;
    let n = t.len();
    let un = |g: &Formula| eval_all(g, t);
    Ok(match f {
        True => vec![true; n],
        False => vec![false; n],
        Var(v) => {
            let i = t.alphabet.iter().position(|a| a == v).ok_or_else(|| TraceError::UnknownVariable(v.clone()))?;
            t.states.iter().map(|s| s[i]).collect()
        }
        Not(g) => un(g)?.into_iter().map(|b| !b).collect(),
        And(g, h) => zip(un(g)?, un(h)?, |x, y| x && y),
        Or(g, h) => zip(un(g)?, un(h)?, |x, y| x || y),
        Implies(g, h) => zip(un(g)?, un(h)?, |x, y| !x || y),
        Iff(g, h) => zip(un(g)?, un(h)?, |x, y| x == y),
        Next(g) => {
            let v = un(g)?;
            (0..n).map(|i| i + 1 < n && v[i + 1]).collect()
        }
        WeakNext(g) => {
            let v = un(g)?;
            (0..n).map(|i| i + 1 >= n || v[i + 1]).collect()
        }
        Eventually(g) => {
            let v = un(g)?;
            let mut out = vec![false; n];
            let mut acc = false;
            for i in (0..n).rev() {
                acc = acc || v[i];
                out[i] = acc;
            }
            out
        }
        Globally(g) => {
            let v = un(g)?;
            let mut out = vec![false; n];
            let mut acc = true;
            for i in (0..n).rev() {
                acc = acc && v[i];
                out[i] = acc;
            }
            out
        }
        Until(g, h) => {
            let (a, b) = (un(g)?, un(h)?);
            let mut out = vec![false; n];
            let mut acc = false;
            for i in (0..n).rev() {
                acc = b[i] || (a[i] && acc);
                out[i] = acc;
            }
            out
        }
        Release(g, h) => {
            // g R h: h holds up to and including the first g, or forever.
            let (a, b) = (un(g)?, un(h)?);
            let mut out = vec![false; n];
            let mut acc = true;
            for i in (0..n).rev() {
                acc = b[i] && (a[i] || acc);
                out[i] = acc;
            }
            out
        }
        Yesterday(g) => {
            let v = un(g)?;
            (0..n).map(|i| i >= 1 && v[i - 1]).collect()
        }
        WeakYesterday(g) => {
            let v = un(g)?;
            (0..n).map(|i| i == 0 || v[i - 1]).collect()
        }
        Once(g) => {
            let v = un(g)?;
            let mut acc = false;
            v.into_iter()
                .map(|b| {
                    acc = acc || b;
                    acc
                })
                .collect()
        }
        Historically(g) => {
            let v = un(g)?;
            let mut acc = true;
            v.into_iter()
                .map(|b| {
                    acc = acc && b;
                    acc
                })
                .collect()
        }
        Since(g, h) => {
            let (a, b) = (un(g)?, un(h)?);
            let mut acc = false;
            (0..n)
                .map(|i| {
                    acc = b[i] || (a[i] && acc);
                    acc
                })
                .collect()
        }
        Trigger(g, h) => {
            // every earlier-or-current h-failure is covered by a later g.
            let (a, b) = (un(g)?, un(h)?);
            let mut acc = true;
            (0..n)
                .map(|i| {
                    acc = b[i] && (a[i] || acc);
                    acc
                })
                .collect()
        }
    })
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// `π, i ⊨ f`.
pub fn eval(f: &Formula, t: &Trace, i: usize) -> Result<bool, TraceError> {
    if i >= t.len() {
        return Err(TraceError::IndexOutOfRange { index: i, len: t.len() });
    }
    Ok(eval_all(f, t)?[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn trace(text: &str) -> Trace {
        text.parse().unwrap()
    }

    fn pi1() -> Trace {
        trace("a=0;b=1\na=1;b=0\na=1;b=1\na=1;b=1")
    }

    fn pi2() -> Trace {
        trace("a=0;b=1\na=1;b=0\na=1;b=1\na=1;b=0")
    }

    #[test]
    fn weak_and_strong_next_examples() {
        let weak = parse_formula("G (a -> N b)").unwrap();
        let strong = parse_formula("G (a -> X b)").unwrap();
        assert!(eval(&weak, &pi1(), 0).unwrap());
        assert!(!eval(&weak, &pi2(), 0).unwrap());
        assert!(!eval(&strong, &pi1(), 0).unwrap());
        assert!(!eval(&strong, &pi2(), 0).unwrap());
    }

    #[test]
    fn first_state_rules_for_yesterday() {
        let t = trace("a=1\na=1");
        assert!(eval(&parse_formula("Z a").unwrap(), &t, 0).unwrap());
        assert!(!eval(&parse_formula("Y a").unwrap(), &t, 0).unwrap());
        assert!(eval(&parse_formula("Y a").unwrap(), &t, 1).unwrap());
        let t = trace("a=0");
        assert!(eval(&parse_formula("Z a").unwrap(), &t, 0).unwrap());
    }

    #[test]
    fn until_release_since_trigger() {
        let t = trace("a=1;b=0\na=1;b=0\na=0;b=1");
        assert!(eval(&parse_formula("a U b").unwrap(), &t, 0).unwrap());
        assert!(!eval(&parse_formula("b U a").unwrap(), &t, 2).unwrap());
        // b R a: a must hold until (and including) the first b, or to the end
        assert!(!eval(&parse_formula("b R a").unwrap(), &t, 0).unwrap());
        assert!(eval(&parse_formula("a R a").unwrap(), &t, 0).unwrap());
        let t = trace("a=0;b=1\na=1;b=0\na=1;b=0");
        assert!(eval(&parse_formula("a S b").unwrap(), &t, 2).unwrap());
        assert!(!eval(&parse_formula("b S a").unwrap(), &t, 0).unwrap());
        assert!(eval(&parse_formula("O b").unwrap(), &t, 2).unwrap());
        assert!(!eval(&parse_formula("H a").unwrap(), &t, 2).unwrap());
        assert!(eval(&parse_formula("a T a").unwrap(), &t, 2).unwrap());
    }

    #[test]
    fn errors() {
        let t = trace("a=1");
        assert!(matches!(eval(&Formula::var("a"), &t, 1), Err(TraceError::IndexOutOfRange { .. })));
        assert!(matches!(eval(&Formula::var("q"), &t, 0), Err(TraceError::UnknownVariable(_))));
        assert!("a=2".parse::<Trace>().is_err());
        assert!("a=1\nb=1".parse::<Trace>().is_err());
    }

    #[test]
    fn trace_text_round_trip() {
        let t = pi1();
        let again: Trace = t.to_string().parse().unwrap();
        assert_eq!(t, again);
        assert_eq!(t.len(), 4);
        assert_eq!(t.value(1, "a"), Some(true));
    }
}
