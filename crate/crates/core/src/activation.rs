//! Activation variables and the common result type of every algorithm.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{is_reserved, Alphabet, Formula, Spec, ACTIVATION_PREFIX};
use crate::semantics::Trace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActivationError {
    #[error("conjunct `{label}` uses reserved identifier `{name}`")]
    ReservedName { label: String, name: String },
    #[error("duplicate conjunct label `{0}`")]
    DuplicateLabel(String),
}

/// Ψ = ⋀ᵢ (Aᵢ → φᵢ) together with the activation/label bindings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivatedSpec {
    pub psi: Formula,
    /// `(activation variable, conjunct label)` in conjunct order.
    pub bindings: Vec<(String, String)>,
    pub alphabet_ext: Alphabet,
}

impl ActivatedSpec {
    pub fn activation_vars(&self) -> Vec<String> {
        self.bindings.iter().map(|(a, _)| a.clone()).collect()
    }

    /// The guarded conjuncts `Aᵢ → φᵢ`, in order.
    pub fn guarded(&self) -> Vec<Formula> {
        if self.bindings.is_empty() {
            return vec![];
        }
        self.psi.top_level_conjuncts()
    }

    /// Ψ ∧ ⋀ Aᵢ.
    pub fn with_all_active(&self) -> Formula {
        Formula::conjunction(
            std::iter::once(self.psi.clone()).chain(self.activation_vars().into_iter().map(Formula::Var)),
        )
    }

    pub fn label_of(&self, var: &str) -> Option<&str> {
        self.bindings.iter().find(|(a, _)| a == var).map(|(_, l)| l.as_str())
    }
}

pub fn activation_var(index: usize) -> String {
    format!("{ACTIVATION_PREFIX}{index}")
}

pub fn activate(s: &Spec) -> Result<ActivatedSpec, ActivationError> {
    let mut seen = BTreeSet::new();
    let mut guarded = Vec::with_capacity(s.len());
    let mut bindings = Vec::with_capacity(s.len());
    for (i, (label, f)) in s.conjuncts.iter().enumerate() {
        if !seen.insert(label.clone()) {
            return Err(ActivationError::DuplicateLabel(label.clone()));
        }
        if let Some(name) = f.free_vars().into_iter().find(|v| is_reserved(v)) {
            return Err(ActivationError::ReservedName { label: label.clone(), name });
        }
        let a = activation_var(i + 1);
        guarded.push(Formula::implies(Formula::var(a.clone()), f.clone()));
        bindings.push((a, label.clone()));
    }
    let mut alphabet_ext = Alphabet::from_names(bindings.iter().map(|(a, _)| a.clone()));
    for v in s.alphabet.iter() {
        alphabet_ext.insert(v.to_string());
    }
    Ok(ActivatedSpec { psi: Formula::conjunction(guarded), bindings, alphabet_ext })
}

/// Labels whose activation variable is among `vars`; other names are ignored.
pub fn restrict_core<'a, I>(a: &ActivatedSpec, vars: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = &'a str>,
{
    vars.into_iter().filter_map(|v| a.label_of(v)).map(str::to_string).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
    ReducedToFalse,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::Unknown => "UNKNOWN",
            Status::ReducedToFalse => "REDUCED_TO_FALSE",
        }
    }

    /// Whether the status is an actual verdict on satisfiability.
    pub fn is_decided(self) -> bool {
        matches!(self, Status::Sat | Status::Unsat)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Bdd,
    Bmc,
    Native,
    Trp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Bdd, Algorithm::Bmc, Algorithm::Native, Algorithm::Trp];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Bdd => "bdd",
            Algorithm::Bmc => "bmc",
            Algorithm::Native => "native",
            Algorithm::Trp => "trp",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected bdd, bmc, native or trp)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcResult {
    pub status: Status,
    /// Present iff `status == Unsat`.
    pub core: Option<BTreeSet<String>>,
    pub witness: Option<Trace>,
    #[serde(with = "secs")]
    pub elapsed: Duration,
    pub algorithm: Algorithm,
    /// Explanation for UNKNOWN outcomes.
    pub reason: Option<String>,
    /// Last bound explored by the bounded engine.
    pub k_reached: Option<usize>,
}

impl UcResult {
    pub fn sat(algorithm: Algorithm, witness: Option<Trace>) -> Self {
        UcResult::new(algorithm, Status::Sat, None, witness)
    }

    pub fn unsat(algorithm: Algorithm, core: BTreeSet<String>) -> Self {
        UcResult::new(algorithm, Status::Unsat, Some(core), None)
    }

    pub fn unknown(algorithm: Algorithm, reason: impl Into<String>) -> Self {
        let mut r = UcResult::new(algorithm, Status::Unknown, None, None);
        r.reason = Some(reason.into());
        r
    }

    pub fn reduced_to_false(algorithm: Algorithm) -> Self {
        UcResult::new(algorithm, Status::ReducedToFalse, None, None)
    }

    fn new(algorithm: Algorithm, status: Status, core: Option<BTreeSet<String>>, witness: Option<Trace>) -> Self {
        UcResult { status, core, witness, elapsed: Duration::ZERO, algorithm, reason: None, k_reached: None }
    }

    pub fn with_elapsed(mut self, elapsed: Duration) -> Self {
        self.elapsed = elapsed;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k_reached = Some(k);
        self
    }

    pub fn core_size(&self) -> Option<usize> {
        self.core.as_ref().map(BTreeSet::len)
    }
}

mod secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        Duration::try_from_secs_f64(v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_spec;

    #[test]
    fn activation_shape() {
        let s = parse_spec("a & !a", "s").unwrap();
        let a = activate(&s).unwrap();
        assert_eq!(a.psi.to_string(), "((_act_1 -> a) & (_act_2 -> (! a)))");
        assert_eq!(a.bindings[1], ("_act_2".to_string(), "c2".to_string()));
        assert_eq!(a.guarded().len(), 2);
        assert!(a.alphabet_ext.contains("a"));

        let empty = activate(&Spec::from_conjuncts("e", vec![])).unwrap();
        assert_eq!(empty.psi, Formula::True);
        assert!(empty.guarded().is_empty());

        let g = activate(&parse_spec("G a", "s").unwrap()).unwrap();
        assert_eq!(g.psi.to_string(), "(_act_1 -> (G a))");
    }

    #[test]
    fn reserved_collision() {
        let s = Spec::from_conjuncts("s", vec![Formula::var("_act_1")]);
        assert!(matches!(activate(&s), Err(ActivationError::ReservedName { .. })));
    }

    #[test]
    fn restrict_examples() {
        let a = activate(&parse_spec("a & b & c", "s").unwrap()).unwrap();
        let set = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<BTreeSet<_>>();
        assert_eq!(restrict_core(&a, ["_act_1", "_act_2"]), set(&["c1", "c2"]));
        assert_eq!(restrict_core(&a, ["_act_2", "end"]), set(&["c2"]));
        assert!(restrict_core(&a, []).is_empty());
    }

    #[test]
    fn result_serializes() {
        let r = UcResult::unsat(Algorithm::Bdd, BTreeSet::from(["c1".to_string()]));
        let j = serde_json::to_value(&r).unwrap();
        assert_eq!(j["status"], "UNSAT");
        assert_eq!(j["algorithm"], "bdd");
        assert_eq!(j["core"][0], "c1");
    }
}
