//! BDD-based core extraction: fair states of the tableau of Ψ′ and the
//! projection onto the activation variables.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::activation::{activate, ActivatedSpec, Algorithm, UcResult};
use crate::automaton::{build, cur, nxt, TransitionSystem};
use crate::bdd::{Bdd, BddError, BddManager, DEFAULT_NODE_BUDGET};
use crate::boolexpr::{ExprId, Node};
use crate::budget::Deadline;
use crate::formula::Spec;
use crate::translate::ltlf_to_ltl;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BddMode {
    /// One core; don't-care activations are left out.
    #[default]
    PickOne,
    /// Every unsatisfiable subset.
    All,
    /// A core of least cardinality.
    Minimum,
}

impl FromStr for BddMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pick_one" | "pick-one" => Ok(BddMode::PickOne),
            "all" => Ok(BddMode::All),
            "minimum" | "min" => Ok(BddMode::Minimum),
            _ => Err(format!("unknown BDD mode `{s}` (expected pick_one, all or minimum)")),
        }
    }
}

impl fmt::Display for BddMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BddMode::PickOne => "pick_one",
            BddMode::All => "all",
            BddMode::Minimum => "minimum",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SymbolicConfig {
    pub mode: BddMode,
    pub node_budget: usize,
    pub deadline: Deadline,
}

impl Default for SymbolicConfig {
    fn default() -> Self {
        SymbolicConfig { mode: BddMode::PickOne, node_budget: DEFAULT_NODE_BUDGET, deadline: Deadline::never() }
    }
}

/// The tableau compiled to BDDs. BDD variable `2i` is the current copy of
/// state variable `i` and `2i+1` its next copy.
pub struct SymbolicAutomaton {
    pub manager: BddManager,
    pub ts: TransitionSystem,
    pub init: Bdd,
    pub trans: Bdd,
    pub fairness: Vec<Bdd>,
    next_vars: BTreeSet<u32>,
    to_next: HashMap<u32, u32>,
}

impl SymbolicAutomaton {
    pub fn compile(ts: TransitionSystem, node_budget: usize, deadline: Deadline) -> Result<Self, BddError> {
        let mut manager = BddManager::with_budget(node_budget);
        manager.set_deadline(deadline);
        let mut memo = HashMap::new();
        let init = expr_to_bdd(&ts, &mut manager, ts.init, &mut memo)?;
        let mut trans = manager.constant(true);
        for &t in &ts.trans {
            let b = expr_to_bdd(&ts, &mut manager, t, &mut memo)?;
            trans = manager.and(trans, b)?;
        }
        let fairness = ts
            .fairness
            .iter()
            .map(|&f| expr_to_bdd(&ts, &mut manager, f, &mut memo))
            .collect::<Result<Vec<_>, _>>()?;
        let n = ts.num_vars();
        Ok(SymbolicAutomaton {
            manager,
            init,
            trans,
            fairness,
            next_vars: (0..n).map(nxt).collect(),
            to_next: (0..n).map(|i| (cur(i), nxt(i))).collect(),
            ts,
        })
    }

    pub fn build(f: &crate::formula::Formula, letters_first: &[String], cfg: &SymbolicConfig) -> Result<Self, BddError> {
        SymbolicAutomaton::compile(build(f, letters_first), cfg.node_budget, cfg.deadline)
    }

    /// States with a successor in `g`.
    pub fn ex(&mut self, g: Bdd) -> Result<Bdd, BddError> {
        let gp = self.manager.rename(g, &self.to_next)?;
        self.manager.and_exists(self.trans, gp, &self.next_vars)
    }

    /// E[z U w]
    fn eu(&mut self, z: Bdd, w: Bdd) -> Result<Bdd, BddError> {
        let mut y = w;
        loop {
            let pre = self.ex(y)?;
            let step = self.manager.and(z, pre)?;
            let next = self.manager.or(w, step)?;
            if next == y {
                return Ok(y);
            }
            y = next;
        }
    }

    /// States from which some path meets every fairness condition
    /// infinitely often.
    pub fn fair_states(&mut self) -> Result<Bdd, BddError> {
        let mut z = self.manager.constant(true);
        loop {
            let mut next = z;
            if self.fairness.is_empty() {
                let pre = self.ex(z)?;
                next = self.manager.and(next, pre)?;
            }
            for fc in self.fairness.clone() {
                let target = self.manager.and(z, fc)?;
                let reach = self.eu(z, target)?;
                let pre = self.ex(reach)?;
                next = self.manager.and(next, pre)?;
            }
            if next == z {
                return Ok(z);
            }
            z = next;
        }
    }

    /// init ∧ fair: the initial states of accepting paths.
    pub fn accepting_initial(&mut self) -> Result<Bdd, BddError> {
        let fair = self.fair_states()?;
        self.manager.and(self.init, fair)
    }

    /// BDD variable of a letter's current copy.
    pub fn letter_var(&self, name: &str) -> Option<u32> {
        self.ts.letter(name).map(cur)
    }

    /// Current copies of all variables except `keep`.
    pub fn current_vars_except(&self, keep: &BTreeSet<u32>) -> BTreeSet<u32> {
        (0..self.ts.num_vars()).map(cur).filter(|v| !keep.contains(v)).collect()
    }
}

fn expr_to_bdd(
    ts: &TransitionSystem,
    m: &mut BddManager,
    e: ExprId,
    memo: &mut HashMap<ExprId, Bdd>,
) -> Result<Bdd, BddError> {
    if let Some(&b) = memo.get(&e) {
        return Ok(b);
    }
    let b = match ts.arena.node(e) {
        Node::True => m.constant(true),
        Node::False => m.constant(false),
        Node::Atom(a) => m.var(a)?,
        Node::Not(x) => {
            let x = expr_to_bdd(ts, m, x, memo)?;
            m.not(x)?
        }
        Node::And(x, y) => {
            let x = expr_to_bdd(ts, m, x, memo)?;
            let y = expr_to_bdd(ts, m, y, memo)?;
            m.and(x, y)?
        }
        Node::Or(x, y) => {
            let x = expr_to_bdd(ts, m, x, memo)?;
            let y = expr_to_bdd(ts, m, y, memo)?;
            m.or(x, y)?
        }
        Node::Iff(x, y) => {
            let x = expr_to_bdd(ts, m, x, memo)?;
            let y = expr_to_bdd(ts, m, y, memo)?;
            m.iff(x, y)?
        }
    };
    memo.insert(e, b);
    Ok(b)
}

/// The activated automaton together with the projection onto A.
pub struct ActivationAnalysis {
    pub activated: ActivatedSpec,
    pub automaton: SymbolicAutomaton,
    /// BDD variables of the activation letters, in binding order.
    pub act_vars: Vec<u32>,
    /// ∃V.∃V_Ψ′. ⟦Ψ′⟧ over the activation variables.
    pub satisfiable: Bdd,
    /// The complement: activation assignments naming unsatisfiable subsets.
    pub ucs: Bdd,
}

impl ActivationAnalysis {
    pub fn run(s: &Spec, cfg: &SymbolicConfig) -> Result<Self, AnalysisError> {
        let activated = activate(s).map_err(|e| AnalysisError::Input(e.to_string()))?;
        let psi_prime = ltlf_to_ltl(&activated.psi);
        let acts = activated.activation_vars();
        let mut automaton = SymbolicAutomaton::build(&psi_prime, &acts, cfg)?;
        let act_vars: Vec<u32> =
            acts.iter().map(|a| automaton.letter_var(a).expect("activation letters are registered first")).collect();
        let keep: BTreeSet<u32> = act_vars.iter().copied().collect();
        let accepting = automaton.accepting_initial()?;
        let others = automaton.current_vars_except(&keep);
        let satisfiable = automaton.manager.exists(&others, accepting)?;
        let ucs = automaton.manager.not(satisfiable)?;
        Ok(ActivationAnalysis { activated, automaton, act_vars, satisfiable, ucs })
    }

    fn labels_of(&self, cube: &crate::bdd::Cube) -> BTreeSet<String> {
        self.act_vars
            .iter()
            .zip(&self.activated.bindings)
            .filter(|(v, _)| cube.get(v) == Some(&true))
            .map(|(_, (_, label))| label.clone())
            .collect()
    }

    fn act_set(&self) -> BTreeSet<u32> {
        self.act_vars.iter().copied().collect()
    }

    /// Every unsatisfiable subset of Γ, as label sets.
    pub fn unsat_subsets(&mut self) -> Result<BTreeSet<BTreeSet<String>>, BddError> {
        let set = self.act_set();
        let cubes = self.automaton.manager.all_sat_cubes(self.ucs, &set)?;
        Ok(cubes.iter().map(|c| self.labels_of(c)).collect())
    }

    /// Every satisfiable subset of Γ, as label sets.
    pub fn sat_subsets(&mut self) -> Result<BTreeSet<BTreeSet<String>>, BddError> {
        let set = self.act_set();
        let cubes = self.automaton.manager.all_sat_cubes(self.satisfiable, &set)?;
        Ok(cubes.iter().map(|c| self.labels_of(c)).collect())
    }

    /// One core: a satisfying path of UCS with don't-cares set to false.
    pub fn pick_one(&self) -> Option<BTreeSet<String>> {
        let cube = self.automaton.manager.pick_one_cube(self.ucs).ok()?;
        Some(self.labels_of(&cube))
    }

    pub fn minimum(&self) -> Option<BTreeSet<String>> {
        let (_, cube) = self.automaton.manager.min_true_cube(self.ucs, &self.act_set()).ok()?;
        Some(self.labels_of(&cube))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Bdd(#[from] BddError),
}

/// Result of the BDD engine; `all_cores` is filled in `All` mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicResult {
    pub result: UcResult,
    pub all_cores: Option<Vec<BTreeSet<String>>>,
}

pub fn algorithm1_uc(s: &Spec, cfg: &SymbolicConfig) -> SymbolicResult {
    let start = Instant::now();
    let outcome = run(s, cfg);
    let elapsed = start.elapsed();
    match outcome {
        Ok((r, all)) => SymbolicResult { result: r.with_elapsed(elapsed), all_cores: all },
        Err(e) => SymbolicResult { result: UcResult::unknown(Algorithm::Bdd, e.to_string()).with_elapsed(elapsed), all_cores: None },
    }
}

type RunOutcome = (UcResult, Option<Vec<BTreeSet<String>>>);

fn run(s: &Spec, cfg: &SymbolicConfig) -> Result<RunOutcome, AnalysisError> {
    let mut a = ActivationAnalysis::run(s, cfg)?;
    if a.ucs.is_false() {
        return Ok((UcResult::sat(Algorithm::Bdd, None), None));
    }
    let core = match cfg.mode {
        BddMode::PickOne | BddMode::All => a.pick_one(),
        BddMode::Minimum => a.minimum(),
    }
    .expect("UCS is not empty");
    let all = match cfg.mode {
        BddMode::All => Some(a.unsat_subsets()?.into_iter().collect()),
        _ => None,
    };
    Ok((UcResult::unsat(Algorithm::Bdd, core), all))
}
