//! Propositional satisfiability: the CDCL solver and CNF utilities.

mod cnf;
mod solver;

pub use cnf::{solve_assuming, solve_assuming_with, tseitin, ClauseSink, CnfFormula, DimacsError, Encoder, SatOutcome};
pub use solver::{Lit, SatStatus, Solver, SolverConfig, SolverStats, Var};
