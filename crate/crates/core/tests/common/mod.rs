#![allow(dead_code)]

use std::path::PathBuf;

/// Truth-table satisfiability of DIMACS clauses over `1..=n_vars`.
pub fn truth_table_sat(n_vars: usize, clauses: &[Vec<i32>]) -> bool {
    (0u32..1 << n_vars).any(|m| satisfies(m, clauses))
}

pub fn satisfies(m: u32, clauses: &[Vec<i32>]) -> bool {
    clauses.iter().all(|c| c.iter().any(|&l| (m >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0)))
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn mini_suite() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("benchmarks/mini")
}

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_ltlfuc"))
}
