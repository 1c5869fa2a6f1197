mod common;

use ltlfuc::random::{cnf, rng};
use ltlfuc::sat::{CnfFormula, Lit, SatStatus, Solver};
use proptest::prelude::*;
use rand::Rng;

use common::{satisfies, truth_table_sat};

fn solver_for(n: usize, clauses: &[Vec<i32>]) -> Solver {
    let mut s = Solver::new();
    s.reserve_vars(n);
    for c in clauses {
        let lits: Vec<Lit> = c.iter().map(|&d| Lit::from_dimacs(d)).collect();
        s.add_clause(&lits);
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn agrees_with_truth_table(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, clauses) = cnf(&mut r, 4, 8);
        let mut assumptions = Vec::new();
        for v in 1..=n as i32 {
            if r.gen_bool(0.3) {
                assumptions.push(if r.gen_bool(0.5) { v } else { -v });
            }
        }
        let mut with_units = clauses.clone();
        with_units.extend(assumptions.iter().map(|&a| vec![a]));
        let expected = truth_table_sat(n, &with_units);

        let mut s = solver_for(n, &clauses);
        let lits: Vec<Lit> = assumptions.iter().map(|&d| Lit::from_dimacs(d)).collect();
        let status = s.solve(&lits);
        prop_assert_eq!(status == SatStatus::Sat, expected);
        if status == SatStatus::Sat {
            let m = (0..n).fold(0u32, |m, i| m | (u32::from(s.model()[i]) << i));
            prop_assert!(satisfies(m, &with_units));
        } else {
            let failed: Vec<i32> = s.failed_assumptions().iter().map(|l| l.to_dimacs()).collect();
            prop_assert!(failed.iter().all(|f| assumptions.contains(f)));
            let mut core = clauses.clone();
            core.extend(failed.iter().map(|&a| vec![a]));
            prop_assert!(!truth_table_sat(n, &core));
        }
    }
}

#[test]
fn incremental_reuse() {
    let mut s = solver_for(3, &[vec![1, 2], vec![-1, 3], vec![-2, 3]]);
    assert_eq!(s.solve(&[Lit::from_dimacs(-3)]), SatStatus::Unsat);
    assert_eq!(s.solve(&[]), SatStatus::Sat);
    assert!(s.model_value(ltlfuc::sat::Var(2)));
    s.add_clause(&[Lit::from_dimacs(-3)]);
    assert_eq!(s.solve(&[]), SatStatus::Unsat);
    assert!(s.failed_assumptions().is_empty());
}

#[test]
fn dimacs_round_trip() {
    let text = "p cnf 3 2\n1 -2 0\n2 3 0\n";
    let f = CnfFormula::from_dimacs(text).unwrap();
    assert_eq!(CnfFormula::from_dimacs(&f.to_dimacs()).unwrap(), f);
    assert_eq!(f.clauses.len(), 2);
}
