//! Incremental solving under assumptions with failed-assumption cores.

use ltlfuc::sat::{SatStatus, Solver};

fn main() {
    let mut s = Solver::new();
    let (x, y, z) = (s.new_var(), s.new_var(), s.new_var());
    let (sel1, sel2, sel3) = (s.new_var(), s.new_var(), s.new_var());
    // selector-guarded clauses: x, !x | y, !y
    s.add_clause(&[sel1.neg(), x.pos()]);
    s.add_clause(&[sel2.neg(), x.neg(), y.pos()]);
    s.add_clause(&[sel3.neg(), y.neg()]);
    s.add_clause(&[z.pos(), x.pos()]);

    let all = [sel1.pos(), sel2.pos(), sel3.pos()];
    assert_eq!(s.solve(&all), SatStatus::Unsat);
    let failed: Vec<i32> = s.failed_assumptions().iter().map(|l| l.to_dimacs()).collect();
    println!("unsat, failed assumptions {failed:?}");

    assert_eq!(s.solve(&[sel1.pos(), sel2.pos()]), SatStatus::Sat);
    println!("without the third clause: x={} y={} z={}", s.model_value(x), s.model_value(y), s.model_value(z));
}
