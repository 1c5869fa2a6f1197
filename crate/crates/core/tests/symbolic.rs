use std::collections::BTreeSet;

use ltlfuc::oracle::{minimal_sets, oracle_unsat_subsets, OracleConfig};
use ltlfuc::random::{seeded_spec, Shape};
use ltlfuc::symbolic::{algorithm1_uc, ActivationAnalysis, BddMode, SymbolicConfig};

#[test]
fn ucs_is_exactly_the_unsatisfiable_subsets() {
    for seed in 500..560 {
        let s = seeded_spec(seed, &Shape::default());
        let expected = oracle_unsat_subsets(&s, &OracleConfig::default()).unwrap();
        let mut a = ActivationAnalysis::run(&s, &SymbolicConfig::default()).unwrap();
        assert_eq!(a.unsat_subsets().unwrap(), expected, "{s}");
        let all: BTreeSet<BTreeSet<String>> = (0u32..1 << s.len())
            .map(|m| s.labels().into_iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, l)| l).collect())
            .collect();
        let sat: BTreeSet<_> = all.difference(&expected).cloned().collect();
        assert_eq!(a.sat_subsets().unwrap(), sat);

        let min = algorithm1_uc(&s, &SymbolicConfig { mode: BddMode::Minimum, ..SymbolicConfig::default() });
        let smallest = minimal_sets(&expected).iter().map(BTreeSet::len).min();
        assert_eq!(min.result.core_size(), smallest, "{s}");
    }
}
