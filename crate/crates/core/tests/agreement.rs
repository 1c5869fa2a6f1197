use std::collections::BTreeSet;

use ltlfuc::activation::{Status, UcResult};
use ltlfuc::bmc::{algorithm2_uc, BmcConfig};
use ltlfuc::native::{algorithm3_uc, NativeConfig};
use ltlfuc::oracle::{oracle_sat_subset, OracleConfig};
use ltlfuc::random::{seeded_spec, Shape};
use ltlfuc::semantics::eval;
use ltlfuc::symbolic::{algorithm1_uc, SymbolicConfig};
use ltlfuc::formula::Spec;

fn check(s: &Spec, r: &UcResult, oracle: bool) {
    let cfg = OracleConfig::default();
    match r.status {
        Status::Sat => {
            assert!(oracle, "{}: {:?} says SAT, oracle UNSAT: {s}", s.name, r.algorithm);
            if let Some(w) = &r.witness {
                assert!(eval(&s.formula(), w, 0).unwrap(), "{}: bad witness {:?}", s.name, r.algorithm);
            }
        }
        Status::Unsat => {
            assert!(!oracle, "{}: {:?} says UNSAT, oracle SAT: {s}", s.name, r.algorithm);
            let core = r.core.as_ref().unwrap();
            let labels: BTreeSet<String> = s.labels().into_iter().collect();
            assert!(core.is_subset(&labels));
            assert!(!oracle_sat_subset(s, core, &cfg).unwrap(), "{}: {:?} core {core:?} is SAT: {s}", s.name, r.algorithm);
        }
        _ => {}
    }
}

#[test]
fn engines_agree_with_oracle() {
    let shape = Shape::default();
    let mut unsat = 0;
    for seed in 1000..1150 {
        let s = seeded_spec(seed, &shape);
        let all: BTreeSet<String> = s.labels().into_iter().collect();
        let oracle = oracle_sat_subset(&s, &all, &OracleConfig::default()).unwrap();
        unsat += usize::from(!oracle);
        check(&s, &algorithm1_uc(&s, &SymbolicConfig::default()).result, oracle);
        check(&s, &algorithm2_uc(&s, &BmcConfig::default()), oracle);
        check(&s, &algorithm3_uc(&s, &NativeConfig::default()), oracle);
    }
    assert!(unsat > 30, "only {unsat} unsat specs");
}
