use std::collections::BTreeSet;

use ltlfuc::activation::{activate, restrict_core, ActivationError};
use ltlfuc::formula::{Formula, Spec};
use ltlfuc::oracle::oracle_sat;
use ltlfuc::parser::parse_spec;
use ltlfuc::random::{seeded_spec, Shape};
use proptest::prelude::*;

fn sat(f: &Formula) -> bool {
    oracle_sat(f, 200).unwrap().satisfiable
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    // Ψ with a subset of activations assumed behaves like that subset of Γ.
    #[test]
    fn activated_subsets_match_plain_subsets(seed in any::<u64>()) {
        let s = seeded_spec(seed, &Shape { max_conjuncts: 3, ..Shape::default() });
        let a = activate(&s).unwrap();
        let acts = a.activation_vars();
        for mask in 0u32..1 << acts.len() {
            let on: Vec<&String> = acts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v).collect();
            let mut parts = vec![a.psi.clone()];
            parts.extend(on.iter().map(|v| Formula::var(v.as_str())));
            let labels = restrict_core(&a, on.iter().map(|v| v.as_str()));
            let plain = s.restrict(labels.iter()).formula();
            prop_assert_eq!(sat(&Formula::conjunction(parts)), sat(&plain));
        }
        prop_assert!(sat(&a.psi), "Ψ alone is satisfiable");
    }
}

#[test]
fn one_activation_per_conjunct() {
    let s = parse_spec("a & G b & F !a", "t").unwrap();
    let a = activate(&s).unwrap();
    assert_eq!(a.activation_vars(), vec!["_act_1", "_act_2", "_act_3"]);
    assert_eq!(a.label_of("_act_2"), Some("c2"));
    let core = restrict_core(&a, ["_act_1", "_act_3", "_past_1", "end"]);
    assert_eq!(core, BTreeSet::from(["c1".to_string(), "c3".to_string()]));
}

#[test]
fn reserved_names_rejected() {
    let s = Spec::from_conjuncts("r", vec![Formula::var("_act_1")]);
    assert!(matches!(activate(&s), Err(ActivationError::ReservedName { .. })));
}
