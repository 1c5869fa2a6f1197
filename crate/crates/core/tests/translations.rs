use std::collections::BTreeSet;

use ltlfuc::formula::Formula;
use ltlfuc::oracle::oracle_sat;
use ltlfuc::parser::{parse_formula_with, ParseOptions};
use ltlfuc::random::{formula, rng, trace, var_names};
use ltlfuc::semantics::eval_all;
use ltlfuc::symbolic::{SymbolicAutomaton, SymbolicConfig};
use ltlfuc::translate::{ltlf_to_ltl, remove_past, simplify, to_nnf, xnf};
use proptest::prelude::*;

const MAX_LEN: usize = 200;

fn random_formula(seed: u64, vars: usize, depth: usize, past: bool) -> Formula {
    formula(&mut rng(seed), &var_names(vars), depth, past)
}

fn sat(f: &Formula) -> bool {
    oracle_sat(f, MAX_LEN).unwrap().satisfiable
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let f = random_formula(seed, 4, 5, true);
        prop_assert_eq!(parse_formula_with(&f.to_string(), ParseOptions::default()).unwrap(), f);
    }

    #[test]
    fn dualities_on_traces(seed in any::<u64>()) {
        let mut r = rng(seed);
        let vars = var_names(2);
        let f = formula(&mut r, &vars, 2, true);
        let g = formula(&mut r, &vars, 2, true);
        let t = trace(&mut r, &vars, 6);
        let n = |x: Formula| Formula::not(x);
        let pairs = [
            (n(Formula::until(n(f.clone()), n(g.clone()))), Formula::release(f.clone(), g.clone())),
            (n(Formula::since(n(f.clone()), n(g.clone()))), Formula::trigger(f.clone(), g.clone())),
            (Formula::weak_yesterday(f.clone()), n(Formula::yesterday(n(f.clone())))),
            (Formula::weak_next(f.clone()), n(Formula::next(n(f.clone())))),
            (to_nnf(&n(f.clone())), n(f.clone())),
            (simplify(&f), f.clone()),
        ];
        for (a, b) in pairs {
            prop_assert_eq!(eval_all(&a, &t).unwrap(), eval_all(&b, &t).unwrap(), "{} vs {}", a, b);
        }
    }

    #[test]
    fn xnf_preserves_truth(seed in any::<u64>()) {
        let mut r = rng(seed);
        let vars = var_names(2);
        let f = formula(&mut r, &vars, 2, false);
        let t = trace(&mut r, &vars, 6);
        prop_assert_eq!(eval_all(&f, &t).unwrap(), eval_all(&xnf(&f), &t).unwrap());
        prop_assert_eq!(sat(&f), sat(&xnf(&f)));
    }

    #[test]
    fn past_removal_equisatisfiable(seed in any::<u64>()) {
        let f = random_formula(seed, 3, 2, true);
        let removed = remove_past(&f);
        prop_assert!(!removed.conjoined().has_past());
        prop_assert_eq!(sat(&f), sat(&removed.conjoined()), "{}", f);
    }

    #[test]
    fn ltl_image_has_fair_path_iff_satisfiable(seed in any::<u64>()) {
        let f = random_formula(seed, 3, 2, true);
        let mut a = SymbolicAutomaton::build(&ltlf_to_ltl(&f), &[], &SymbolicConfig::default()).unwrap();
        let nonempty = !a.accepting_initial().unwrap().is_false();
        prop_assert_eq!(nonempty, sat(&f), "{}", f);
    }
}

#[test]
fn past_removal_introduces_fresh_history_only() {
    let f = parse_formula_with("G (b -> Y a) & F (a S b)", ParseOptions::default()).unwrap();
    let removed = remove_past(&f);
    let orig: BTreeSet<String> = f.free_vars();
    for v in removed.conjoined().free_vars() {
        assert!(orig.contains(&v) || removed.fresh_vars.contains(&v), "{v}");
    }
}
