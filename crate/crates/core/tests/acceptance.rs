//! One PASS/FAIL line per primary acceptance criterion.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use ltlfuc::activation::{activate, Algorithm, Status, UcResult};
use ltlfuc::bench::{bench, load_problems, read_csv, write_csv, RunOptions};
use ltlfuc::bmc::{algorithm2_uc, BmcConfig};
use ltlfuc::formula::{Formula, Spec};
use ltlfuc::native::{algorithm3_uc, NativeConfig};
use ltlfuc::oracle::{minimal_sets, oracle_all_min_ucs, oracle_sat, oracle_sat_subset, oracle_unsat_subsets, OracleConfig};
use ltlfuc::parser::{parse_formula, parse_spec};
use ltlfuc::random::{cnf, formula, rng, seeded_spec, var_names, Shape};
use ltlfuc::sat::{Lit, SatStatus, Solver};
use ltlfuc::semantics::{eval, Trace};
use ltlfuc::symbolic::{algorithm1_uc, ActivationAnalysis, BddMode, SymbolicAutomaton, SymbolicConfig};
use ltlfuc::translate::{ltlf_to_ltl, remove_past};
use ltlfuc::trp::{algorithm4_uc, ProverConfig};
use rand::Rng;

use common::{fixture, mini_suite, satisfies, truth_table_sat};

const MAX_LEN: usize = 200;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        self.failed += usize::from(!ok);
    }
}

fn oracle(f: &Formula) -> Option<bool> {
    oracle_sat(f, MAX_LEN).ok().map(|v| v.satisfiable)
}

fn semantics(rep: &mut Report) {
    let start = Instant::now();
    let t1: Trace = "a=0;b=1\na=1;b=0\na=1;b=1\na=1;b=1".parse().unwrap();
    let t2: Trace = "a=0;b=1\na=1;b=0\na=1;b=1\na=1;b=0".parse().unwrap();
    let weak = parse_formula("G (a -> N b)").unwrap();
    let strong = parse_formula("G (a -> X b)").unwrap();
    let parsed = start.elapsed();
    let start = Instant::now();
    let got = [eval(&weak, &t1, 0).unwrap(), eval(&weak, &t2, 0).unwrap(), eval(&strong, &t1, 0).unwrap(), eval(&strong, &t2, 0).unwrap()];
    let took = start.elapsed();
    let ok = got == [true, false, false, false] && took < Duration::from_millis(1);
    rep.line("semantics fidelity", ok, format!("verdicts {got:?} in {took:?} (parsing {parsed:?})"));
}

fn engines(rep: &mut Report) {
    let start = Instant::now();
    let shape = Shape::default();
    let cfg = OracleConfig::default();
    let (mut disagreements, mut decided, mut unknown, mut bad_cores, mut cores) = (0, 0, 0, 0, 0);
    for seed in 0..300 {
        let s = seeded_spec(seed, &shape);
        let expected = oracle(&s.formula()).expect("oracle decides the small suite");
        let labels: BTreeSet<String> = s.labels().into_iter().collect();
        let results = [
            algorithm1_uc(&s, &SymbolicConfig::default()).result,
            algorithm2_uc(&s, &BmcConfig::default()),
            algorithm3_uc(&s, &NativeConfig::default()),
        ];
        for r in results {
            match r.status {
                Status::Sat | Status::Unsat => {
                    decided += 1;
                    let sat = r.status == Status::Sat;
                    if sat != expected {
                        disagreements += 1;
                        println!("  disagreement: {} {} on {s}", r.algorithm, r.status.as_str());
                    }
                    if let Some(w) = &r.witness {
                        disagreements += usize::from(!eval(&s.formula(), w, 0).unwrap_or(false));
                    }
                }
                _ => unknown += 1,
            }
            if let Some(core) = &r.core {
                cores += 1;
                if !core.is_subset(&labels) || oracle_sat_subset(&s, core, &cfg).unwrap_or(true) {
                    bad_cores += 1;
                    println!("  invalid core: {} {core:?} on {s}", r.algorithm);
                }
            }
        }
    }
    let took = start.elapsed();
    rep.line(
        "oracle agreement",
        disagreements == 0 && took < Duration::from_secs(600),
        format!("300 specs, {decided} decided runs, {unknown} unknown, {disagreements} disagreements, {took:.1?}"),
    );
    rep.line("core validity", bad_cores == 0, format!("{cores} cores, {bad_cores} violations"));
}

fn bdd_completeness(rep: &mut Report) {
    let cfg = OracleConfig::default();
    let mut violations = 0;
    for seed in 10_000..10_100 {
        let s = seeded_spec(seed, &Shape::default());
        let expected = oracle_unsat_subsets(&s, &cfg).unwrap();
        let mut a = ActivationAnalysis::run(&s, &SymbolicConfig::default()).unwrap();
        let ucs = a.unsat_subsets().unwrap();
        let min = algorithm1_uc(&s, &SymbolicConfig { mode: BddMode::Minimum, ..SymbolicConfig::default() });
        let oracle_min = oracle_all_min_ucs(&s, MAX_LEN).unwrap().iter().map(BTreeSet::len).min();
        let ok = ucs == expected && min.result.core_size() == oracle_min && minimal_sets(&expected).iter().map(BTreeSet::len).min() == oracle_min;
        if !ok {
            violations += 1;
            println!("  mismatch on {s}");
        }
    }
    rep.line("BDD completeness", violations == 0, format!("100 specs, {violations} mismatches"));
}

fn translations(rep: &mut Report) {
    let vars = var_names(3);
    let (mut ftol_bad, mut past_bad, mut act_bad, mut skipped) = (0, 0, 0, 0);
    for seed in 0..500u64 {
        let f = formula(&mut rng(seed), &vars, 2, true);
        let Some(expected) = oracle(&f) else {
            skipped += 1;
            continue;
        };
        let mut a = SymbolicAutomaton::build(&ltlf_to_ltl(&f), &[], &SymbolicConfig::default()).unwrap();
        ftol_bad += usize::from(a.accepting_initial().unwrap().is_false() == expected);
        match oracle(&remove_past(&f).conjoined()) {
            Some(v) => past_bad += usize::from(v != expected),
            None => skipped += 1,
        }
        let s = seeded_spec(seed + 50_000, &Shape::default());
        let act = activate(&s).unwrap();
        let mut parts = vec![act.psi.clone()];
        parts.extend(act.activation_vars().into_iter().map(Formula::var));
        match (oracle(&Formula::conjunction(parts)), oracle(&s.formula())) {
            (Some(x), Some(y)) => act_bad += usize::from(x != y),
            _ => skipped += 1,
        }
    }
    rep.line(
        "translation equisatisfiability",
        ftol_bad + past_bad + act_bad == 0,
        format!("500 each; LTL image {ftol_bad}, past removal {past_bad}, activation {act_bad} violations; {skipped} undecided"),
    );
}

fn sat_engine(rep: &mut Report) {
    let mut violations = 0;
    for seed in 0..1000u64 {
        let mut r = rng(seed);
        let (n, clauses) = cnf(&mut r, 4, 8);
        let mut assumptions = Vec::new();
        for v in 1..=n as i32 {
            if r.gen_bool(0.3) {
                assumptions.push(if r.gen_bool(0.5) { v } else { -v });
            }
        }
        let mut s = Solver::new();
        s.reserve_vars(n);
        for c in &clauses {
            s.add_clause(&c.iter().map(|&d| Lit::from_dimacs(d)).collect::<Vec<_>>());
        }
        let mut all = clauses.clone();
        all.extend(assumptions.iter().map(|&a| vec![a]));
        let lits: Vec<Lit> = assumptions.iter().map(|&d| Lit::from_dimacs(d)).collect();
        let ok = match s.solve(&lits) {
            SatStatus::Sat => {
                let m = (0..n).fold(0u32, |m, i| m | (u32::from(s.model()[i]) << i));
                satisfies(m, &all)
            }
            SatStatus::Unsat => {
                let mut core = clauses.clone();
                core.extend(s.failed_assumptions().iter().map(|l| vec![l.to_dimacs()]));
                !truth_table_sat(n, &all) && !truth_table_sat(n, &core)
            }
        };
        violations += usize::from(!ok);
    }
    rep.line("SAT engine", violations == 0, format!("1000 CNFs, {violations} violations"));
}

fn k_max(rep: &mut Report) {
    let s = parse_spec("G a & F !a", "k").unwrap();
    let zero = algorithm2_uc(&s, &BmcConfig { k_max: 0, ..BmcConfig::default() });
    let full = algorithm2_uc(&s, &BmcConfig::default());
    let expected: BTreeSet<String> = ["c1".to_string(), "c2".to_string()].into();
    let ok = zero.status == Status::Unknown && full.status == Status::Unsat && full.core.as_ref() == Some(&expected);
    rep.line(
        "BMC honors k_max",
        ok,
        format!("k_max=0 {}, default {} {:?} at k={:?}", zero.status.as_str(), full.status.as_str(), full.core, full.k_reached),
    );
}

fn trp(rep: &mut Report) {
    let stub = ProverConfig {
        executable: Some(common::bin()),
        args: vec!["stub-prover".into(), "{input}".into()],
        ..ProverConfig::default()
    };
    let cfg = OracleConfig::default();
    let (mut cores, mut violations, mut decided) = (0, 0, 0);
    let mut seed = 20_000;
    let mut specs: Vec<Spec> = Vec::new();
    // 20 specs, at least half of them unsatisfiable
    while specs.len() < 20 {
        let s = seeded_spec(seed, &Shape::default());
        seed += 1;
        let sat = oracle(&s.formula()).unwrap();
        if !sat || specs.len() >= 10 {
            specs.push(s);
        }
    }
    for s in &specs {
        let r: UcResult = algorithm4_uc(s, &stub);
        let expected = oracle(&s.formula()).unwrap();
        match r.status {
            Status::Sat => {
                decided += 1;
                violations += usize::from(!expected);
            }
            Status::Unsat => {
                decided += 1;
                cores += 1;
                let core = r.core.as_ref().unwrap();
                let labels: BTreeSet<String> = s.labels().into_iter().collect();
                violations += usize::from(expected || !core.is_subset(&labels) || oracle_sat_subset(s, core, &cfg).unwrap());
            }
            _ => println!("  undecided: {:?} on {s}", r.reason),
        }
    }
    let reduced = ProverConfig { executable: Some(fixture("false_prover.sh")), ..ProverConfig::default() };
    let r = algorithm4_uc(&specs[0], &reduced);
    let ok = violations == 0 && decided == 20 && r.status == Status::ReducedToFalse && r.core.is_none();
    rep.line(
        "trp bridge with stub prover",
        ok,
        format!("20 specs, {cores} cores, {violations} violations; fixture gives {}", r.status.as_str()),
    );
}

fn bench_harness(rep: &mut Report) {
    let start = Instant::now();
    let problems = load_problems(&mini_suite()).unwrap();
    let algos = [Algorithm::Bdd, Algorithm::Bmc, Algorithm::Native];
    let records = bench(&problems, &algos, &RunOptions::default(), 1);
    let took = start.elapsed();
    let mut buf = Vec::new();
    write_csv(&mut buf, &records).unwrap();
    let header = String::from_utf8_lossy(&buf).lines().next().unwrap_or_default().to_string();
    let back = read_csv(&buf[..]).unwrap();
    let schema_ok = header
        == "problem,family,n_conjuncts,n_vars,algorithm,status,core_size,elapsed,k_reached,vbest_elapsed,vbest_algorithm"
        && back.len() == problems.len() * algos.len()
        && back.iter().all(|r| r.elapsed >= 0.0 && r.core_size.is_some() == (r.status == "UNSAT"));
    let mut vbest_ok = true;
    for p in &problems {
        let rows: Vec<_> = back.iter().filter(|r| r.problem == p.name).collect();
        let best = rows.iter().filter(|r| r.status == "UNSAT").map(|r| r.elapsed).fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.min(e))));
        vbest_ok &= rows.iter().all(|r| r.vbest_elapsed == best && best.is_none_or(|b| rows.iter().filter(|x| x.status == "UNSAT").all(|x| b <= x.elapsed)));
    }
    let unsat = back.iter().filter(|r| r.status == "UNSAT").count();
    rep.line(
        "bench harness",
        schema_ok && vbest_ok && problems.len() == 30 && took < Duration::from_secs(300),
        format!("{} problems x 3 algorithms in {took:.1?}, {unsat} UNSAT rows, schema {schema_ok}, virtual best {vbest_ok}", problems.len()),
    );
}

fn main() {
    let mut rep = Report { failed: 0 };
    semantics(&mut rep);
    engines(&mut rep);
    bdd_completeness(&mut rep);
    translations(&mut rep);
    sat_engine(&mut rep);
    k_max(&mut rep);
    trp(&mut rep);
    bench_harness(&mut rep);
    if rep.failed > 0 {
        eprintln!("{} acceptance criteria failed", rep.failed);
        std::process::exit(1);
    }
}
