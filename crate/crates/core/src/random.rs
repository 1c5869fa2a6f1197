//! Seeded generators for formulas, specs, traces and small CNFs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, Spec};
use crate::semantics::Trace;

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_conjuncts: usize,
    pub max_vars: usize,
    /// Bound on temporal nesting.
    pub max_depth: usize,
    pub past: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_conjuncts: 4, max_vars: 3, max_depth: 2, past: true }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn var_names(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// A formula over `vars` with temporal nesting at most `depth`.
pub fn formula<R: Rng>(r: &mut R, vars: &[String], depth: usize, past: bool) -> Formula {
    gen(r, vars, depth, 2, past)
}

fn gen<R: Rng>(r: &mut R, vars: &[String], depth: usize, bool_budget: usize, past: bool) -> Formula {
    let roll = r.gen_range(0..100);
    if roll < 30 || (depth == 0 && bool_budget == 0) {
        let v = Formula::var(vars.choose(r).expect("non-empty alphabet").clone());
        return match r.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            2..=5 => Formula::not(v),
            _ => v,
        };
    }
    if (roll < 55 || depth == 0) && bool_budget > 0 {
        let a = gen(r, vars, depth, bool_budget - 1, past);
        return match r.gen_range(0..5) {
            0 => Formula::not(a),
            1 => Formula::and(a, gen(r, vars, depth, bool_budget - 1, past)),
            2 => Formula::or(a, gen(r, vars, depth, bool_budget - 1, past)),
            3 => Formula::implies(a, gen(r, vars, depth, bool_budget - 1, past)),
            _ => Formula::iff(a, gen(r, vars, depth, bool_budget - 1, past)),
        };
    }
    if depth == 0 {
        return Formula::var(vars.choose(r).expect("non-empty alphabet").clone());
    }
    let sub = |r: &mut R| gen(r, vars, depth - 1, 1, past);
    let ops = if past { 14 } else { 7 };
    match r.gen_range(0..ops) {
        0 => Formula::next(sub(r)),
        1 => Formula::weak_next(sub(r)),
        2 => Formula::eventually(sub(r)),
        3 => Formula::globally(sub(r)),
        4 => Formula::until(sub(r), sub(r)),
        5 => Formula::release(sub(r), sub(r)),
        6 => Formula::globally(Formula::implies(sub(r), sub(r))),
        7 => Formula::yesterday(sub(r)),
        8 => Formula::weak_yesterday(sub(r)),
        9 => Formula::once(sub(r)),
        10 => Formula::historically(sub(r)),
        11 => Formula::since(sub(r), sub(r)),
        12 => Formula::trigger(sub(r), sub(r)),
        _ => Formula::historically(Formula::implies(sub(r), sub(r))),
    }
}

/// A spec of 1 to `max_conjuncts` conjuncts. Some conjuncts negate or
/// contradict earlier ones so that unsatisfiable specs are common.
pub fn spec<R: Rng>(r: &mut R, shape: &Shape, name: &str) -> Spec {
    let n_vars = r.gen_range(1..=shape.max_vars);
    let vars = var_names(n_vars);
    let n = r.gen_range(1..=shape.max_conjuncts);
    let mut cs: Vec<Formula> = Vec::with_capacity(n);
    while cs.len() < n {
        let f = if !cs.is_empty() && r.gen_bool(0.25) {
            let prev = cs.choose(r).expect("non-empty").clone();
            match r.gen_range(0..3) {
                0 => Formula::not(prev),
                1 => Formula::eventually(Formula::not(strip_globally(prev))),
                _ => Formula::globally(Formula::not(Formula::var(vars.choose(r).expect("vars").clone()))),
            }
        } else {
            formula(r, &vars, shape.max_depth, shape.past)
        };
        if f.temporal_depth() <= shape.max_depth.max(1) || cs.is_empty() {
            cs.push(f);
        }
    }
    let mut s = Spec::from_conjuncts(name, cs);
    // keep the alphabet even when a variable does not occur
    for v in vars {
        s.alphabet.insert(v);
    }
    s
}

fn strip_globally(f: Formula) -> Formula {
    match f {
        Formula::Globally(g) => *g,
        f => f,
    }
}

pub fn seeded_spec(seed: u64, shape: &Shape) -> Spec {
    spec(&mut rng(seed), shape, &format!("rand{seed}"))
}

pub fn trace<R: Rng>(r: &mut R, vars: &[String], max_len: usize) -> Trace {
    let len = r.gen_range(1..=max_len.max(1));
    let mut t = Trace::new(vars.to_vec());
    for _ in 0..len {
        t.push_state((0..vars.len()).map(|_| r.gen_bool(0.5)).collect());
    }
    t
}

/// Clauses in DIMACS literal notation over variables `1..=n_vars`.
pub fn cnf<R: Rng>(r: &mut R, max_vars: usize, max_clauses: usize) -> (usize, Vec<Vec<i32>>) {
    let n_vars = r.gen_range(1..=max_vars);
    let n_clauses = r.gen_range(0..=max_clauses);
    let clauses = (0..n_clauses)
        .map(|_| {
            let len = r.gen_range(1..=3.min(n_vars));
            (0..len)
                .map(|_| {
                    let v = r.gen_range(1..=n_vars as i32);
                    if r.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    (n_vars, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_bounded() {
        let shape = Shape::default();
        for seed in 0..200 {
            let s = seeded_spec(seed, &shape);
            assert_eq!(s, seeded_spec(seed, &shape));
            assert!(!s.is_empty() && s.len() <= 4);
            assert!(s.alphabet.len() <= 3);
            for (_, c) in &s.conjuncts {
                assert!(c.temporal_depth() <= 2, "{c}");
            }
        }
    }
}
