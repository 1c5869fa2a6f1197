//! Evaluates the weak and strong next on two four-state traces.

use ltlfuc::parser::parse_formula;
use ltlfuc::semantics::{eval, Trace};

fn main() {
    let t1: Trace = "a=0;b=1\na=1;b=0\na=1;b=1\na=1;b=1".parse().unwrap();
    let t2: Trace = "a=0;b=1\na=1;b=0\na=1;b=1\na=1;b=0".parse().unwrap();
    for text in ["G (a -> N b)", "G (a -> X b)"] {
        let f = parse_formula(text).unwrap();
        println!("{text}: t1 {} t2 {}", eval(&f, &t1, 0).unwrap(), eval(&f, &t2, 0).unwrap());
    }
}
