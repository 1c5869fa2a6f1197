//! The explicit tableau search: shortest witness and all minimal cores.

use ltlfuc::oracle::{oracle_all_min_ucs, oracle_sat};
use ltlfuc::parser::parse_spec;

fn main() {
    let s = parse_spec("G a & F !a & G (a -> X b)", "demo").unwrap();
    let v = oracle_sat(&s.formula(), 100).unwrap();
    println!("satisfiable: {}", v.satisfiable);
    for core in oracle_all_min_ucs(&s, 100).unwrap() {
        println!("minimal core: {core:?}");
    }
    let sat = parse_spec("X a & G (a -> N b)", "sat").unwrap();
    let w = oracle_sat(&sat.formula(), 100).unwrap().witness.unwrap();
    println!("witness of {sat}:\n{w}");
}
