//! Bounded model checking with a completeness check, and the effect of a
//! small bound.

use ltlfuc::bmc::{algorithm2_uc, BmcConfig};
use ltlfuc::parser::parse_spec;

fn main() {
    let s = parse_spec("G a & F !a & b", "demo").unwrap();
    for k_max in [0, 50] {
        let r = algorithm2_uc(&s, &BmcConfig { k_max, ..BmcConfig::default() });
        println!("k_max {k_max}: {} core {:?} k {:?} {:?}", r.status.as_str(), r.core, r.k_reached, r.reason);
    }
    let sat = parse_spec("X a & G (a -> N !a)", "sat").unwrap();
    let r = algorithm2_uc(&sat, &BmcConfig::default());
    println!("{}:\n{}", r.status.as_str(), r.witness.unwrap());
}
