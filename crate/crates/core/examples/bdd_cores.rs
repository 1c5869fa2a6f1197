//! Symbolic core extraction in its three modes.

use ltlfuc::parser::parse_spec;
use ltlfuc::symbolic::{algorithm1_uc, BddMode, SymbolicConfig};

fn main() {
    let s = parse_spec("G a & F !a & G (a -> X b) & G b", "demo").unwrap();
    for mode in [BddMode::PickOne, BddMode::Minimum, BddMode::All] {
        let r = algorithm1_uc(&s, &SymbolicConfig { mode, ..SymbolicConfig::default() });
        println!("{mode}: {} core {:?}", r.result.status.as_str(), r.result.core);
        for c in r.all_cores.iter().flatten() {
            println!("  unsat subset {c:?}");
        }
    }
}
