//! Prover input produced by the bridge, answered by the built-in stand-in.
//! Pass a prover executable as the first argument to run it instead.

use ltlfuc::bmc::BmcConfig;
use ltlfuc::parser::parse_spec;
use ltlfuc::trp::{algorithm4_uc, export_tr, parse_verdict, stub_prover, Dialect, ProverConfig};

fn main() {
    let s = parse_spec("G a & F !a & Y b", "demo").unwrap();
    let text = export_tr(&s);
    print!("{text}");
    let out = stub_prover(&text, &BmcConfig::default()).unwrap();
    println!("stand-in says {:?}", parse_verdict(&out, Dialect::Labelled).unwrap());
    if let Some(exe) = std::env::args().nth(1) {
        let cfg = ProverConfig { executable: Some(exe.into()), ..ProverConfig::default() };
        let r = algorithm4_uc(&s, &cfg);
        println!("external prover: {} {:?} {:?}", r.status.as_str(), r.core, r.reason);
    }
}
