//! Runs the bundled mini-suite and prints the CSV.

use std::path::Path;

use ltlfuc::activation::Algorithm;
use ltlfuc::bench::{bench, crosscheck, load_problems, write_csv, RunOptions};
use ltlfuc::oracle::OracleConfig;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("benchmarks/mini");
    let problems = load_problems(&dir).unwrap();
    let algos = [Algorithm::Bdd, Algorithm::Bmc, Algorithm::Native];
    let records = bench(&problems, &algos, &RunOptions::default(), 4);
    write_csv(std::io::stdout(), &records).unwrap();
    let report = crosscheck(&problems, &algos, &RunOptions::default(), &OracleConfig::default());
    eprint!("{}", report.render());
}
