//! Conflict-sequence search; prints the frames left at termination.

use ltlfuc::native::{algorithm3_run, NativeConfig};
use ltlfuc::parser::parse_spec;

fn main() {
    let s = parse_spec("G (a -> X a) & a & F !a & G c", "demo").unwrap();
    let run = algorithm3_run(&s, &NativeConfig::default());
    println!("{} core {:?} fixpoint {:?}", run.result.status.as_str(), run.result.core, run.fixpoint);
    for (i, frame) in run.frames.iter().enumerate() {
        for cube in frame {
            let obls: Vec<String> = cube.obligations.iter().map(|f| f.to_string()).collect();
            println!("frame {i}: {} {:?}", obls.join(" , "), cube.activations);
        }
    }
}
