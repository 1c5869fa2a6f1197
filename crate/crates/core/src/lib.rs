pub mod activation;
pub mod boolexpr;
pub mod budget;
pub mod formula;
pub mod oracle;
pub mod parser;
pub mod sat;
pub mod semantics;
pub mod translate;
pub mod automaton;
pub mod bdd;
pub mod symbolic;
pub mod bmc;
pub mod native;
pub mod trp;
pub mod random;
pub mod bench;
