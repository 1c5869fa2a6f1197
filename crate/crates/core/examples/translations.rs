//! Shows the LTL image of an LTLf formula, past elimination and the neXt
//! normal form.

use ltlfuc::parser::parse_formula;
use ltlfuc::translate::{ltlf_to_ltl, remove_past, to_nnf, xnf};

fn main() {
    let f = parse_formula("G (a -> N b) & F (b S a)").unwrap();
    println!("input     {f}");
    println!("ltl       {}", ltlf_to_ltl(&f));
    let removed = remove_past(&f);
    println!("future    {}", removed.future_formula);
    for m in &removed.monitors {
        println!("monitor   {m}");
    }
    println!("xnf       {}", xnf(&to_nnf(&removed.future_formula)));
}
