//! Basic BDD operations: apply, quantification, renaming and cubes.

use std::collections::{BTreeSet, HashMap};

use ltlfuc::bdd::BddManager;

fn main() {
    let mut m = BddManager::new();
    let (a, b, c) = (m.var(0).unwrap(), m.var(1).unwrap(), m.var(2).unwrap());
    let ab = m.and(a, b).unwrap();
    let f = m.or(ab, c).unwrap();
    println!("nodes {} models {}", m.node_count(f), m.sat_count(f, 3));

    let g = m.exists(&BTreeSet::from([2]), f).unwrap();
    println!("exists c. f is true: {}", g.is_true());

    let h = m.rename(ab, &HashMap::from([(0, 3), (1, 4)])).unwrap();
    println!("support after rename {:?}", m.support(h));

    let (size, cube) = m.min_true_cube(f, &BTreeSet::from([0, 1, 2])).unwrap();
    println!("fewest positive literals {size}: {cube:?}");
    print!("{}", m.to_dot(f, &|v| format!("x{v}")));
}
