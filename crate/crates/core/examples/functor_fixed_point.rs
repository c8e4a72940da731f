//! The functor on pairs: iterating it from `(X0, id)` walks up the levels,
//! and a merged pair over the same scheme is a fixed point.

use simscheme::fixedpoint::find_isomorphism;
use simscheme::io::{parse_pair, parse_scheme, serialize_pair};
use simscheme::{apply_functor, is_fixed_point, Pair, Tower};

fn main() {
    let scheme = parse_scheme(include_str!("../schemes/nonunique.scm")).expect("shipped scheme");
    let tower = Tower::build(scheme.clone(), 4).expect("valid scheme");

    let mut pair = Pair::identity(&scheme);
    for n in 1..=4 {
        pair = apply_functor(&scheme, &pair).pair;
        let level = Pair::from_level(&tower, n).unwrap();
        let iso = find_isomorphism(&level, &pair).is_some();
        println!("step {n}: |Z| = {:>2}, isomorphic to level {n}: {iso}", pair.len());
    }

    let z = parse_pair(include_str!("../schemes/zac.scm"), &scheme).expect("shipped pair");
    print!("{}", serialize_pair(&scheme, &z));
    match is_fixed_point(&scheme, &z) {
        Some(w) => println!("fixed point, iso: {}", w.describe(&z)),
        None => println!("not a fixed point"),
    }
}
