//! Exhaustive structural audit of a shipped scheme and a few random ones.

use simscheme::io::parse_scheme;
use simscheme::random::random_scheme;
use simscheme::{lemma_audit, Tower};

fn main() {
    let scheme = parse_scheme(include_str!("../schemes/diag3.scm")).expect("shipped scheme");
    let report = lemma_audit(&Tower::new(scheme).unwrap(), 4).unwrap();
    println!("diag3\n{report}\n");

    for seed in 0..3 {
        let s = random_scheme(seed);
        let sizes = (s.symbol_count(), s.base_len(), s.first_len());
        let report = lemma_audit(&Tower::new(s).unwrap(), 4).unwrap();
        println!("random scheme {seed} (|Y|, |X0|, |X1|) = {sizes:?}\n{report}\n");
    }
}
