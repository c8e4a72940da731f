//! Ultimately periodic addresses, shadow trees and membership in Gamma sets.

use simscheme::address::{gamma_contains, shadow};
use simscheme::io::{format_address, parse_address, parse_scheme, show_word};
use simscheme::Tower;

fn main() {
    let scheme = parse_scheme(include_str!("../schemes/diag2.scm")).expect("shipped scheme");
    let tower = Tower::build(scheme.clone(), 4).expect("valid scheme");

    for text in ["01(10)", "011(1)", "(0110)"] {
        let a = parse_address(text, &scheme).unwrap();
        println!("{text:>8} normalizes to {}", format_address(&scheme, &a));
    }

    // The midpoint of the interval has two addresses.
    let mid = tower.point(1, "m01").unwrap();
    let tree = shadow(&tower, 1, mid, 5).unwrap();
    for d in 1..=5 {
        let words: Vec<String> = tree.nodes_at(d).map(|(w, _)| show_word(&scheme, w)).collect();
        println!("depth {d}: {}", words.join(" "));
    }
    for text in ["0(1)", "1(0)", "(01)"] {
        let a = parse_address(text, &scheme).unwrap();
        let inside = gamma_contains(&tower, 1, mid, &a).unwrap();
        println!("{text} in Gamma(m01): {inside}");
    }
}
