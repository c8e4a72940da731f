//! The shift maps `x -> pi(y, x)` between consecutive levels.

use simscheme::fixedpoint::{shift_injective, shift_map};
use simscheme::io::parse_scheme;
use simscheme::Tower;

fn main() {
    for text in [include_str!("../schemes/diag2.scm"), include_str!("../schemes/nfi.scm")] {
        let scheme = parse_scheme(text).expect("shipped scheme");
        let tower = Tower::build(scheme.clone(), 4).expect("valid scheme");
        for y in scheme.all_symbols() {
            let f = shift_map(&tower, y, 1).unwrap();
            let images: Vec<String> = tower
                .level(1)
                .unwrap()
                .points()
                .map(|x| format!("{}->{}", tower.label(1, x), tower.label(2, f[x.index()])))
                .collect();
            let inj: Vec<bool> = (0..4).map(|n| shift_injective(&tower, y, n).unwrap()).collect();
            println!("f_{}: {}  injective on levels 0..3: {inj:?}", scheme.symbols().get(y.index()), images.join(" "));
        }
    }
}
