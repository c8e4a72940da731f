//! Builds the levels of the interval and gasket schemes and prints their sizes
//! next to the closed forms `2^n + 1` and `3(3^n + 1)/2`.

use simscheme::{FiniteScheme, Tower};

fn main() {
    let interval = Tower::build(FiniteScheme::diagonal(2), 10).expect("valid scheme");
    println!("interval {interval}");
    for (n, size) in interval.sizes().iter().enumerate() {
        assert_eq!(*size, (1 << n) + 1);
    }

    let gasket = Tower::build(FiniteScheme::diagonal(3), 6).expect("valid scheme");
    println!("gasket   {gasket}");

    let level = gasket.level(2).unwrap();
    println!("level 2 of the gasket:");
    for p in level.points() {
        let (w, x0) = level.representative(p);
        let kind = if level.is_fresh(p) { "new" } else { "old" };
        println!("  {:<6} = pi({}, {})  {kind}", level.label(p), gasket.scheme().render_word(w), x0.0);
    }
}
