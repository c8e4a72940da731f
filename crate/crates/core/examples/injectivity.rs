//! Discreteness and the full-injectivity report on the shipped schemes.

use simscheme::address::gamma_contains;
use simscheme::io::{format_address, parse_scheme};
use simscheme::{injectivity_report, InjectivityReport, Tower};

fn main() {
    let schemes = [
        ("diag2", include_str!("../schemes/diag2.scm")),
        ("diag3", include_str!("../schemes/diag3.scm")),
        ("nfi", include_str!("../schemes/nfi.scm")),
        ("nonunique", include_str!("../schemes/nonunique.scm")),
    ];
    for (name, text) in schemes {
        let scheme = parse_scheme(text).expect("shipped scheme");
        let tower = Tower::build(scheme.clone(), 4).expect("valid scheme");
        let report = injectivity_report(&tower, 4).unwrap();
        println!("{name:<10} discrete={:<5} {report}", scheme.is_discrete());
        if let InjectivityReport::Violation(v) = report {
            let level = tower.level(v.level).unwrap();
            let both = gamma_contains(&tower, v.level, v.first, &v.address).unwrap()
                && gamma_contains(&tower, v.level, v.second, &v.address).unwrap();
            println!(
                "           {} and {} at level {} share {} (checked: {both})",
                level.label(v.first),
                level.label(v.second),
                v.level,
                format_address(&scheme, &v.address)
            );
        }
    }
}
