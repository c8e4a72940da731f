//! Deciding whether two addresses name the same point of the limit, with the
//! evidence behind each verdict.

use simscheme::address::{hat_related, related};
use simscheme::cli::describe_evidence;
use simscheme::io::{parse_address, parse_scheme};
use simscheme::Tower;

fn main() {
    let schemes = [
        ("interval", include_str!("../schemes/diag2.scm")),
        ("collapsing", include_str!("../schemes/nfi.scm")),
    ];
    let pairs = [("0(1)", "1(0)"), ("(0)", "(1)"), ("01(0)", "00(1)")];
    for (name, text) in schemes {
        let scheme = parse_scheme(text).expect("shipped scheme");
        let tower = Tower::build(scheme.clone(), 6).expect("valid scheme");
        println!("{name}:");
        for (a, b) in pairs {
            let (a1, a2) = (parse_address(a, &scheme).unwrap(), parse_address(b, &scheme).unwrap());
            let r = related(&tower, &a1, &a2, 6).unwrap();
            let h = hat_related(&tower, &a1, &a2, 6).unwrap();
            println!("  {a} ~ {b}");
            println!("    related:     {}", describe_evidence(&tower, &r));
            println!("    hat-related: {}", describe_evidence(&tower, &h));
        }
    }
}
