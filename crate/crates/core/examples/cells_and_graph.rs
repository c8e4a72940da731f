//! Cells of a level and the approximation graph they induce, printed as DOT.

use simscheme::io::{approximation_graph, export_graph, parse_scheme, show_word, ExportFormat};
use simscheme::Tower;

fn main() {
    let scheme = parse_scheme(include_str!("../schemes/diag3.scm")).expect("shipped scheme");
    let tower = Tower::build(scheme, 2).expect("valid scheme");

    for w in ["", "0", "01", "22"] {
        let word = tower.scheme().parse_word(w).unwrap();
        let cell = tower.cell(&word).unwrap();
        let members: Vec<&str> = cell.members.iter().map(|&p| tower.label(word.len(), p)).collect();
        println!("C({}) = {{{}}}", show_word(tower.scheme(), &word), members.join(", "));
    }

    let g = approximation_graph(&tower, 1).unwrap();
    println!("level 1: {} vertices, {} edges", g.vertices.len(), g.edges.len());
    print!("{}", export_graph(&tower, 1, ExportFormat::Dot).unwrap());
}
