use std::fmt::Write;

use crate::lattice::FinLattice;

/// Graphviz text for the Hasse diagram: one edge per cover `a -> b` with
/// `a < b`, nodes of equal height on one rank, constants drawn doubled.
pub fn export_hasse(l: &FinLattice) -> String {
    let heights = l.order().heights();
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=circle];\n");
    for x in 0..l.len() {
        match l.consts() {
            Some((z, _)) if z == x => writeln!(
                out,
                "  {x} [label=\"{x}\", xlabel=\"0\", shape=doublecircle];"
            ),
            Some((_, o)) if o == x => writeln!(
                out,
                "  {x} [label=\"{x}\", xlabel=\"1\", shape=doublecircle];"
            ),
            _ => writeln!(out, "  {x} [label=\"{x}\"];"),
        }
        .expect("writing to a string");
    }
    let top = heights.iter().copied().max().unwrap_or(0);
    for h in 0..=top {
        let rank: Vec<String> = (0..l.len())
            .filter(|&x| heights[x] == h)
            .map(|x| x.to_string())
            .collect();
        if rank.len() > 1 {
            writeln!(out, "  {{ rank=same; {}; }}", rank.join("; ")).expect("writing to a string");
        }
    }
    for &(a, b) in l.order().covers() {
        writeln!(out, "  {a} -> {b};").expect("writing to a string");
    }
    out.push_str("}\n");
    out
}
