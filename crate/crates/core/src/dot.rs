//! Hasse diagrams in Graphviz DOT.

use std::fmt::Write as _;

use crate::algebra::EventAlgebra;
use crate::classifier::OmegaAlgebra;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Covering relation of `l`, bottom to top; nodes in element order.
pub fn emit_dot(l: &EventAlgebra) -> String {
    render(l, None)
}

/// Hasse diagram of `Ω` with the true class filled.
pub fn emit_omega_dot(omega: &OmegaAlgebra) -> String {
    render(omega.algebra(), Some(omega.true_class()))
}

fn render(l: &EventAlgebra, marked: Option<usize>) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(l.name())).unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    writeln!(out, "  node [shape=ellipse];").unwrap();
    for x in l.elements() {
        let extra = if Some(x) == marked { ", style=filled, fillcolor=gold, peripheries=2" } else { "" };
        writeln!(out, "  n{x} [label={}{extra}];", quote(l.name_of(x))).unwrap();
    }
    for (x, y) in l.covers() {
        writeln!(out, "  n{x} -> n{y};").unwrap();
    }
    out.push_str("}\n");
    out
}
