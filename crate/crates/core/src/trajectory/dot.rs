use std::fmt::Write;

use super::{ConnectivityClass, ConnectivityLabel, NodeId, TrajectoryGraph};
use crate::numerics::CNum;

/// `a+bi` with both parts rounded to four decimals; negative zero prints as 0.
pub fn format_amplitude(z: CNum) -> String {
    let round = |x: f64| {
        let r = (x * 1e4).round() / 1e4;
        if r == 0.0 {
            0.0
        } else {
            r
        }
    };
    let (re, im) = (round(z.re), round(z.im));
    format!("{re:.4}{}{:.4}i", if im < 0.0 { '-' } else { '+' }, im.abs())
}

fn fill(class: ConnectivityClass) -> &'static str {
    match class {
        ConnectivityClass::Unconnected => "gray85",
        ConnectivityClass::Singly => "lightblue",
        ConnectivityClass::Doubly => "orange",
        ConnectivityClass::Over => "red",
    }
}

/// DOT digraph with one `rank=same` subgraph per column.
pub fn to_dot(graph: &TrajectoryGraph, labels: &ConnectivityLabel) -> String {
    let mut out = String::new();
    out.push_str("digraph trajectory {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle, style=filled, fontsize=10];\n");
    out.push_str("  edge [fontsize=9];\n");
    for column in 0..graph.column_count() {
        let _ = writeln!(out, "  subgraph column_{column} {{");
        out.push_str("    rank=same;\n");
        for index in 0..graph.column_len(column) {
            let node = NodeId::new(column, index);
            let text = if column == 0 {
                "psi".to_string()
            } else {
                format!("t{column}:{index}")
            };
            let _ = writeln!(
                out,
                "    {node} [label=\"{text}\", fillcolor=\"{}\", paths={}];",
                fill(labels.class(node)),
                labels.count(node)
            );
        }
        out.push_str("  }\n");
    }
    for e in graph.edges() {
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{}\"];",
            e.from,
            e.to,
            format_amplitude(e.amplitude)
        );
    }
    out.push_str("}\n");
    out
}
