//! Graphviz export. Node size grows with `ln(mass)`, edge pen width with
//! `ln(max(weight, 1))`. Dead nodes are omitted.

use std::fmt::Write;

use massgraph::GraphState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DotStyle {
    pub node_base: f64,
    pub node_scale: f64,
    pub edge_base: f64,
    pub edge_scale: f64,
}

impl Default for DotStyle {
    fn default() -> Self {
        DotStyle {
            node_base: 0.3,
            node_scale: 0.25,
            edge_base: 0.5,
            edge_scale: 1.0,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn export_dot(state: &GraphState, style: &DotStyle) -> Vec<u8> {
    let mut out = String::new();
    let _ = writeln!(out, "graph phase_{} {{", state.phase());
    let _ = writeln!(out, "  node [shape=circle, fixedsize=true];");
    for node in state.alive_nodes() {
        let size = style.node_base + style.node_scale * node.mass.ln();
        let label = node.label.as_deref().map_or_else(|| node.id.to_string(), escape);
        let _ = writeln!(
            out,
            "  {} [label=\"{}\", width={:.4}, height={:.4}, tooltip=\"mass {}\"];",
            node.id, label, size, size, node.mass
        );
    }
    for edge in state.edges() {
        let pen = style.edge_base + style.edge_scale * edge.weight.max(1.0).ln();
        let _ = writeln!(
            out,
            "  {} -- {} [penwidth={:.4}, tooltip=\"weight {}\"];",
            edge.key.lo(),
            edge.key.hi(),
            pen,
            edge.weight
        );
    }
    out.push_str("}\n");
    out.into_bytes()
}
