use std::fmt::Write;

use crate::causal::CausalGraph;
use crate::multiway::MultiwayGraph;
use crate::prover::{EdgeKind, NodeKind, ProofGraph};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// States as boxes labelled by their edge lists, events as yellow ellipses
/// between them, and causal edges between events as orange dashed arrows.
pub fn multiway_dot(mw: &MultiwayGraph, causal: Option<&CausalGraph<'_>>) -> String {
    let mut s = String::from("digraph multiway {\n  rankdir=TB;\n");
    s.push_str("  node [fontname=\"Helvetica\", fontsize=10];\n");
    for (i, st) in mw.states.iter().enumerate() {
        let pen = if i == mw.initial { ", penwidth=2" } else { "" };
        writeln!(
            s,
            "  s{i} [shape=box, label={}{pen}];",
            quote(&st.graph.edge_list_string())
        )
        .unwrap();
    }
    for e in &mw.events {
        writeln!(
            s,
            "  ev{} [shape=ellipse, style=filled, fillcolor=yellow, label={}];",
            e.id,
            quote(&format!("{} #{}", e.rule_name, e.id))
        )
        .unwrap();
        writeln!(s, "  s{} -> ev{} [color=gray40];", e.from, e.id).unwrap();
        writeln!(s, "  ev{} -> s{} [color=gray40];", e.id, e.to).unwrap();
    }
    if let Some(cg) = causal {
        for (a, b) in &cg.edges {
            writeln!(
                s,
                "  ev{a} -> ev{b} [color=orange, style=dashed, constraint=false];"
            )
            .unwrap();
        }
    }
    s.push_str("}\n");
    s
}

fn node_style(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Axiom => "shape=box, style=filled, fillcolor=palegreen",
        NodeKind::CriticalPairLemma => "shape=triangle, style=filled, fillcolor=orange",
        NodeKind::SubstitutionLemma => "shape=circle, style=filled, fillcolor=orange",
        NodeKind::Hypothesis => "shape=diamond, style=filled, fillcolor=palegreen",
    }
}

/// Axioms as green boxes, critical-pair lemmas as orange triangles,
/// substitution lemmas as orange circles and the hypothesis as a green
/// diamond; substitution edges are solid, derived-inference edges dashed.
/// Statements go in tooltips so the nodes stay small.
pub fn proof_dot(g: &ProofGraph) -> String {
    let mut s = String::from("digraph proof {\n  rankdir=TB;\n");
    s.push_str("  node [fontname=\"Helvetica\", fontsize=10];\n");
    for n in &g.nodes {
        let label = match n.kind {
            NodeKind::Axiom | NodeKind::CriticalPairLemma => {
                n.statement.split(':').next().unwrap_or("").to_string()
            }
            _ => n.id.to_string(),
        };
        writeln!(
            s,
            "  n{} [{}, label={}, tooltip={}];",
            n.id,
            node_style(n.kind),
            quote(&label),
            quote(&n.statement)
        )
        .unwrap();
    }
    for e in &g.edges {
        let style = match e.kind {
            EdgeKind::Substitution => "solid",
            EdgeKind::DerivedInference => "dashed",
        };
        writeln!(s, "  n{} -> n{} [style={style}];", e.from, e.to).unwrap();
    }
    s.push_str("}\n");
    s
}
