use std::fmt::Write;

use super::escape_xml;
use crate::causal::CausalGraph;
use crate::multiway::MultiwayGraph;
use crate::prover::ProofGraph;

const HEADER: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";

fn key(s: &mut String, id: &str, domain: &str, ty: &str) {
    writeln!(
        s,
        "  <key id=\"{id}\" for=\"{domain}\" attr.name=\"{id}\" attr.type=\"{ty}\"/>"
    )
    .unwrap();
}

fn data(s: &mut String, key: &str, value: impl ToString) {
    write!(
        s,
        "<data key=\"{key}\">{}</data>",
        escape_xml(&value.to_string())
    )
    .unwrap();
}

/// One node per state and per event; `kind` tells them apart. Edges are
/// `transition` (state to event to state) or `causal` (event to event).
pub fn multiway_graphml(mw: &MultiwayGraph, causal: Option<&CausalGraph<'_>>) -> String {
    let mut s = String::from(HEADER);
    for (id, domain, ty) in [
        ("kind", "all", "string"),
        ("edges", "node", "string"),
        ("key", "node", "string"),
        ("generation", "node", "int"),
        ("rule", "node", "string"),
        ("consumed", "node", "string"),
        ("created", "node", "string"),
        ("step", "node", "int"),
    ] {
        key(&mut s, id, domain, ty);
    }
    s.push_str("  <graph id=\"multiway\" edgedefault=\"directed\">\n");
    for (i, st) in mw.states.iter().enumerate() {
        write!(s, "    <node id=\"s{i}\">").unwrap();
        data(&mut s, "kind", "state");
        data(&mut s, "edges", st.graph.edge_list_string());
        data(&mut s, "key", st.key.to_hex());
        data(&mut s, "generation", st.generation);
        s.push_str("</node>\n");
    }
    let list = |xs: &std::collections::BTreeSet<usize>| {
        xs.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    for e in &mw.events {
        write!(s, "    <node id=\"ev{}\">", e.id).unwrap();
        data(&mut s, "kind", "event");
        data(&mut s, "rule", &e.rule_name);
        data(&mut s, "consumed", list(&e.consumed));
        data(&mut s, "created", list(&e.created));
        data(&mut s, "step", e.step);
        s.push_str("</node>\n");
    }
    for e in &mw.events {
        for (a, b) in [
            (format!("s{}", e.from), format!("ev{}", e.id)),
            (format!("ev{}", e.id), format!("s{}", e.to)),
        ] {
            write!(s, "    <edge source=\"{a}\" target=\"{b}\">").unwrap();
            data(&mut s, "kind", "transition");
            s.push_str("</edge>\n");
        }
    }
    if let Some(cg) = causal {
        for (a, b) in &cg.edges {
            write!(s, "    <edge source=\"ev{a}\" target=\"ev{b}\">").unwrap();
            data(&mut s, "kind", "causal");
            s.push_str("</edge>\n");
        }
    }
    s.push_str("  </graph>\n</graphml>\n");
    s
}

pub fn proof_graphml(g: &ProofGraph) -> String {
    let mut s = String::from(HEADER);
    key(&mut s, "kind", "all", "string");
    key(&mut s, "statement", "node", "string");
    s.push_str("  <graph id=\"proof\" edgedefault=\"directed\">\n");
    for n in &g.nodes {
        write!(s, "    <node id=\"n{}\">", n.id).unwrap();
        data(&mut s, "kind", n.kind.as_str());
        data(&mut s, "statement", &n.statement);
        s.push_str("</node>\n");
    }
    for e in &g.edges {
        write!(s, "    <edge source=\"n{}\" target=\"n{}\">", e.from, e.to).unwrap();
        let kind = match e.kind {
            crate::prover::EdgeKind::Substitution => "substitution",
            crate::prover::EdgeKind::DerivedInference => "derived_inference",
        };
        data(&mut s, "kind", kind);
        s.push_str("</edge>\n");
    }
    s.push_str("  </graph>\n</graphml>\n");
    s
}
