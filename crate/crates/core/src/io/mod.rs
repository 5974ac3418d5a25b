//! File formats. JSON is the interchange format for every object; DOT and
//! GraphML are export-only.

mod dot;
mod graphml;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

pub use dot::{multiway_dot, proof_dot};
pub use graphml::{multiway_graphml, proof_graphml};

use crate::causal::CausalGraph;
use crate::hypergraph::{
    EdgeId, Hyperedge, Hypergraph, HypergraphError, Label, VertexId, WireMode,
};
use crate::multiway::MultiwayGraph;
use crate::notation::NotationError;
use crate::prover::{Proof, ProofGraph};
use crate::rewrite::{RewriteRule, RuleError};
use crate::zx::{ZXDiagram, ZXError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Notation(#[from] NotationError),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Diagram(#[from] ZXError),
    #[error("{0}")]
    Invalid(String),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> IoError {
        IoError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// A vertex reference in JSON: a non-negative integer used as the id, or a
/// name interned to a fresh id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
enum VertexRef {
    Id(VertexId),
    Name(String),
}

impl VertexRef {
    fn from_key(k: &str) -> VertexRef {
        k.parse()
            .map(VertexRef::Id)
            .unwrap_or_else(|_| VertexRef::Name(k.to_string()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum EdgeRef {
    Id(u64),
    Name(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<EdgeRef>,
    v: Vec<VertexRef>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HypergraphJson {
    #[serde(default)]
    vertices: Vec<VertexRef>,
    edges: Vec<EdgeJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    labels: BTreeMap<String, Label>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    boundary: Vec<VertexRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    dummy: Vec<VertexRef>,
    #[serde(default, skip_serializing_if = "is_oriented")]
    wire_mode: WireMode,
}

fn is_oriented(m: &WireMode) -> bool {
    *m == WireMode::Oriented
}

struct Interner {
    next: VertexId,
    names: HashMap<String, VertexId>,
}

impl Interner {
    fn id(&mut self, r: &VertexRef) -> VertexId {
        match r {
            VertexRef::Id(v) => *v,
            VertexRef::Name(n) => *self.names.entry(n.clone()).or_insert_with(|| {
                self.next += 1;
                self.next - 1
            }),
        }
    }
}

fn edge_id(r: &EdgeRef) -> Option<u64> {
    match r {
        EdgeRef::Id(i) => Some(*i),
        EdgeRef::Name(s) => s.strip_prefix('e').unwrap_or(s).parse().ok(),
    }
}

impl HypergraphJson {
    fn into_hypergraph(self) -> Result<Hypergraph, IoError> {
        let label_refs: Vec<VertexRef> =
            self.labels.keys().map(|k| VertexRef::from_key(k)).collect();
        let all_refs = || {
            self.vertices
                .iter()
                .chain(self.edges.iter().flat_map(|e| &e.v))
                .chain(&self.boundary)
                .chain(&self.dummy)
                .chain(&label_refs)
        };
        let max_id = all_refs()
            .filter_map(|r| {
                if let VertexRef::Id(v) = r {
                    Some(*v)
                } else {
                    None
                }
            })
            .max();
        let mut interner = Interner {
            next: max_id.map_or(0, |m| m + 1),
            names: HashMap::new(),
        };
        let mut vertices: BTreeSet<VertexId> = BTreeSet::new();
        for r in all_refs() {
            vertices.insert(interner.id(r));
        }
        let explicit: Vec<Option<u64>> = self
            .edges
            .iter()
            .map(|e| e.id.as_ref().and_then(edge_id))
            .collect();
        if self
            .edges
            .iter()
            .zip(&explicit)
            .any(|(e, id)| e.id.is_some() && id.is_none())
        {
            return Err(IoError::Invalid(
                "edge ids must be integers or of the form `e<n>`".into(),
            ));
        }
        let all_explicit = explicit.iter().all(Option::is_some);
        let edges: Vec<Hyperedge> = self
            .edges
            .iter()
            .zip(&explicit)
            .enumerate()
            .map(|(i, (e, id))| Hyperedge {
                id: EdgeId(if all_explicit {
                    id.expect("checked")
                } else {
                    i as u64
                }),
                vertices: e.v.iter().map(|r| interner.id(r)).collect(),
            })
            .collect();
        let labels: BTreeMap<VertexId, Label> = self
            .labels
            .iter()
            .map(|(k, l)| (interner.id(&VertexRef::from_key(k)), l.clone()))
            .collect();
        let dummies: Vec<VertexId> = self.dummy.iter().map(|r| interner.id(r)).collect();
        let boundary: Vec<VertexId> = self.boundary.iter().map(|r| interner.id(r)).collect();
        let h = Hypergraph::new(vertices, edges)?
            .with_labels(labels)?
            .with_boundary(dummies, boundary)?;
        Ok(h.with_wire_mode(self.wire_mode))
    }

    fn from_hypergraph(h: &Hypergraph) -> HypergraphJson {
        let ids =
            |vs: &mut dyn Iterator<Item = VertexId>| vs.map(VertexRef::Id).collect::<Vec<_>>();
        HypergraphJson {
            vertices: ids(&mut h.vertices().iter().copied()),
            edges: h
                .edges()
                .iter()
                .map(|e| EdgeJson {
                    id: Some(EdgeRef::Name(e.id.to_string())),
                    v: ids(&mut e.vertices.iter().copied()),
                })
                .collect(),
            labels: h
                .labels()
                .iter()
                .map(|(v, l)| (v.to_string(), l.clone()))
                .collect(),
            boundary: ids(&mut h.boundary().iter().copied()),
            dummy: ids(&mut h.dummies().iter().copied()),
            wire_mode: h.wire_mode(),
        }
    }
}

pub fn hypergraph_to_value(h: &Hypergraph) -> Value {
    serde_json::to_value(HypergraphJson::from_hypergraph(h)).expect("hypergraph serializes")
}

pub fn hypergraph_to_json(h: &Hypergraph) -> String {
    serde_json::to_string_pretty(&HypergraphJson::from_hypergraph(h))
        .expect("hypergraph serializes")
}

pub fn hypergraph_from_value(v: Value) -> Result<Hypergraph, IoError> {
    serde_json::from_value::<HypergraphJson>(v)?.into_hypergraph()
}

fn looks_like_notation(src: &str) -> bool {
    let t = src.trim_start();
    t.starts_with("{{") || t.trim_end() == "{}"
}

/// Parses a hypergraph from JSON or from set notation such as
/// `{{0,1},{1,2}}`.
pub fn parse_hypergraph(src: &str) -> Result<Hypergraph, IoError> {
    if looks_like_notation(src) {
        return Ok(Hypergraph::from_notation(src.trim())?);
    }
    serde_json::from_str::<HypergraphJson>(src)?.into_hypergraph()
}

/// Parses rules from JSON (one rule object, an array of them, or an object
/// with a `rules` array) or from text with one rule per line, optionally
/// named: `grow: {{x,y}}->{{x,y},{y,z}}`. Blank lines and lines starting
/// with `#` are skipped.
pub fn parse_rules(src: &str) -> Result<Vec<RewriteRule>, IoError> {
    let t = src.trim_start();
    let rules = if t.starts_with('[') || (t.starts_with('{') && !t.starts_with("{{")) {
        let mut v: Value = serde_json::from_str(src)?;
        if let Some(inner) = v.get_mut("rules") {
            v = inner.take();
        }
        if v.is_array() {
            serde_json::from_value(v)?
        } else {
            vec![serde_json::from_value(v)?]
        }
    } else {
        let mut out = Vec::new();
        for line in src
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let (name, body) = match line.split_once(':') {
                Some((n, b)) if !n.contains('{') => (n.trim().to_string(), b.trim()),
                _ => (format!("r{}", out.len() + 1), line),
            };
            out.push(RewriteRule::from_notation(name, body)?);
        }
        out
    };
    for r in &rules {
        r.validate()?;
    }
    Ok(rules)
}

pub fn rules_to_json(rules: &[RewriteRule]) -> String {
    serde_json::to_string_pretty(rules).expect("rules serialize")
}

pub fn parse_zx(src: &str) -> Result<ZXDiagram, IoError> {
    let d: ZXDiagram = serde_json::from_str(src)?;
    d.validate()?;
    Ok(d)
}

pub fn zx_to_json(d: &ZXDiagram) -> String {
    serde_json::to_string_pretty(d).expect("diagram serializes")
}

pub fn proof_graph_to_json(g: &ProofGraph) -> String {
    serde_json::to_string_pretty(g).expect("proof graph serializes")
}

pub fn parse_proof_graph(src: &str) -> Result<ProofGraph, IoError> {
    let g: ProofGraph = serde_json::from_str(src)?;
    g.check().map_err(IoError::Invalid)?;
    Ok(g)
}

/// A proof with its derivation, proof graph and search statistics.
pub fn proof_to_json(p: &Proof) -> String {
    let step = |direction: &str, s: &crate::prover::ProofStep| {
        json!({
            "direction": direction,
            "rule": p.rules[s.rule].name,
            "binding": s.matched.binding,
            "before": s.before.edge_list_string(),
            "after": s.after.edge_list_string(),
        })
    };
    let steps: Vec<Value> = p
        .forward
        .iter()
        .map(|s| step("forward", s))
        .chain(p.backward.iter().rev().map(|s| step("backward", s)))
        .collect();
    let v = json!({
        "from": hypergraph_to_value(&p.from),
        "to": hypergraph_to_value(&p.to),
        "length": p.len(),
        "rules": p.rules,
        "lemma_parents": p.lemma_parents.iter().map(|(k, (a, b))| json!({"lemma": k, "parents": [a, b]})).collect::<Vec<_>>(),
        "steps": steps,
        "stats": p.stats,
        "graph": p.graph,
    });
    serde_json::to_string_pretty(&v).expect("proof serializes")
}

/// States, events and, when given, causal edges.
pub fn multiway_to_json(mw: &MultiwayGraph, causal: Option<&CausalGraph<'_>>) -> String {
    let states: Vec<Value> = mw
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            json!({
                "id": i,
                "key": s.key.to_hex(),
                "generation": s.generation,
                "edges": s.graph.edge_list_string(),
                "graph": hypergraph_to_value(&s.graph),
            })
        })
        .collect();
    let mut v = json!({
        "initial": mw.initial,
        "steps": mw.steps,
        "complete": mw.complete,
        "states": states,
        "events": mw.events,
    });
    if let Some(cg) = causal {
        v["causal_edges"] = json!(cg.edges);
    }
    serde_json::to_string_pretty(&v).expect("multiway graph serializes")
}

pub(crate) fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}
