//! ZX-diagrams over Z and X spiders with exact phases, their encoding as
//! open hypergraphs, a rule set instantiated up to a maximum spider arity,
//! simplification and equality proofs, and a dense matrix semantics.
//!
//! A diagram is encoded with one vertex per spider (labelled `Z` or `X` with
//! its phase), one dummy vertex per boundary point (labelled `in` or `out`,
//! interface order inputs then outputs) and one unordered binary edge per
//! wire.

mod matrix;
mod rules;
mod simplify;
mod soundness;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use matrix::{to_matrix, Matrix, MatrixError};
pub use rules::{standard_rules, ZXRuleSet};
pub use simplify::{prove_equal, simplify, Simplified, ZXProveError};
pub use soundness::{check_rule, host_diagrams, set_partitions, SoundnessReport};

use crate::hypergraph::{Hypergraph, Label, VertexId, WireMode};
use crate::phase::Phase;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Color {
    Z,
    X,
}

impl Color {
    pub fn as_str(self) -> &'static str {
        match self {
            Color::Z => "Z",
            Color::X => "X",
        }
    }

    pub fn other(self) -> Color {
        match self {
            Color::Z => Color::X,
            Color::X => Color::Z,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spider {
    pub id: String,
    pub color: Color,
    #[serde(default)]
    pub phase: Phase,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZXDiagram {
    pub spiders: Vec<Spider>,
    pub wires: Vec<(String, String)>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZXError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("wire endpoint `{0}` is neither a spider nor a boundary point")]
    UnknownEndpoint(String),
    #[error("boundary point `{id}` has {count} wires, expected exactly one")]
    BoundaryDegree { id: String, count: usize },
    #[error("vertex {0} is not a spider or boundary point")]
    NotZX(VertexId),
    #[error("cannot compose: {0} outputs against {1} inputs")]
    ArityMismatch(usize, usize),
}

impl ZXDiagram {
    pub fn validate(&self) -> Result<(), ZXError> {
        let mut ids = HashSet::new();
        for id in self
            .spiders
            .iter()
            .map(|s| &s.id)
            .chain(&self.inputs)
            .chain(&self.outputs)
        {
            if !ids.insert(id.as_str()) {
                return Err(ZXError::DuplicateId(id.clone()));
            }
        }
        let mut degree: HashMap<&str, usize> = HashMap::new();
        for (a, b) in &self.wires {
            for end in [a, b] {
                if !ids.contains(end.as_str()) {
                    return Err(ZXError::UnknownEndpoint(end.clone()));
                }
                *degree.entry(end.as_str()).or_insert(0) += 1;
            }
        }
        for id in self.inputs.iter().chain(&self.outputs) {
            let count = degree.get(id.as_str()).copied().unwrap_or(0);
            if count != 1 {
                return Err(ZXError::BoundaryDegree {
                    id: id.clone(),
                    count,
                });
            }
        }
        Ok(())
    }

    pub fn spider(&self, id: &str) -> Option<&Spider> {
        self.spiders.iter().find(|s| s.id == id)
    }

    pub fn arity(&self, id: &str) -> usize {
        self.wires
            .iter()
            .map(|(a, b)| usize::from(a == id) + usize::from(b == id))
            .sum()
    }

    /// Renames spiders to `s0..`, inputs to `in0..` and outputs to `out0..`.
    fn renumbered(&self) -> ZXDiagram {
        let mut map: HashMap<&str, String> = HashMap::new();
        for (i, s) in self.spiders.iter().enumerate() {
            map.insert(&s.id, format!("s{i}"));
        }
        for (i, b) in self.inputs.iter().enumerate() {
            map.insert(b, format!("in{i}"));
        }
        for (i, b) in self.outputs.iter().enumerate() {
            map.insert(b, format!("out{i}"));
        }
        ZXDiagram {
            spiders: self
                .spiders
                .iter()
                .map(|s| Spider {
                    id: map[s.id.as_str()].clone(),
                    ..s.clone()
                })
                .collect(),
            wires: self
                .wires
                .iter()
                .map(|(a, b)| (map[a.as_str()].clone(), map[b.as_str()].clone()))
                .collect(),
            inputs: self
                .inputs
                .iter()
                .map(|b| map[b.as_str()].clone())
                .collect(),
            outputs: self
                .outputs
                .iter()
                .map(|b| map[b.as_str()].clone())
                .collect(),
        }
    }

    fn prefixed(&self, p: &str) -> ZXDiagram {
        let f = |s: &String| format!("{p}{s}");
        ZXDiagram {
            spiders: self
                .spiders
                .iter()
                .map(|s| Spider {
                    id: f(&s.id),
                    ..s.clone()
                })
                .collect(),
            wires: self.wires.iter().map(|(a, b)| (f(a), f(b))).collect(),
            inputs: self.inputs.iter().map(f).collect(),
            outputs: self.outputs.iter().map(f).collect(),
        }
    }
}

pub fn spider_label(color: Color, phase: Phase) -> Label {
    Label::with_phase(color.as_str(), phase)
}

/// Encodes a diagram as an open hypergraph in unoriented wire mode.
pub fn encode(d: &ZXDiagram) -> Result<Hypergraph, ZXError> {
    d.validate()?;
    let mut ids: HashMap<&str, VertexId> = HashMap::new();
    let mut labels = BTreeMap::new();
    for (i, s) in d.spiders.iter().enumerate() {
        ids.insert(&s.id, i as VertexId);
        labels.insert(i as VertexId, spider_label(s.color, s.phase));
    }
    let mut boundary = Vec::new();
    for (b, kind) in d
        .inputs
        .iter()
        .map(|b| (b, "in"))
        .chain(d.outputs.iter().map(|b| (b, "out")))
    {
        let v = (d.spiders.len() + boundary.len()) as VertexId;
        ids.insert(b, v);
        labels.insert(v, Label::new(kind));
        boundary.push(v);
    }
    let edges = d
        .wires
        .iter()
        .map(|(a, b)| vec![ids[a.as_str()], ids[b.as_str()]]);
    let vertices: Vec<VertexId> = (0..ids.len() as VertexId).collect();
    let h = Hypergraph::new(vertices, Hypergraph::from_edges(edges).edges().to_vec())
        .and_then(|h| h.with_labels(labels))
        .and_then(|h| h.with_boundary(boundary.clone(), boundary))
        .expect("validated diagram encodes");
    Ok(h.with_wire_mode(WireMode::Unoriented))
}

/// Decodes an encoded diagram. Spiders are named `s<vertex>`, boundary
/// points `in<k>` and `out<k>`.
pub fn decode(h: &Hypergraph) -> Result<ZXDiagram, ZXError> {
    let mut names: HashMap<VertexId, String> = HashMap::new();
    let mut d = ZXDiagram::default();
    for &v in h.boundary() {
        let kind = h.label(v).map(|l| l.kind.as_str());
        let name = match kind {
            Some("in") => format!("in{}", d.inputs.len()),
            Some("out") => format!("out{}", d.outputs.len()),
            _ => return Err(ZXError::NotZX(v)),
        };
        if kind == Some("in") {
            d.inputs.push(name.clone());
        } else {
            d.outputs.push(name.clone());
        }
        names.insert(v, name);
    }
    for &v in h.vertices() {
        if h.is_dummy(v) {
            continue;
        }
        let label = h.label(v).ok_or(ZXError::NotZX(v))?;
        let color = match label.kind.as_str() {
            "Z" => Color::Z,
            "X" => Color::X,
            _ => return Err(ZXError::NotZX(v)),
        };
        let id = format!("s{v}");
        names.insert(v, id.clone());
        d.spiders.push(Spider {
            id,
            color,
            phase: label.phase.unwrap_or_default(),
        });
    }
    for e in h.edges() {
        if e.arity() != 2 {
            return Err(ZXError::NotZX(e.vertices[0]));
        }
        d.wires
            .push((names[&e.vertices[0]].clone(), names[&e.vertices[1]].clone()));
    }
    d.validate()?;
    Ok(d)
}

/// The CNOT gate: a Z spider on the control wire joined to an X spider on
/// the target wire.
pub fn cnot() -> ZXDiagram {
    let w = |a: &str, b: &str| (a.to_string(), b.to_string());
    ZXDiagram {
        spiders: vec![
            Spider {
                id: "s0".into(),
                color: Color::Z,
                phase: Phase::ZERO,
            },
            Spider {
                id: "s1".into(),
                color: Color::X,
                phase: Phase::ZERO,
            },
        ],
        wires: vec![
            w("in0", "s0"),
            w("s0", "out0"),
            w("s0", "s1"),
            w("in1", "s1"),
            w("s1", "out1"),
        ],
        inputs: vec!["in0".into(), "in1".into()],
        outputs: vec!["out0".into(), "out1".into()],
    }
}

pub fn identity_wires(n: usize) -> ZXDiagram {
    ZXDiagram {
        spiders: Vec::new(),
        wires: (0..n)
            .map(|i| (format!("in{i}"), format!("out{i}")))
            .collect(),
        inputs: (0..n).map(|i| format!("in{i}")).collect(),
        outputs: (0..n).map(|i| format!("out{i}")).collect(),
    }
}

/// A single spider with `inputs` input legs and `outputs` output legs.
pub fn spider(color: Color, phase: Phase, inputs: usize, outputs: usize) -> ZXDiagram {
    ZXDiagram {
        spiders: vec![Spider {
            id: "s0".into(),
            color,
            phase,
        }],
        wires: (0..inputs)
            .map(|i| (format!("in{i}"), "s0".to_string()))
            .chain((0..outputs).map(|i| ("s0".to_string(), format!("out{i}"))))
            .collect(),
        inputs: (0..inputs).map(|i| format!("in{i}")).collect(),
        outputs: (0..outputs).map(|i| format!("out{i}")).collect(),
    }
}

/// Sequential composition: `first`'s outputs are plugged into `second`'s
/// inputs. Closed wire loops formed by the splice are dropped as scalars.
pub fn compose(first: &ZXDiagram, second: &ZXDiagram) -> Result<ZXDiagram, ZXError> {
    first.validate()?;
    second.validate()?;
    if first.outputs.len() != second.inputs.len() {
        return Err(ZXError::ArityMismatch(
            first.outputs.len(),
            second.inputs.len(),
        ));
    }
    let a = first.prefixed("a.");
    let b = second.prefixed("b.");
    let mut wires: Vec<(String, String)> = a.wires.iter().chain(&b.wires).cloned().collect();
    let mut alias: HashMap<String, String> = HashMap::new();
    for (o, i) in a.outputs.iter().zip(&b.inputs) {
        alias.insert(i.clone(), o.clone());
    }
    for (x, y) in &mut wires {
        for end in [x, y] {
            if let Some(t) = alias.get(end) {
                *end = t.clone();
            }
        }
    }
    // Each joint now has exactly two wire ends; splice them.
    for joint in &a.outputs {
        let ends: Vec<usize> = wires
            .iter()
            .enumerate()
            .filter(|(_, (x, y))| x == joint || y == joint)
            .map(|(i, _)| i)
            .collect();
        let far = |w: &(String, String)| {
            if &w.0 == joint {
                w.1.clone()
            } else {
                w.0.clone()
            }
        };
        match ends.as_slice() {
            [single] => {
                // Both ends on one wire: a closed loop.
                wires.remove(*single);
            }
            [i, j] => {
                let joined = (far(&wires[*i]), far(&wires[*j]));
                wires.remove(*j);
                wires.remove(*i);
                wires.push(joined);
            }
            _ => unreachable!("validated boundary points have degree one"),
        }
    }
    let d = ZXDiagram {
        spiders: a.spiders.into_iter().chain(b.spiders).collect(),
        wires,
        inputs: a.inputs,
        outputs: b.outputs,
    };
    Ok(d.renumbered())
}

/// Parallel composition.
pub fn tensor(d1: &ZXDiagram, d2: &ZXDiagram) -> ZXDiagram {
    let a = d1.prefixed("a.");
    let b = d2.prefixed("b.");
    ZXDiagram {
        spiders: a.spiders.into_iter().chain(b.spiders).collect(),
        wires: a.wires.into_iter().chain(b.wires).collect(),
        inputs: a.inputs.into_iter().chain(b.inputs).collect(),
        outputs: a.outputs.into_iter().chain(b.outputs).collect(),
    }
    .renumbered()
}
