//! Directed labeled hypergraphs with stable edge identities.
//!
//! A [`Hypergraph`] is the state of a multiway system and the carrier of
//! string diagrams. Edges are ordered vertex sequences identified by an
//! [`EdgeId`]; duplicate contents are allowed, so identity is always by id.
//!
//! Open hypergraphs are hypergraphs whose vertices are typed either as
//! *true* vertices or *dummy* vertices. A dummy vertex sits on the dangling
//! end of exactly one wire, and the ordered list of dummies is the interface
//! (`boundary`) of the diagram. A closed hypergraph has no dummies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phase::Phase;

pub type VertexId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u64);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hyperedge {
    pub id: EdgeId,
    pub vertices: Vec<VertexId>,
}

impl Hyperedge {
    pub fn arity(&self) -> usize {
        self.vertices.len()
    }
}

/// Vertex annotation. ZX spiders use kinds `"Z"`/`"X"` with a phase; boundary
/// points of encoded diagrams use `"in"`/`"out"` without one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<Phase>,
}

impl Label {
    pub fn new(kind: impl Into<String>) -> Label {
        Label {
            kind: kind.into(),
            phase: None,
        }
    }

    pub fn with_phase(kind: impl Into<String>, phase: Phase) -> Label {
        Label {
            kind: kind.into(),
            phase: Some(phase),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            Some(p) => write!(f, "{}({})", self.kind, p),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// How arity-2 edges are read. `Unoriented` makes every binary edge an
/// unordered pair, which is how ZX wires are encoded; edges of other arities
/// stay ordered.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum WireMode {
    #[default]
    Oriented,
    Unoriented,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexKind {
    True,
    Dummy,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("edge {edge} references unknown vertex {vertex}")]
    UnknownVertex { edge: EdgeId, vertex: VertexId },
    #[error("duplicate edge id {0}")]
    DuplicateEdgeId(EdgeId),
    #[error("edge {0} has arity 0")]
    EmptyEdge(EdgeId),
    #[error("label attached to unknown vertex {0}")]
    UnknownLabeledVertex(VertexId),
    #[error("dummy or boundary vertex {0} is not in the vertex set")]
    UnknownDummy(VertexId),
}

/// A violation of the open-hypergraph typing invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum OpenViolation {
    /// A dummy vertex must occupy exactly one edge position.
    DummyDegree {
        vertex: VertexId,
        occurrences: usize,
    },
    /// A dummy vertex is missing from the boundary list.
    BoundaryMissing(VertexId),
    /// A vertex occurs more than once in the boundary list.
    BoundaryDuplicate(VertexId),
    /// A boundary entry is not typed as a dummy.
    BoundaryNotDummy(VertexId),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    vertices: BTreeSet<VertexId>,
    edges: Vec<Hyperedge>,
    labels: BTreeMap<VertexId, Label>,
    dummies: BTreeSet<VertexId>,
    boundary: Vec<VertexId>,
    wire_mode: WireMode,
}

impl Hypergraph {
    pub fn empty() -> Hypergraph {
        Hypergraph::default()
    }

    /// Builds a closed hypergraph, checking that every incidence refers to a
    /// listed vertex and that edge ids are unique.
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: Vec<Hyperedge>,
    ) -> Result<Hypergraph, HypergraphError> {
        let h = Hypergraph {
            vertices: vertices.into_iter().collect(),
            edges,
            ..Hypergraph::default()
        };
        h.validate()?;
        Ok(h)
    }

    /// Builds a closed hypergraph from incidence lists; ids are assigned as
    /// `e0, e1, ...` in listed order and the vertex set is whatever the edges
    /// reference.
    ///
    /// Panics on an empty incidence list.
    pub fn from_edges<I, E>(edges: I) -> Hypergraph
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[VertexId]>,
    {
        let edges: Vec<Hyperedge> = edges
            .into_iter()
            .enumerate()
            .map(|(i, e)| Hyperedge {
                id: EdgeId(i as u64),
                vertices: e.as_ref().to_vec(),
            })
            .collect();
        let vertices = edges
            .iter()
            .flat_map(|e| e.vertices.iter().copied())
            .collect();
        let h = Hypergraph {
            vertices,
            edges,
            ..Hypergraph::default()
        };
        h.validate().expect("from_edges: malformed edge list");
        h
    }

    pub fn with_labels(
        mut self,
        labels: BTreeMap<VertexId, Label>,
    ) -> Result<Hypergraph, HypergraphError> {
        self.labels = labels;
        self.validate()?;
        Ok(self)
    }

    /// Types the given vertices as dummies with `boundary` as the interface
    /// order. Open-typing invariants are not enforced here; see
    /// [`validate_open`].
    pub fn with_boundary(
        mut self,
        dummies: impl IntoIterator<Item = VertexId>,
        boundary: Vec<VertexId>,
    ) -> Result<Hypergraph, HypergraphError> {
        self.dummies = dummies.into_iter().collect();
        self.boundary = boundary;
        self.validate()?;
        Ok(self)
    }

    pub fn with_wire_mode(mut self, mode: WireMode) -> Hypergraph {
        self.wire_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), HypergraphError> {
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if !seen.insert(e.id) {
                return Err(HypergraphError::DuplicateEdgeId(e.id));
            }
            if e.vertices.is_empty() {
                return Err(HypergraphError::EmptyEdge(e.id));
            }
            if let Some(&v) = e.vertices.iter().find(|v| !self.vertices.contains(v)) {
                return Err(HypergraphError::UnknownVertex {
                    edge: e.id,
                    vertex: v,
                });
            }
        }
        if let Some(&v) = self.labels.keys().find(|v| !self.vertices.contains(v)) {
            return Err(HypergraphError::UnknownLabeledVertex(v));
        }
        if let Some(&v) = self
            .dummies
            .iter()
            .chain(self.boundary.iter())
            .find(|v| !self.vertices.contains(v))
        {
            return Err(HypergraphError::UnknownDummy(v));
        }
        Ok(())
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Hyperedge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, Label> {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> Option<&Label> {
        self.labels.get(&v)
    }

    pub fn dummies(&self) -> &BTreeSet<VertexId> {
        &self.dummies
    }

    pub fn boundary(&self) -> &[VertexId] {
        &self.boundary
    }

    pub fn wire_mode(&self) -> WireMode {
        self.wire_mode
    }

    pub fn is_open(&self) -> bool {
        !self.dummies.is_empty() || !self.boundary.is_empty()
    }

    pub fn vertex_kind(&self, v: VertexId) -> VertexKind {
        if self.dummies.contains(&v) {
            VertexKind::Dummy
        } else {
            VertexKind::True
        }
    }

    pub fn is_dummy(&self, v: VertexId) -> bool {
        self.dummies.contains(&v)
    }

    /// True when binary edges are unordered in this graph.
    pub fn unordered_pairs(&self) -> bool {
        self.wire_mode == WireMode::Unoriented
    }

    /// Next free vertex id (`max + 1`, or 0 for an empty graph).
    pub fn next_vertex_id(&self) -> VertexId {
        self.vertices.iter().next_back().map_or(0, |v| v + 1)
    }

    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.edges.iter().map(|e| e.id.0 + 1).max().unwrap_or(0))
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|e| e.vertices.iter().filter(|&&u| u == v).count())
            .sum()
    }

    /// Drops every non-dummy vertex that no edge references.
    pub fn prune_isolated(&self) -> Hypergraph {
        let used: BTreeSet<VertexId> = self
            .edges
            .iter()
            .flat_map(|e| e.vertices.iter().copied())
            .collect();
        let keep = |v: &VertexId| used.contains(v) || self.dummies.contains(v);
        Hypergraph {
            vertices: self.vertices.iter().copied().filter(keep).collect(),
            edges: self.edges.clone(),
            labels: self
                .labels
                .iter()
                .filter(|(v, _)| keep(v))
                .map(|(v, l)| (*v, l.clone()))
                .collect(),
            dummies: self.dummies.clone(),
            boundary: self.boundary.clone(),
            wire_mode: self.wire_mode,
        }
    }

    /// Raw constructor for callers that maintain the invariants themselves.
    pub(crate) fn from_parts(
        vertices: BTreeSet<VertexId>,
        edges: Vec<Hyperedge>,
        labels: BTreeMap<VertexId, Label>,
        dummies: BTreeSet<VertexId>,
        boundary: Vec<VertexId>,
        wire_mode: WireMode,
    ) -> Hypergraph {
        let h = Hypergraph {
            vertices,
            edges,
            labels,
            dummies,
            boundary,
            wire_mode,
        };
        debug_assert_eq!(h.validate(), Ok(()));
        h
    }

    /// Compact `{{0,1},{1,2}}` rendering of the edge list.
    pub fn edge_list_string(&self) -> String {
        let parts: Vec<String> = self
            .edges
            .iter()
            .map(|e| {
                let vs: Vec<String> = e.vertices.iter().map(|v| v.to_string()).collect();
                format!("{{{}}}", vs.join(","))
            })
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.edge_list_string())?;
        if !self.labels.is_empty() {
            let ls: Vec<String> = self
                .labels
                .iter()
                .map(|(v, l)| format!("{v}:{l}"))
                .collect();
            write!(f, " [{}]", ls.join(" "))?;
        }
        Ok(())
    }
}

/// Checks the open-hypergraph typing: every dummy occupies exactly one edge
/// position and the boundary lists exactly the dummies, each once.
pub fn validate_open(h: &Hypergraph) -> Result<(), Vec<OpenViolation>> {
    let mut violations = Vec::new();
    let mut occurrences: BTreeMap<VertexId, usize> = h.dummies.iter().map(|&v| (v, 0)).collect();
    for e in &h.edges {
        for v in &e.vertices {
            if let Some(c) = occurrences.get_mut(v) {
                *c += 1;
            }
        }
    }
    for (&vertex, &occ) in &occurrences {
        if occ != 1 {
            violations.push(OpenViolation::DummyDegree {
                vertex,
                occurrences: occ,
            });
        }
    }
    let mut listed = BTreeSet::new();
    for &v in &h.boundary {
        if !listed.insert(v) {
            violations.push(OpenViolation::BoundaryDuplicate(v));
        }
        if !h.dummies.contains(&v) {
            violations.push(OpenViolation::BoundaryNotDummy(v));
        }
    }
    for &v in &h.dummies {
        if !listed.contains(&v) {
            violations.push(OpenViolation::BoundaryMissing(v));
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}
