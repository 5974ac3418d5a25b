//! Canonical forms and isomorphism testing for hypergraphs.
//!
//! The hypergraph is read as a colored bipartite incidence structure: vertex
//! nodes are colored by (typing, boundary position, label), edge nodes by
//! arity, and every incidence carries its position index (dropped for
//! unordered binary edges). Colors are refined to a stable partition, then
//! vertices are individualized one cell at a time with backtracking. The
//! canonical labeling is the leaf with the smallest certificate. Automorphisms
//! discovered between equivalent leaves prune the search tree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::hypergraph::{EdgeId, Hyperedge, Hypergraph, Label, VertexId, WireMode};

/// Byte string identifying an isomorphism class.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateKey(Vec<u8>);

impl StateKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// 64-bit FNV-1a digest, for display only.
    pub fn digest(&self) -> u64 {
        self.0.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
            (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
        })
    }
}

impl fmt::Debug for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateKey({:016x})", self.digest())
    }
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.digest())
    }
}

/// Canonical key plus the certified relabeling onto the canonical
/// representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalKey {
    pub key: StateKey,
    /// Original vertex id to canonical vertex id (`0..n`).
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    /// Original edge id to its index in the canonical edge order.
    pub edge_index: BTreeMap<EdgeId, usize>,
}

impl CanonicalKey {
    /// Applies the relabeling to `h`, producing the canonical representative:
    /// vertices `0..n`, edges sorted canonically with ids equal to their index,
    /// unordered binary edges written in ascending order.
    pub fn apply(&self, h: &Hypergraph) -> Hypergraph {
        let map = |v: &VertexId| self.vertex_map[v];
        let mut edges: Vec<Hyperedge> = h
            .edges()
            .iter()
            .map(|e| {
                let mut vs: Vec<VertexId> = e.vertices.iter().map(map).collect();
                if h.unordered_pairs() && vs.len() == 2 {
                    vs.sort_unstable();
                }
                Hyperedge {
                    id: EdgeId(self.edge_index[&e.id] as u64),
                    vertices: vs,
                }
            })
            .collect();
        edges.sort_by_key(|e| e.id);
        Hypergraph::from_parts(
            h.vertices().iter().map(map).collect(),
            edges,
            h.labels()
                .iter()
                .map(|(v, l)| (map(v), l.clone()))
                .collect(),
            h.dummies().iter().map(map).collect(),
            h.boundary().iter().map(map).collect(),
            h.wire_mode(),
        )
    }
}

pub fn canonical_form(h: &Hypergraph) -> CanonicalKey {
    let s = Structure::new(h);
    let labeling = s.canonical_labeling();
    s.finish(h, &labeling)
}

/// Canonical key together with the canonical representative.
pub fn canonicalize(h: &Hypergraph) -> (CanonicalKey, Hypergraph) {
    let ck = canonical_form(h);
    let rep = ck.apply(h);
    (ck, rep)
}

pub fn is_isomorphic(a: &Hypergraph, b: &Hypergraph) -> bool {
    if a.vertices().len() != b.vertices().len() || a.edges().len() != b.edges().len() {
        return false;
    }
    canonical_form(a).key == canonical_form(b).key
}

type Descriptor = (u8, u32, Option<Label>);

struct Structure {
    ids: Vec<VertexId>,
    edges: Vec<Vec<u32>>,
    unordered: Vec<bool>,
    descriptors: Vec<Descriptor>,
    vdesc: Vec<u32>,
    edge_init: Vec<u32>,
    incident: Vec<Vec<(u32, u32)>>,
    mode: WireMode,
}

struct Leaf {
    cert: Vec<u32>,
    labeling: Vec<u32>,
    path: Vec<usize>,
}

struct Search<'a> {
    s: &'a Structure,
    first: Option<Leaf>,
    best: Option<Leaf>,
    automorphisms: Vec<Vec<u32>>,
}

fn rank<T: Ord + Clone>(sigs: &[T]) -> Vec<u32> {
    let mut sorted = sigs.to_vec();
    sorted.sort();
    sorted.dedup();
    sigs.iter()
        .map(|s| sorted.binary_search(s).unwrap() as u32)
        .collect()
}

fn class_count(colors: &[u32]) -> usize {
    colors.iter().copied().collect::<BTreeSet<_>>().len()
}

impl Structure {
    fn new(h: &Hypergraph) -> Structure {
        let ids: Vec<VertexId> = h.vertices().iter().copied().collect();
        let index: BTreeMap<VertexId, u32> = ids
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        let boundary_pos: BTreeMap<VertexId, u32> = h
            .boundary()
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        let descs: Vec<Descriptor> = ids
            .iter()
            .map(|v| {
                (
                    h.is_dummy(*v) as u8,
                    boundary_pos.get(v).copied().unwrap_or(u32::MAX),
                    h.label(*v).cloned(),
                )
            })
            .collect();
        let vdesc = rank(&descs);
        let mut descriptors = descs;
        descriptors.sort();
        descriptors.dedup();

        let edges: Vec<Vec<u32>> = h
            .edges()
            .iter()
            .map(|e| e.vertices.iter().map(|v| index[v]).collect())
            .collect();
        let unordered: Vec<bool> = edges
            .iter()
            .map(|e| h.unordered_pairs() && e.len() == 2)
            .collect();
        let edge_init = rank(
            &edges
                .iter()
                .zip(&unordered)
                .map(|(e, &u)| (e.len(), u))
                .collect::<Vec<_>>(),
        );
        let mut incident = vec![Vec::new(); ids.len()];
        for (ei, e) in edges.iter().enumerate() {
            for (pos, &v) in e.iter().enumerate() {
                let pos = if unordered[ei] { 0 } else { pos as u32 };
                incident[v as usize].push((ei as u32, pos));
            }
        }
        Structure {
            ids,
            edges,
            unordered,
            descriptors,
            vdesc,
            edge_init,
            incident,
            mode: h.wire_mode(),
        }
    }

    fn refine(&self, vc: &mut Vec<u32>, ec: &mut Vec<u32>) {
        let mut nv = class_count(vc);
        let mut ne = class_count(ec);
        loop {
            let esig: Vec<(u32, Vec<u32>)> = self
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let mut cs: Vec<u32> = e.iter().map(|&v| vc[v as usize]).collect();
                    if self.unordered[i] {
                        cs.sort_unstable();
                    }
                    (ec[i], cs)
                })
                .collect();
            *ec = rank(&esig);
            let vsig: Vec<(u32, Vec<(u32, u32)>)> = self
                .incident
                .iter()
                .enumerate()
                .map(|(v, inc)| {
                    let mut cs: Vec<(u32, u32)> =
                        inc.iter().map(|&(e, p)| (ec[e as usize], p)).collect();
                    cs.sort_unstable();
                    (vc[v], cs)
                })
                .collect();
            *vc = rank(&vsig);
            let (nv2, ne2) = (class_count(vc), class_count(ec));
            if nv2 == nv && ne2 == ne {
                break;
            }
            nv = nv2;
            ne = ne2;
        }
    }

    fn mapped_edges(&self, labeling: &[u32]) -> Vec<(Vec<u32>, usize)> {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let mut m: Vec<u32> = e.iter().map(|&v| labeling[v as usize]).collect();
                if self.unordered[i] {
                    m.sort_unstable();
                }
                (m, i)
            })
            .collect()
    }

    fn certificate(&self, labeling: &[u32]) -> Vec<u32> {
        let n = self.ids.len();
        let mut by_rank = vec![0u32; n];
        for (v, &r) in labeling.iter().enumerate() {
            by_rank[r as usize] = self.vdesc[v];
        }
        let mut edges = self.mapped_edges(labeling);
        edges.sort_by(|a, b| (&a.0, a.0.len()).cmp(&(&b.0, b.0.len())));
        let mut cert =
            Vec::with_capacity(2 + n + edges.iter().map(|e| e.0.len() + 1).sum::<usize>());
        cert.push(n as u32);
        cert.push(edges.len() as u32);
        cert.extend(by_rank);
        for (e, _) in edges {
            cert.push(e.len() as u32);
            cert.extend(e);
        }
        cert
    }

    fn canonical_labeling(&self) -> Vec<u32> {
        let n = self.ids.len();
        if n == 0 {
            return Vec::new();
        }
        let mut search = Search {
            s: self,
            first: None,
            best: None,
            automorphisms: Vec::new(),
        };
        let mut path = Vec::new();
        search.visit(self.vdesc.clone(), self.edge_init.clone(), &mut path);
        search
            .best
            .expect("search visits at least one leaf")
            .labeling
    }

    fn finish(&self, h: &Hypergraph, labeling: &[u32]) -> CanonicalKey {
        let vertex_map: BTreeMap<VertexId, VertexId> = self
            .ids
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, labeling[i]))
            .collect();
        let mut edges = self.mapped_edges(labeling);
        edges.sort_by(|a, b| (&a.0, a.0.len(), a.1).cmp(&(&b.0, b.0.len(), b.1)));
        let edge_index: BTreeMap<EdgeId, usize> = edges
            .iter()
            .enumerate()
            .map(|(ci, (_, orig))| (h.edges()[*orig].id, ci))
            .collect();

        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"HG1");
        bytes.push(match self.mode {
            WireMode::Oriented => 0,
            WireMode::Unoriented => 1,
        });
        bytes.extend_from_slice(&(self.descriptors.len() as u32).to_le_bytes());
        for (kind, pos, label) in &self.descriptors {
            bytes.push(*kind);
            bytes.extend_from_slice(&pos.to_le_bytes());
            match label {
                None => bytes.push(0),
                Some(l) => {
                    bytes.push(1);
                    bytes.extend_from_slice(&(l.kind.len() as u32).to_le_bytes());
                    bytes.extend_from_slice(l.kind.as_bytes());
                    match l.phase {
                        None => bytes.push(0),
                        Some(p) => {
                            bytes.push(1);
                            bytes.extend_from_slice(&p.numerator().to_le_bytes());
                            bytes.extend_from_slice(&p.denominator().to_le_bytes());
                        }
                    }
                }
            }
        }
        for x in self.certificate(labeling) {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        CanonicalKey {
            key: StateKey(bytes),
            vertex_map,
            edge_index,
        }
    }
}

impl Search<'_> {
    /// Returns the tree level to jump back to after an automorphism was found.
    fn visit(
        &mut self,
        mut vc: Vec<u32>,
        mut ec: Vec<u32>,
        path: &mut Vec<usize>,
    ) -> Option<usize> {
        self.s.refine(&mut vc, &mut ec);
        let level = path.len();
        let n = vc.len();

        let mut counts = vec![0usize; n];
        for &c in &vc {
            counts[c as usize] += 1;
        }
        let Some(target) = (0..n).find(|&c| counts[c] > 1) else {
            return self.leaf(vc, path);
        };
        let cell: Vec<usize> = (0..n).filter(|&v| vc[v] as usize == target).collect();

        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if !tried.is_empty() {
                let orbits = self.orbits(path, n);
                let root = orbits.find(v);
                if tried.iter().any(|&t| orbits.find(t) == root) {
                    continue;
                }
            }
            let ind: Vec<u32> = rank(
                &vc.iter()
                    .enumerate()
                    .map(|(u, &c)| (c, u != v))
                    .collect::<Vec<_>>(),
            );
            path.push(v);
            let jump = self.visit(ind, ec.clone(), path);
            path.pop();
            tried.push(v);
            if let Some(j) = jump {
                if j < level {
                    return Some(j);
                }
            }
        }
        None
    }

    fn leaf(&mut self, labeling: Vec<u32>, path: &[usize]) -> Option<usize> {
        let cert = self.s.certificate(&labeling);
        let leaf = Leaf {
            cert,
            labeling,
            path: path.to_vec(),
        };
        let Some(first) = &self.first else {
            self.first = Some(Leaf {
                cert: leaf.cert.clone(),
                labeling: leaf.labeling.clone(),
                path: leaf.path.clone(),
            });
            self.best = Some(leaf);
            return None;
        };
        if leaf.cert == first.cert {
            let aut = automorphism(&first.labeling, &leaf.labeling);
            let j = common_prefix(&first.path, &leaf.path);
            self.automorphisms.push(aut);
            return Some(j);
        }
        let best = self.best.as_ref().unwrap();
        match leaf.cert.cmp(&best.cert) {
            std::cmp::Ordering::Less => {
                self.best = Some(leaf);
                None
            }
            std::cmp::Ordering::Equal => {
                let aut = automorphism(&best.labeling, &leaf.labeling);
                let j = common_prefix(&best.path, &leaf.path);
                self.automorphisms.push(aut);
                Some(j)
            }
            std::cmp::Ordering::Greater => None,
        }
    }

    fn orbits(&self, path: &[usize], n: usize) -> UnionFind {
        let mut uf = UnionFind::new(n);
        for aut in &self.automorphisms {
            if path.iter().all(|&p| aut[p] as usize == p) {
                for (i, &j) in aut.iter().enumerate() {
                    uf.union(i, j as usize);
                }
            }
        }
        uf
    }
}

/// Maps each vertex of the reference leaf to the vertex holding the same
/// canonical rank in the other leaf.
fn automorphism(reference: &[u32], other: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; other.len()];
    for (v, &r) in other.iter().enumerate() {
        inv[r as usize] = v as u32;
    }
    reference.iter().map(|&r| inv[r as usize]).collect()
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

struct UnionFind {
    parent: std::cell::RefCell<Vec<usize>>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: std::cell::RefCell::new((0..n).collect()),
        }
    }

    fn find(&self, x: usize) -> usize {
        let mut p = self.parent.borrow_mut();
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent.get_mut()[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::Phase;

    fn h<const N: usize>(edges: &[[VertexId; N]]) -> Hypergraph {
        Hypergraph::from_edges(edges.iter())
    }

    #[test]
    fn pure_relabeling_shares_key() {
        assert_eq!(
            canonical_form(&h(&[[5, 7]])).key,
            canonical_form(&h(&[[0, 1]])).key
        );
    }

    #[test]
    fn incidence_order_is_significant() {
        // {{0,1}} vs {{1,0}} are the same up to renaming; {{0,1},{1,2}} vs
        // {{0,1},{2,1}} are not.
        assert!(is_isomorphic(&h(&[[0, 1]]), &h(&[[1, 0]])));
        assert!(!is_isomorphic(&h(&[[0, 1], [1, 2]]), &h(&[[0, 1], [2, 1]])));
        assert_ne!(
            canonical_form(&h(&[[0, 0], [0, 1]])).key,
            canonical_form(&h(&[[0, 0], [1, 0]])).key
        );
    }

    #[test]
    fn double_self_loops() {
        assert!(is_isomorphic(&h(&[[0, 0], [0, 0]]), &h(&[[3, 3], [3, 3]])));
    }

    #[test]
    fn empty_graphs() {
        assert!(is_isomorphic(&Hypergraph::empty(), &Hypergraph::empty()));
    }

    #[test]
    fn many_isolated_vertices_are_fast() {
        let g = Hypergraph::new(0..40, vec![]).unwrap();
        let g2 = Hypergraph::new(100..140, vec![]).unwrap();
        assert!(is_isomorphic(&g, &g2));
    }

    #[test]
    fn symmetric_cycle() {
        let c: Vec<[u32; 2]> = (0..12).map(|i| [i, (i + 1) % 12]).collect();
        let d: Vec<[u32; 2]> = (0..12)
            .map(|i| [(i * 5) % 12, ((i + 1) * 5) % 12])
            .collect();
        assert!(is_isomorphic(
            &Hypergraph::from_edges(c),
            &Hypergraph::from_edges(d)
        ));
    }

    #[test]
    fn labels_are_respected() {
        let base = h(&[[0, 1]]);
        let a = base
            .clone()
            .with_labels([(0, Label::with_phase("Z", Phase::ZERO))].into())
            .unwrap();
        let b = base
            .clone()
            .with_labels([(1, Label::with_phase("Z", Phase::ZERO))].into())
            .unwrap();
        let c = base
            .with_labels([(0, Label::with_phase("Z", Phase::PI))].into())
            .unwrap();
        assert!(!is_isomorphic(&a, &b));
        assert!(!is_isomorphic(&a, &c));
    }

    #[test]
    fn unoriented_wires_ignore_direction() {
        let a = h(&[[0, 1], [1, 2]]).with_wire_mode(WireMode::Unoriented);
        let b = h(&[[0, 1], [2, 1]]).with_wire_mode(WireMode::Unoriented);
        assert!(is_isomorphic(&a, &b));
        assert!(!is_isomorphic(&a, &h(&[[0, 1], [1, 2]])));
    }

    #[test]
    fn boundary_order_is_respected() {
        let g = h(&[[0, 2], [1, 3]]);
        let a = g.clone().with_boundary([0, 1], vec![0, 1]).unwrap();
        let b = g.with_boundary([0, 1], vec![1, 0]).unwrap();
        assert!(is_isomorphic(&a, &a.clone()));
        // Both interface orders are valid and isomorphic through a swap of the
        // two components.
        assert!(is_isomorphic(&a, &b));
        let lopsided = h(&[[0, 2], [2, 2], [1, 3]]);
        let c = lopsided.clone().with_boundary([0, 1], vec![0, 1]).unwrap();
        let d = lopsided.with_boundary([0, 1], vec![1, 0]).unwrap();
        assert!(!is_isomorphic(&c, &d));
    }

    #[test]
    fn representative_is_fixed_point() {
        let g = h(&[[3, 9], [9, 4], [4, 3], [3, 3]]);
        let (ck, rep) = canonicalize(&g);
        let (ck2, rep2) = canonicalize(&rep);
        assert_eq!(ck.key, ck2.key);
        assert_eq!(rep, rep2);
    }
}
