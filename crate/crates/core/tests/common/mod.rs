//! Generators and independent oracles shared by the integration tests and
//! the acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use mwcau_core::canon::{canonical_form, canonicalize, StateKey};
use mwcau_core::compose::{compose_concurrent, compose_parallel};
use mwcau_core::hypergraph::{EdgeId, Hyperedge, Hypergraph, Label, VertexId};
use mwcau_core::multiway::MultiwayGraph;
use mwcau_core::rewrite::{apply_match, find_matches, Match, RewriteRule, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A hypergraph on `1..=max_v` vertices (some possibly isolated) with up to
/// `max_e` edges of arity 1 to 3, optionally labelled with two kinds.
pub fn random_hypergraph(
    rng: &mut ChaCha8Rng,
    max_v: u32,
    max_e: usize,
    labelled: bool,
) -> Hypergraph {
    let n = rng.gen_range(1..=max_v);
    let m = rng.gen_range(0..=max_e);
    let edges: Vec<Hyperedge> = (0..m)
        .map(|i| Hyperedge {
            id: EdgeId(i as u64),
            vertices: (0..rng.gen_range(1..=3))
                .map(|_| rng.gen_range(0..n))
                .collect(),
        })
        .collect();
    let mut labels = BTreeMap::new();
    if labelled {
        for v in 0..n {
            if rng.gen_bool(0.5) {
                labels.insert(v, Label::new(if rng.gen_bool(0.5) { "A" } else { "B" }));
            }
        }
    }
    Hypergraph::new(0..n, edges)
        .unwrap()
        .with_labels(labels)
        .unwrap()
}

/// Relabels vertices by a random injection into sparse ids and shuffles the
/// edge list, assigning fresh edge ids.
pub fn permuted(rng: &mut ChaCha8Rng, h: &Hypergraph) -> Hypergraph {
    let mut targets: Vec<VertexId> = (0..h.vertices().len() as VertexId)
        .map(|i| 3 * i + 7)
        .collect();
    targets.shuffle(rng);
    let map: HashMap<VertexId, VertexId> = h.vertices().iter().copied().zip(targets).collect();
    let mut edges: Vec<Hyperedge> = h.edges().to_vec();
    edges.shuffle(rng);
    let base = rng.gen_range(0..1000u64);
    let edges = edges
        .into_iter()
        .enumerate()
        .map(|(i, e)| Hyperedge {
            id: EdgeId(base + i as u64),
            vertices: e.vertices.iter().map(|v| map[v]).collect(),
        })
        .collect();
    Hypergraph::new(map.values().copied(), edges)
        .unwrap()
        .with_labels(
            h.labels()
                .iter()
                .map(|(v, l)| (map[v], l.clone()))
                .collect(),
        )
        .unwrap()
        .with_boundary(
            h.dummies().iter().map(|v| map[v]),
            h.boundary().iter().map(|v| map[v]).collect(),
        )
        .unwrap()
        .with_wire_mode(h.wire_mode())
}

/// Changes one incidence of one edge, or adds an edge to an edgeless graph.
pub fn mutated(rng: &mut ChaCha8Rng, h: &Hypergraph) -> Hypergraph {
    let vs: Vec<VertexId> = h.vertices().iter().copied().collect();
    let mut edges = h.edges().to_vec();
    if edges.is_empty() {
        edges.push(Hyperedge {
            id: EdgeId(0),
            vertices: vec![vs[0]],
        });
    } else {
        let i = rng.gen_range(0..edges.len());
        let j = rng.gen_range(0..edges[i].vertices.len());
        edges[i].vertices[j] = *vs.choose(rng).unwrap();
    }
    Hypergraph::new(vs, edges)
        .unwrap()
        .with_labels(h.labels().clone())
        .unwrap()
}

fn edge_multiset(
    h: &Hypergraph,
    map: impl Fn(VertexId) -> VertexId,
) -> HashMap<Vec<VertexId>, i64> {
    let mut out = HashMap::new();
    for e in h.edges() {
        let mut vs: Vec<VertexId> = e.vertices.iter().map(|&v| map(v)).collect();
        if h.unordered_pairs() && vs.len() == 2 {
            vs.sort_unstable();
        }
        *out.entry(vs).or_insert(0) += 1;
    }
    out
}

/// Searches every bijection of vertices that preserves labels, dummy typing
/// and boundary order, checking edge multisets incrementally.
pub fn brute_isomorphic(a: &Hypergraph, b: &Hypergraph) -> bool {
    if a.vertices().len() != b.vertices().len()
        || a.edges().len() != b.edges().len()
        || a.wire_mode() != b.wire_mode()
        || a.boundary().len() != b.boundary().len()
    {
        return false;
    }
    let mut order: Vec<VertexId> = a.boundary().to_vec();
    order.extend(a.vertices().iter().filter(|v| !a.boundary().contains(v)));
    let pos: HashMap<VertexId, usize> = order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    // Edges of `a` grouped by the position of their last-assigned vertex.
    let mut closing: Vec<Vec<&Hyperedge>> = vec![Vec::new(); order.len()];
    for e in a.edges() {
        closing[e.vertices.iter().map(|v| pos[v]).max().unwrap()].push(e);
    }
    let target = edge_multiset(b, |v| v);
    let bv: Vec<VertexId> = b.vertices().iter().copied().collect();

    struct Ctx<'a> {
        a: &'a Hypergraph,
        b: &'a Hypergraph,
        order: Vec<VertexId>,
        closing: Vec<Vec<&'a Hyperedge>>,
        bv: Vec<VertexId>,
    }
    fn go(
        c: &Ctx<'_>,
        i: usize,
        map: &mut HashMap<VertexId, VertexId>,
        used: &mut BTreeSet<VertexId>,
        left: &mut HashMap<Vec<VertexId>, i64>,
    ) -> bool {
        if i == c.order.len() {
            return left.values().all(|&n| n == 0);
        }
        let v = c.order[i];
        let candidates: Vec<VertexId> = if i < c.a.boundary().len() {
            vec![c.b.boundary()[i]]
        } else {
            c.bv.clone()
        };
        for w in candidates {
            if used.contains(&w)
                || c.a.label(v) != c.b.label(w)
                || c.a.is_dummy(v) != c.b.is_dummy(w)
            {
                continue;
            }
            map.insert(v, w);
            used.insert(w);
            let mut taken = Vec::new();
            let mut ok = true;
            for e in &c.closing[i] {
                let mut vs: Vec<VertexId> = e.vertices.iter().map(|x| map[x]).collect();
                if c.a.unordered_pairs() && vs.len() == 2 {
                    vs.sort_unstable();
                }
                match left.get_mut(&vs) {
                    Some(n) if *n > 0 => {
                        *n -= 1;
                        taken.push(vs);
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && go(c, i + 1, map, used, left) {
                return true;
            }
            for vs in taken {
                *left.get_mut(&vs).unwrap() += 1;
            }
            used.remove(&w);
            map.remove(&v);
        }
        false
    }
    let ctx = Ctx {
        a,
        b,
        order,
        closing,
        bv,
    };
    go(
        &ctx,
        0,
        &mut HashMap::new(),
        &mut BTreeSet::new(),
        &mut target.clone(),
    )
}

/// A rule over binary edges with one or two left edges on variables
/// `a, b, c` and one to three right edges, a quarter of whose positions are
/// fresh.
pub fn random_rule(rng: &mut ChaCha8Rng, name: &str) -> RewriteRule {
    let vars = ["a", "b", "c"];
    let lhs: Vec<Vec<Term>> = (0..rng.gen_range(1..=2))
        .map(|_| {
            (0..2)
                .map(|_| Term::var(vars.choose(rng).unwrap()))
                .collect()
        })
        .collect();
    let mut lhs_vars: Vec<&str> = lhs.iter().flatten().filter_map(Term::as_var).collect();
    lhs_vars.sort_unstable();
    lhs_vars.dedup();
    let rhs = (0..rng.gen_range(1..=3))
        .map(|_| {
            (0..2)
                .map(|_| {
                    if rng.gen_bool(0.25) {
                        Term::var(["u", "v"].choose(rng).unwrap())
                    } else {
                        Term::var(lhs_vars.choose(rng).unwrap())
                    }
                })
                .collect()
        })
        .collect();
    RewriteRule::new(name, lhs, rhs)
}

/// A binary host graph with 2 to 6 edges on 4 vertices.
pub fn random_host(rng: &mut ChaCha8Rng) -> Hypergraph {
    let m = rng.gen_range(2..=6);
    Hypergraph::from_edges((0..m).map(|_| vec![rng.gen_range(0..4u32), rng.gen_range(0..4u32)]))
}

pub fn pruned_key(h: &Hypergraph) -> StateKey {
    canonical_form(&h.prune_isolated()).key
}

/// Replays `e1` on its source representative, maps `e2`'s match back onto
/// the raw result, replays it and intersects raw edge ids.
pub fn replay_causal(mw: &MultiwayGraph, rules: &[RewriteRule]) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for e1 in &mw.events {
        let r1 = apply_match(&rules[e1.rule], &mw.states[e1.from].graph, &e1.matched).unwrap();
        let raw = r1.result.prune_isolated();
        let (ck, rep) = canonicalize(&raw);
        assert_eq!(
            rep, mw.states[e1.to].graph,
            "event {} lands on its recorded state",
            e1.id
        );
        let back_v: HashMap<VertexId, VertexId> =
            ck.vertex_map.iter().map(|(a, b)| (*b, *a)).collect();
        let back_e: HashMap<usize, EdgeId> = ck.edge_index.iter().map(|(a, b)| (*b, *a)).collect();
        let created: BTreeSet<EdgeId> = r1.created.iter().copied().collect();
        for e2 in mw.events.iter().filter(|e| e.from == e1.to) {
            let m = Match {
                rule: e2.matched.rule.clone(),
                binding: e2
                    .matched
                    .binding
                    .iter()
                    .map(|(k, v)| (k.clone(), back_v[v]))
                    .collect(),
                edges: e2
                    .matched
                    .edges
                    .iter()
                    .map(|e| back_e[&(e.0 as usize)])
                    .collect(),
                phases: e2.matched.phases.clone(),
            };
            let r2 = apply_match(&rules[e2.rule], &raw, &m).unwrap();
            if r2.consumed.iter().any(|e| created.contains(e)) {
                out.insert((e1.id, e2.id));
            }
        }
    }
    out
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct ComposeTally {
    pub parallel_checked: usize,
    pub parallel_ok: usize,
    pub concurrent_checked: usize,
    pub concurrent_ok: usize,
}

impl ComposeTally {
    pub fn all_ok(&self) -> bool {
        self.parallel_ok == self.parallel_checked && self.concurrent_ok == self.concurrent_checked
    }
}

fn match_with_edges(rule: &RewriteRule, host: &Hypergraph, edges: &[EdgeId]) -> Option<Match> {
    find_matches(rule, host)
        .into_iter()
        .find(|m| m.edges == edges)
}

/// For every pair of edge-disjoint matches of `p1` and `p2` in `g`, checks
/// that both sequential orders and the parallel rule agree; for every match
/// of `p2` that consumes edges created by a match of `p1`, checks that the
/// concurrent rule along that overlap reproduces the two-step result.
pub fn check_compose_fixture(
    p1: &RewriteRule,
    p2: &RewriteRule,
    g: &Hypergraph,
    tally: &mut ComposeTally,
) {
    let m1s = find_matches(p1, g);
    let m2s = find_matches(p2, g);
    let par = compose_parallel(p1, p2).unwrap();
    for m1 in &m1s {
        for m2 in m2s
            .iter()
            .filter(|m2| m2.edges.iter().all(|e| !m1.edges.contains(e)))
        {
            tally.parallel_checked += 1;
            let a = apply_match(p1, g, m1).unwrap().result;
            let a = apply_match(p2, &a, m2).unwrap().result;
            let b = apply_match(p2, g, m2).unwrap().result;
            let b = apply_match(p1, &b, m1).unwrap().result;
            let edges: Vec<EdgeId> = m1.edges.iter().chain(&m2.edges).copied().collect();
            let ok = match_with_edges(&par, g, &edges).is_some_and(|m| {
                let c = apply_match(&par, g, &m).unwrap().result;
                let k = pruned_key(&a);
                k == pruned_key(&b) && k == pruned_key(&c)
            });
            tally.parallel_ok += usize::from(ok);
        }
    }
    for m1 in &m1s {
        let r1 = apply_match(p1, g, m1).unwrap();
        for m2 in find_matches(p2, &r1.result) {
            let overlap: Vec<(usize, usize)> = m2
                .edges
                .iter()
                .enumerate()
                .filter_map(|(j, e)| r1.created.iter().position(|c| c == e).map(|i| (i, j)))
                .collect();
            if overlap.is_empty() {
                continue;
            }
            tally.concurrent_checked += 1;
            let two_step = apply_match(p2, &r1.result, &m2).unwrap().result;
            let Ok(comp) = compose_concurrent(p1, p2, &overlap) else {
                continue;
            };
            let edges: Vec<EdgeId> = m1
                .edges
                .iter()
                .copied()
                .chain(
                    m2.edges
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| !overlap.iter().any(|o| o.1 == *j))
                        .map(|(_, e)| *e),
                )
                .collect();
            let ok = match_with_edges(&comp, g, &edges).is_some_and(|m| {
                pruned_key(&apply_match(&comp, g, &m).unwrap().result) == pruned_key(&two_step)
            });
            tally.concurrent_ok += usize::from(ok);
        }
    }
}
