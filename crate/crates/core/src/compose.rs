//! Rule composition: E-concurrent rules built from an overlap between the
//! right side of one rule and the left side of the next, and parallel rules
//! built from a disjoint union.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::canon::{canonical_form, StateKey};
use crate::hypergraph::{Hypergraph, Label, VertexId};
use crate::rewrite::{PatternEdge, PhasePattern, RewriteRule, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComposeError {
    #[error("overlap is empty")]
    EmptyOverlap,
    #[error("overlap index ({0}, {1}) out of range")]
    OutOfRange(usize, usize),
    #[error("overlap is not injective")]
    NotInjective,
    #[error("overlapped edges {0} and {1} have different arities")]
    ArityMismatch(usize, usize),
    #[error("overlap identifies distinct constants {0} and {1}")]
    ConstantClash(VertexId, VertexId),
    #[error("overlap identifies the fresh vertex `{0}` with another vertex")]
    FreshIdentified(String),
    #[error(
        "fresh vertex `{0}` is required by an edge the second rule matches in the original host"
    )]
    FreshEscapes(String),
    #[error("composition of labeled or gluing rules is not supported")]
    Unsupported,
}

/// Renames the variables of `p2` that collide with any variable of `p1` by
/// appending primes.
fn rename_apart(p1: &RewriteRule, p2: &RewriteRule) -> RewriteRule {
    let names = |r: &RewriteRule| -> BTreeSet<String> {
        let phase_vars = r.lhs_labels.values().filter_map(|p| match &p.phase {
            Some(PhasePattern::Var(v)) => Some(v.clone()),
            _ => None,
        });
        r.lhs_vars()
            .into_iter()
            .chain(r.rhs_vars())
            .chain(phase_vars)
            .collect()
    };
    let taken = names(p1);
    let own = names(p2);
    let mut map = HashMap::new();
    let mut used: BTreeSet<String> = taken.union(&own).cloned().collect();
    for v in &own {
        if taken.contains(v) {
            let mut name = format!("{v}'");
            while used.contains(&name) {
                name.push('\'');
            }
            used.insert(name.clone());
            map.insert(v.clone(), name);
        }
    }
    p2.rename_vars(|v| map.get(v).cloned().unwrap_or_else(|| v.to_string()))
}

struct Unifier {
    index: HashMap<Term, usize>,
    terms: Vec<Term>,
    parent: Vec<usize>,
}

impl Unifier {
    fn new() -> Unifier {
        Unifier {
            index: HashMap::new(),
            terms: Vec::new(),
            parent: Vec::new(),
        }
    }

    fn id(&mut self, t: &Term) -> usize {
        if let Some(&i) = self.index.get(t) {
            return i;
        }
        let i = self.terms.len();
        self.index.insert(t.clone(), i);
        self.terms.push(t.clone());
        self.parent.push(i);
        i
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: &Term, b: &Term) {
        let (ia, ib) = (self.id(a), self.id(b));
        let (ra, rb) = (self.find(ia), self.find(ib));
        // Keep the earlier-registered term as root so p1 names win.
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }

    fn classes(&mut self) -> BTreeMap<usize, Vec<Term>> {
        let mut out: BTreeMap<usize, Vec<Term>> = BTreeMap::new();
        for i in 0..self.terms.len() {
            let r = self.find(i);
            out.entry(r).or_default().push(self.terms[i].clone());
        }
        out
    }
}

/// Composes `p1` then `p2` along `overlap`, a list of `(rhs(p1) index,
/// lhs(p2) index)` pairs naming edges created by `p1` and consumed by `p2`.
///
/// The result consumes `lhs(p1)` plus the non-overlapped part of `lhs(p2)` and
/// creates `rhs(p2)` plus the non-overlapped part of `rhs(p1)`.
pub fn compose_concurrent(
    p1: &RewriteRule,
    p2: &RewriteRule,
    overlap: &[(usize, usize)],
) -> Result<RewriteRule, ComposeError> {
    if p1.has_labels() || p2.has_labels() || p1.gluing || p2.gluing {
        return Err(ComposeError::Unsupported);
    }
    if overlap.is_empty() {
        return Err(ComposeError::EmptyOverlap);
    }
    let p2 = rename_apart(p1, p2);
    let mut seen_r = BTreeSet::new();
    let mut seen_l = BTreeSet::new();
    for &(i, j) in overlap {
        if i >= p1.rhs.len() || j >= p2.lhs.len() {
            return Err(ComposeError::OutOfRange(i, j));
        }
        if !seen_r.insert(i) || !seen_l.insert(j) {
            return Err(ComposeError::NotInjective);
        }
        if p1.rhs[i].len() != p2.lhs[j].len() {
            return Err(ComposeError::ArityMismatch(i, j));
        }
    }

    let mut u = Unifier::new();
    for t in p1
        .lhs
        .iter()
        .chain(&p1.rhs)
        .chain(&p2.lhs)
        .chain(&p2.rhs)
        .flatten()
    {
        u.id(t);
    }
    for &(i, j) in overlap {
        for (a, b) in p1.rhs[i].iter().zip(&p2.lhs[j]) {
            u.union(a, b);
        }
    }

    let fresh1: BTreeSet<String> = p1.fresh_vars().into_iter().collect();
    let p1_vars: BTreeSet<String> = p1.lhs_vars().into_iter().chain(p1.rhs_vars()).collect();
    let mut subst: HashMap<Term, Term> = HashMap::new();
    for (_, class) in u.classes() {
        let consts: BTreeSet<VertexId> = class
            .iter()
            .filter_map(|t| {
                if let Term::Const(c) = t {
                    Some(*c)
                } else {
                    None
                }
            })
            .collect();
        if consts.len() > 1 {
            let mut it = consts.iter();
            return Err(ComposeError::ConstantClash(
                *it.next().unwrap(),
                *it.next().unwrap(),
            ));
        }
        if let Some(f) = class
            .iter()
            .filter_map(Term::as_var)
            .find(|v| fresh1.contains(*v))
        {
            let others = class.iter().any(|t| match t {
                Term::Const(_) => true,
                Term::Var(v) => v != f && p1_vars.contains(v),
            });
            if others {
                return Err(ComposeError::FreshIdentified(f.to_string()));
            }
        }
        let rep = match consts.iter().next() {
            Some(&c) => Term::Const(c),
            None => class[0].clone(),
        };
        for t in class {
            subst.insert(t, rep.clone());
        }
    }

    let apply = |e: &PatternEdge| -> PatternEdge { e.iter().map(|t| subst[t].clone()).collect() };
    let rest_l2: Vec<PatternEdge> = p2
        .lhs
        .iter()
        .enumerate()
        .filter(|(j, _)| !seen_l.contains(j))
        .map(|(_, e)| apply(e))
        .collect();
    for t in rest_l2.iter().flatten() {
        if let Term::Var(v) = t {
            if fresh1.contains(v) {
                return Err(ComposeError::FreshEscapes(v.clone()));
            }
        }
    }

    let mut lhs: Vec<PatternEdge> = p1.lhs.iter().map(&apply).collect();
    lhs.extend(rest_l2);
    let mut rhs: Vec<PatternEdge> = p2.rhs.iter().map(&apply).collect();
    rhs.extend(
        p1.rhs
            .iter()
            .enumerate()
            .filter(|(i, _)| !seen_r.contains(i))
            .map(|(_, e)| apply(e)),
    );
    Ok(RewriteRule::new(
        format!("{}*{}", p1.name, p2.name),
        lhs,
        rhs,
    ))
}

/// The parallel rule `p1 + p2`: both left sides consumed at once, both right
/// sides created, with `p2`'s variables renamed apart.
pub fn compose_parallel(p1: &RewriteRule, p2: &RewriteRule) -> Result<RewriteRule, ComposeError> {
    if p1.gluing != p2.gluing {
        return Err(ComposeError::Unsupported);
    }
    let p2 = rename_apart(p1, p2);
    let mut out = RewriteRule::new(
        format!("{}+{}", p1.name, p2.name),
        p1.lhs.iter().chain(&p2.lhs).cloned().collect(),
        p1.rhs.iter().chain(&p2.rhs).cloned().collect(),
    );
    out.lhs_labels = p1.lhs_labels.clone();
    out.lhs_labels.extend(p2.lhs_labels.clone());
    out.rhs_labels = p1.rhs_labels.clone();
    out.rhs_labels.extend(p2.rhs_labels.clone());
    out.gluing = p1.gluing || p2.gluing;
    Ok(out)
}

/// Canonical key of a rule up to variable renaming and reordering of the
/// edges within each side.
pub fn rule_key(rule: &RewriteRule) -> StateKey {
    let mut ids: HashMap<&Term, VertexId> = HashMap::new();
    let mut labels: BTreeMap<VertexId, Label> = BTreeMap::new();
    let lhs_marker = 0;
    let rhs_marker = 1;
    labels.insert(
        lhs_marker,
        Label::new(if rule.gluing { "lhs!" } else { "lhs" }),
    );
    labels.insert(rhs_marker, Label::new("rhs"));
    let mut next = 2;
    for t in rule.lhs.iter().chain(&rule.rhs).flatten() {
        ids.entry(t).or_insert_with(|| {
            let id = next;
            next += 1;
            id
        });
    }
    for (t, &id) in &ids {
        let kind = match t {
            Term::Const(c) => format!("const:{c}"),
            Term::Var(v) => match (rule.lhs_labels.get(v), rule.rhs_labels.get(v)) {
                (Some(p), _) => match &p.phase {
                    Some(PhasePattern::Exact(ph)) => format!("pat:{}:{ph}", p.kind),
                    Some(PhasePattern::Var(_)) => format!("pat:{}:*", p.kind),
                    None => format!("pat:{}", p.kind),
                },
                (None, Some(t)) => format!(
                    "tmpl:{}:{}",
                    t.kind,
                    t.phase.as_ref().map(|s| s.vars.len()).unwrap_or(0)
                ),
                (None, None) => "var".to_string(),
            },
        };
        labels.insert(id, Label::new(kind));
    }
    let edges = rule
        .lhs
        .iter()
        .map(|e| (lhs_marker, e))
        .chain(rule.rhs.iter().map(|e| (rhs_marker, e)))
        .map(|(m, e)| {
            std::iter::once(m)
                .chain(e.iter().map(|t| ids[t]))
                .collect::<Vec<_>>()
        });
    let h = Hypergraph::from_edges(edges);
    let vertices: Vec<VertexId> = (0..next).collect();
    let h = Hypergraph::new(vertices, h.edges().to_vec())
        .and_then(|h| h.with_labels(labels))
        .expect("rule graph is well formed");
    canonical_form(&h).key
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_form;
    use crate::rewrite::{apply_match, find_matches};

    fn rule(name: &str, src: &str) -> RewriteRule {
        RewriteRule::from_notation(name, src).unwrap()
    }

    fn pruned_key(h: &Hypergraph) -> StateKey {
        canonical_form(&h.prune_isolated()).key
    }

    fn one_step(r: &RewriteRule, g: &Hypergraph) -> BTreeSet<StateKey> {
        find_matches(r, g)
            .iter()
            .map(|m| pruned_key(&apply_match(r, g, m).unwrap().result))
            .collect()
    }

    #[test]
    fn concurrent_example() {
        let p1 = rule("p1", "{{x,y}}->{{x,z},{z,y}}");
        let p2 = rule("p2", "{{a,b}}->{{a,b},{b,b}}");
        let c = compose_concurrent(&p1, &p2, &[(0, 0)]).unwrap();
        let expected = rule("e", "{{x,y}}->{{x,z},{z,z},{z,y}}");
        assert_eq!(rule_key(&c), rule_key(&expected));
        let host = Hypergraph::from_notation("{{0,1}}").unwrap();
        let composed = one_step(&c, &host);
        let two: BTreeSet<StateKey> = Hypergraph::from_notation("{{0,2},{2,2},{2,1}}")
            .map(|h| [pruned_key(&h)].into_iter().collect())
            .unwrap();
        assert_eq!(composed, two);
    }

    #[test]
    fn constant_clash() {
        let p1 = rule("p1", "{{x,y}}->{{0,y}}");
        let p2 = rule("p2", "{{1,b}}->{}");
        assert_eq!(
            compose_concurrent(&p1, &p2, &[(0, 0)]),
            Err(ComposeError::ConstantClash(0, 1))
        );
    }

    #[test]
    fn identity_law() {
        let p1 = rule("p1", "{{x,y},{y,z}}->{{x,w}}");
        let id = rule("id", "{{a,b}}->{{a,b}}");
        let c = compose_concurrent(&p1, &id, &[(0, 0)]).unwrap();
        assert_eq!(rule_key(&c), rule_key(&p1));
    }

    #[test]
    fn fresh_vertex_cannot_merge_with_existing() {
        let p1 = rule("p1", "{{x}}->{{x,w}}");
        let p2 = rule("p2", "{{a,a}}->{}");
        assert!(matches!(
            compose_concurrent(&p1, &p2, &[(0, 0)]),
            Err(ComposeError::FreshIdentified(_))
        ));
    }

    #[test]
    fn parallel_laws() {
        let p = rule("p", "{{x,y}}->{}");
        let pp = compose_parallel(&p, &p).unwrap();
        assert_eq!(pp.lhs.len(), 2);
        assert_eq!(pp.lhs_vars().len(), 4);
        let empty = RewriteRule::new("0", vec![], vec![]);
        assert_eq!(
            rule_key(&compose_parallel(&p, &empty).unwrap()),
            rule_key(&p)
        );
    }

    #[test]
    fn rule_key_sees_direction_and_sides() {
        let a = rule("a", "{{x,y}}->{{y,x}}");
        let b = rule("b", "{{u,v}}->{{v,u}}");
        let c = rule("c", "{{x,y}}->{{x,y}}");
        assert_eq!(rule_key(&a), rule_key(&b));
        assert_ne!(rule_key(&a), rule_key(&c));
        assert_ne!(
            rule_key(&a),
            rule_key(
                &a.inverse()
                    .rename_vars(|v| format!("{v}2"))
                    .with_gluing(true)
            )
        );
    }
}
