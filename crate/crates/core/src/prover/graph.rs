use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ProofStep;
use crate::hypergraph::Hypergraph;
use crate::rewrite::RewriteRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Axiom,
    CriticalPairLemma,
    SubstitutionLemma,
    Hypothesis,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Axiom => "axiom",
            NodeKind::CriticalPairLemma => "critical_pair_lemma",
            NodeKind::SubstitutionLemma => "substitution_lemma",
            NodeKind::Hypothesis => "hypothesis",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Substitution,
    DerivedInference,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofNode {
    pub id: usize,
    pub kind: NodeKind,
    pub statement: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofEdge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofGraph {
    pub nodes: Vec<ProofNode>,
    pub edges: Vec<ProofEdge>,
}

impl ProofGraph {
    fn add(&mut self, kind: NodeKind, statement: String) -> usize {
        let id = self.nodes.len();
        self.nodes.push(ProofNode {
            id,
            kind,
            statement,
        });
        id
    }

    fn link(&mut self, from: usize, to: usize, kind: EdgeKind) {
        self.edges.push(ProofEdge { from, to, kind });
    }

    /// Axioms for the rules the derivation uses (and the parents of any lemma
    /// it uses), one critical-pair node per lemma, a chain of substitution
    /// lemmas, and the hypothesis as the sink.
    pub(crate) fn build(
        rules: &[RewriteRule],
        lemma_parents: &BTreeMap<usize, (usize, usize)>,
        from: &Hypergraph,
        to: &Hypergraph,
        forward: &[ProofStep],
        backward: &[ProofStep],
    ) -> ProofGraph {
        let mut g = ProofGraph::default();
        let used: BTreeSet<usize> = forward.iter().chain(backward).map(|s| s.rule).collect();
        let mut axioms: BTreeSet<usize> = used
            .iter()
            .copied()
            .filter(|r| !lemma_parents.contains_key(r))
            .collect();
        for r in used.iter().filter_map(|r| lemma_parents.get(r)) {
            axioms.insert(r.0);
            axioms.insert(r.1);
        }
        let mut rule_node = BTreeMap::new();
        for &r in &axioms {
            rule_node.insert(
                r,
                g.add(NodeKind::Axiom, format!("{}: {}", rules[r].name, rules[r])),
            );
        }
        for &r in used.iter().filter(|r| lemma_parents.contains_key(r)) {
            let id = g.add(
                NodeKind::CriticalPairLemma,
                format!("{}: {}", rules[r].name, rules[r]),
            );
            let (a, b) = lemma_parents[&r];
            g.link(rule_node[&a], id, EdgeKind::DerivedInference);
            if b != a {
                g.link(rule_node[&b], id, EdgeKind::DerivedInference);
            }
            rule_node.insert(r, id);
        }

        let mut prev = None;
        let chain = forward
            .iter()
            .map(|s| (s, format!("{} = {}", s.before, s.after)))
            .chain(
                backward
                    .iter()
                    .rev()
                    .map(|s| (s, format!("{} = {}", s.after, s.before))),
            );
        for (s, statement) in chain {
            let id = g.add(NodeKind::SubstitutionLemma, statement);
            g.link(rule_node[&s.rule], id, EdgeKind::Substitution);
            if let Some(p) = prev {
                g.link(p, id, EdgeKind::DerivedInference);
            }
            prev = Some(id);
        }
        let hyp = g.add(NodeKind::Hypothesis, format!("{from} = {to}"));
        if let Some(p) = prev {
            g.link(p, hyp, EdgeKind::DerivedInference);
        }
        g
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    /// Checks the structural invariants: acyclic, each substitution lemma has
    /// exactly one substitution in-edge from an axiom or lemma, hypotheses
    /// are sinks and are reachable from an axiom unless the derivation is
    /// empty.
    pub fn check(&self) -> Result<(), String> {
        let n = self.nodes.len();
        if self.edges.iter().any(|e| e.from >= n || e.to >= n) {
            return Err("edge endpoint out of range".into());
        }
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            indeg[e.to] += 1;
        }
        let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = ready.pop() {
            seen += 1;
            for e in self.edges.iter().filter(|e| e.from == i) {
                indeg[e.to] -= 1;
                if indeg[e.to] == 0 {
                    ready.push(e.to);
                }
            }
        }
        if seen != n {
            return Err("proof graph has a cycle".into());
        }
        for node in &self.nodes {
            match node.kind {
                NodeKind::SubstitutionLemma => {
                    let subs: Vec<&ProofEdge> = self
                        .edges
                        .iter()
                        .filter(|e| e.to == node.id && e.kind == EdgeKind::Substitution)
                        .collect();
                    let ok = subs.len() == 1
                        && matches!(
                            self.nodes[subs[0].from].kind,
                            NodeKind::Axiom | NodeKind::CriticalPairLemma
                        );
                    if !ok {
                        return Err(format!(
                            "substitution lemma {} lacks a unique rule source",
                            node.id
                        ));
                    }
                }
                NodeKind::Hypothesis => {
                    if self.edges.iter().any(|e| e.from == node.id) {
                        return Err(format!("hypothesis {} is not a sink", node.id));
                    }
                    let derived = self.count(NodeKind::SubstitutionLemma) > 0;
                    if derived && !self.reachable_from_axiom(node.id) {
                        return Err(format!(
                            "hypothesis {} is not reachable from an axiom",
                            node.id
                        ));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn reachable_from_axiom(&self, target: usize) -> bool {
        let mut stack: Vec<usize> = self
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Axiom)
            .map(|n| n.id)
            .collect();
        let mut seen = vec![false; self.nodes.len()];
        while let Some(i) = stack.pop() {
            if i == target {
                return true;
            }
            if std::mem::replace(&mut seen[i], true) {
                continue;
            }
            stack.extend(self.edges.iter().filter(|e| e.from == i).map(|e| e.to));
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_cycles_and_bad_sources() {
        let mut g = ProofGraph::default();
        let a = g.add(NodeKind::Axiom, "a".into());
        let s = g.add(NodeKind::SubstitutionLemma, "s".into());
        let h = g.add(NodeKind::Hypothesis, "h".into());
        g.link(a, s, EdgeKind::Substitution);
        g.link(s, h, EdgeKind::DerivedInference);
        assert_eq!(g.check(), Ok(()));
        let mut cyclic = g.clone();
        cyclic.link(h, a, EdgeKind::DerivedInference);
        assert!(cyclic.check().is_err());
        let mut doubled = g.clone();
        doubled.link(a, s, EdgeKind::Substitution);
        assert!(doubled.check().is_err());
    }
}
