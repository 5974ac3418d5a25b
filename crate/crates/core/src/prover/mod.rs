//! Reachability proofs between hypergraphs.
//!
//! The search runs over canonical states. `PlainBfs` expands states in
//! breadth-first order; `CausalBestFirst` scores each successor by the causal
//! out-degree of the event producing it inside a short probe evolution and
//! expands the highest cumulative score first. Both stop as soon as a
//! generated state matches the goal and both are bounded by the same depth
//! and expansion budgets.

mod bench;
mod graph;
mod lemmas;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::debug;

pub use bench::{
    compare_strategies, decoy_instance, decoy_suite, random_suite, Aggregate, Instance,
    InstanceReport, RunRecord, StrategyReport,
};
pub use graph::{EdgeKind, NodeKind, ProofEdge, ProofGraph, ProofNode};
pub use lemmas::{enumerate_critical_pairs, rank_lemmas, CriticalPair, RankedLemma};

use crate::canon::{canonicalize, StateKey};
use crate::causal::causal_graph;
use crate::hypergraph::Hypergraph;
use crate::multiway::{evolve, successors, EvolveError, EvolveOptions, MultiwayGraph};
use crate::rewrite::{apply_match, Match, RewriteRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    CausalBestFirst,
    PlainBfs,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverConfig {
    pub strategy: Strategy,
    pub max_depth: usize,
    pub max_expansions: usize,
    pub lemma_generation: bool,
    /// Critical-pair lemmas added to the rule set when generation is on.
    pub max_lemmas: usize,
    pub max_overlap_edges: usize,
    pub probe_depth: usize,
    pub probe_max_states: usize,
    /// Also search forward from the goal and meet in the middle, which is
    /// the same as applying inverse rules backwards from the goal.
    pub bidirectional: bool,
    pub workers: usize,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig {
            strategy: Strategy::CausalBestFirst,
            max_depth: 8,
            max_expansions: 100_000,
            lemma_generation: false,
            max_lemmas: 4,
            max_overlap_edges: 1,
            probe_depth: 2,
            probe_max_states: 500,
            bidirectional: false,
            workers: 0,
        }
    }
}

impl ProverConfig {
    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    fn probe_options(&self) -> EvolveOptions {
        EvolveOptions {
            max_states: self.probe_max_states,
            workers: self.workers,
            ..EvolveOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub expanded: usize,
    pub generated: usize,
    pub max_depth_reached: usize,
}

#[derive(Debug, Error)]
pub enum ProveError {
    #[error("no proof within depth bound ({} expansions)", .stats.expanded)]
    NotFound { stats: SearchStats },
    #[error("expansion budget exhausted after {} expansions", .stats.expanded)]
    BudgetExhausted { stats: SearchStats },
    #[error("rule `{0}` has an empty left-hand side")]
    EmptyLhs(String),
}

impl ProveError {
    pub fn stats(&self) -> Option<SearchStats> {
        match self {
            ProveError::NotFound { stats } | ProveError::BudgetExhausted { stats } => Some(*stats),
            ProveError::EmptyLhs(_) => None,
        }
    }
}

/// One rewrite of a proof, stated on canonical representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    pub rule: usize,
    pub matched: Match,
    pub before: Hypergraph,
    pub after: Hypergraph,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("step {0} does not apply: {1}")]
    Inapplicable(usize, String),
    #[error("step {0} does not continue from the previous state")]
    Broken(usize),
    #[error("derivation ends in a state not isomorphic to the goal")]
    WrongEnd,
}

#[derive(Clone, Debug)]
pub struct Proof {
    /// Rules available to the proof: the input rules, then any lemmas.
    pub rules: Vec<RewriteRule>,
    /// Parent rule indices of each lemma rule, keyed by its index in `rules`.
    pub lemma_parents: BTreeMap<usize, (usize, usize)>,
    pub from: Hypergraph,
    pub to: Hypergraph,
    /// Rewrites from `from` towards the meeting state.
    pub forward: Vec<ProofStep>,
    /// Rewrites from `to` towards the meeting state (bidirectional search).
    pub backward: Vec<ProofStep>,
    pub graph: ProofGraph,
    pub stats: SearchStats,
}

impl Proof {
    pub fn len(&self) -> usize {
        self.forward.len() + self.backward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Re-applies every recorded match and checks both chains end in the
    /// same state.
    pub fn replay(&self) -> Result<(), ReplayError> {
        let run = |start: &Hypergraph,
                   steps: &[ProofStep],
                   offset: usize|
         -> Result<StateKey, ReplayError> {
            let (ck, mut cur) = canonicalize(&start.prune_isolated());
            let mut key = ck.key;
            for (i, s) in steps.iter().enumerate() {
                if s.before != cur {
                    return Err(ReplayError::Broken(offset + i));
                }
                let r = apply_match(&self.rules[s.rule], &cur, &s.matched)
                    .map_err(|e| ReplayError::Inapplicable(offset + i, e.to_string()))?;
                let (ck, next) = canonicalize(&r.result.prune_isolated());
                key = ck.key;
                cur = next;
            }
            Ok(key)
        };
        let a = run(&self.from, &self.forward, 0)?;
        let b = run(&self.to, &self.backward, self.forward.len())?;
        if a == b {
            Ok(())
        } else {
            Err(ReplayError::WrongEnd)
        }
    }
}

struct Node {
    graph: Hypergraph,
    key: StateKey,
    depth: usize,
    score: usize,
    parent: Option<(usize, usize, Match)>,
}

enum Open {
    Fifo(VecDeque<(usize, usize)>),
    Heap(BinaryHeap<(usize, Reverse<usize>, Reverse<StateKey>, usize)>),
}

impl Open {
    fn len(&self) -> usize {
        match self {
            Open::Fifo(q) => q.len(),
            Open::Heap(h) => h.len(),
        }
    }

    fn push(&mut self, node: &Node, id: usize) {
        match self {
            Open::Fifo(q) => q.push_back((id, node.depth)),
            Open::Heap(h) => h.push((
                node.score,
                Reverse(node.depth),
                Reverse(node.key.clone()),
                id,
            )),
        }
    }

    fn pop(&mut self) -> Option<(usize, usize)> {
        match self {
            Open::Fifo(q) => q.pop_front(),
            Open::Heap(h) => h.pop().map(|(_, Reverse(d), _, id)| (id, d)),
        }
    }
}

struct Side {
    nodes: Vec<Node>,
    index: HashMap<StateKey, usize>,
    open: Open,
}

impl Side {
    fn new(start: &Hypergraph, strategy: Strategy) -> Side {
        let (ck, graph) = canonicalize(&start.prune_isolated());
        let open = match strategy {
            Strategy::PlainBfs => Open::Fifo(VecDeque::new()),
            Strategy::CausalBestFirst => Open::Heap(BinaryHeap::new()),
        };
        let mut side = Side {
            nodes: Vec::new(),
            index: HashMap::new(),
            open,
        };
        let root = Node {
            graph,
            key: ck.key.clone(),
            depth: 0,
            score: 0,
            parent: None,
        };
        side.index.insert(ck.key, 0);
        side.open.push(&root, 0);
        side.nodes.push(root);
        side
    }

    fn path(&self, mut id: usize) -> Vec<ProofStep> {
        let mut steps = Vec::new();
        while let Some((parent, rule, m)) = &self.nodes[id].parent {
            steps.push(ProofStep {
                rule: *rule,
                matched: m.clone(),
                before: self.nodes[*parent].graph.clone(),
                after: self.nodes[id].graph.clone(),
            });
            id = *parent;
        }
        steps.reverse();
        steps
    }
}

/// Causal out-degree of each first-step event of a probe evolution, as the
/// best score per successor state.
pub(crate) fn probe_scores(
    rules: &[RewriteRule],
    rep: &Hypergraph,
    cfg: &ProverConfig,
) -> HashMap<StateKey, usize> {
    let mw: MultiwayGraph = match evolve(rules, rep, cfg.probe_depth, &cfg.probe_options()) {
        Ok(mw) => mw,
        Err(EvolveError::Budget(mw)) => *mw,
        Err(EvolveError::EmptyLhs(_)) => return HashMap::new(),
    };
    let cg = causal_graph(&mw);
    let mut out: HashMap<StateKey, usize> = HashMap::new();
    for e in mw.events.iter().filter(|e| e.from == mw.initial) {
        let s = out.entry(mw.states[e.to].key.clone()).or_insert(0);
        *s = (*s).max(cg.out_degree(e.id));
    }
    out
}

struct Search<'a> {
    rules: &'a [RewriteRule],
    cfg: &'a ProverConfig,
    sides: Vec<Side>,
    stats: SearchStats,
}

enum Step {
    Met(usize, usize),
    Continue,
}

impl Search<'_> {
    /// Expands one node of side `s`; reports a meeting with the other side
    /// (or with the fixed goal in one-directional mode) as node ids per side.
    fn expand(&mut self, s: usize, goal: &StateKey) -> Step {
        let Some((id, depth)) = self.sides[s].open.pop() else {
            return Step::Continue;
        };
        if self.sides[s].nodes[id].depth != depth {
            return Step::Continue;
        }
        self.stats.expanded += 1;
        let graph = self.sides[s].nodes[id].graph.clone();
        let score = self.sides[s].nodes[id].score;
        let scores = match self.cfg.strategy {
            Strategy::CausalBestFirst => probe_scores(self.rules, &graph, self.cfg),
            Strategy::PlainBfs => HashMap::new(),
        };
        for succ in successors(self.rules, &graph) {
            self.stats.generated += 1;
            let child_depth = depth + 1;
            self.stats.max_depth_reached = self.stats.max_depth_reached.max(child_depth);
            let side = &mut self.sides[s];
            let child_score = score + scores.get(&succ.key).copied().unwrap_or(0);
            let child = match side.index.get(&succ.key) {
                Some(&c) if side.nodes[c].depth <= child_depth => continue,
                Some(&c) => {
                    let n = &mut side.nodes[c];
                    n.depth = child_depth;
                    n.score = child_score;
                    n.parent = Some((id, succ.rule, succ.matched));
                    c
                }
                None => {
                    let c = side.nodes.len();
                    side.index.insert(succ.key.clone(), c);
                    side.nodes.push(Node {
                        graph: succ.graph,
                        key: succ.key.clone(),
                        depth: child_depth,
                        score: child_score,
                        parent: Some((id, succ.rule, succ.matched)),
                    });
                    c
                }
            };
            if child_depth < self.cfg.max_depth {
                side.open.push(&side.nodes[child], child);
            }
            if self.sides.len() == 1 {
                if &succ.key == goal {
                    return Step::Met(child, 0);
                }
            } else if let Some(&other) = self.sides[1 - s].index.get(&succ.key) {
                return if s == 0 {
                    Step::Met(child, other)
                } else {
                    Step::Met(other, child)
                };
            }
        }
        Step::Continue
    }
}

/// Searches for a rewrite path from `from` to a state isomorphic to `to`.
pub fn prove_reachability(
    rules: &[RewriteRule],
    from: &Hypergraph,
    to: &Hypergraph,
    cfg: &ProverConfig,
) -> Result<Proof, ProveError> {
    if let Some(r) = rules.iter().find(|r| r.lhs.is_empty()) {
        return Err(ProveError::EmptyLhs(r.name.clone()));
    }
    let mut all_rules = rules.to_vec();
    let mut lemma_parents = BTreeMap::new();
    if cfg.lemma_generation {
        let pairs = enumerate_critical_pairs(rules, cfg.max_overlap_edges);
        let candidates: Vec<RewriteRule> = pairs.iter().map(|p| p.rule.clone()).collect();
        for ranked in rank_lemmas(rules, &candidates, from, cfg)
            .into_iter()
            .take(cfg.max_lemmas)
        {
            debug!(lemma = %pairs[ranked.index].rule.name, score = ranked.score, "adding lemma");
            lemma_parents.insert(all_rules.len(), pairs[ranked.index].parents);
            all_rules.push(pairs[ranked.index].rule.clone());
        }
    }

    let mut search = Search {
        rules: &all_rules,
        cfg,
        sides: vec![Side::new(from, cfg.strategy)],
        stats: SearchStats::default(),
    };
    let goal_side = Side::new(to, cfg.strategy);
    let goal = goal_side.nodes[0].key.clone();
    let finish = |search: &Search<'_>, f: usize, b: Option<(&Side, usize)>| {
        let forward = search.sides[0].path(f);
        let backward = match b {
            Some((side, id)) => side.path(id),
            None => Vec::new(),
        };
        let graph = ProofGraph::build(&all_rules, &lemma_parents, from, to, &forward, &backward);
        Proof {
            rules: all_rules.clone(),
            lemma_parents: lemma_parents.clone(),
            from: from.clone(),
            to: to.clone(),
            forward,
            backward,
            graph,
            stats: search.stats,
        }
    };
    if search.sides[0].nodes[0].key == goal {
        return Ok(finish(&search, 0, None));
    }
    if cfg.bidirectional {
        search.sides.push(goal_side);
    }

    loop {
        let side = if search.sides.len() == 2 {
            let (a, b) = (search.sides[0].open.len(), search.sides[1].open.len());
            match (a, b) {
                (0, 0) => break,
                (0, _) => 1,
                (_, 0) => 0,
                _ if b < a => 1,
                _ => 0,
            }
        } else if search.sides[0].open.len() == 0 {
            break;
        } else {
            0
        };
        if search.stats.expanded >= cfg.max_expansions {
            return Err(ProveError::BudgetExhausted {
                stats: search.stats,
            });
        }
        if let Step::Met(f, b) = search.expand(side, &goal) {
            debug!(
                expanded = search.stats.expanded,
                generated = search.stats.generated,
                "goal reached"
            );
            let proof = if search.sides.len() == 2 {
                let back = search.sides.pop().expect("two sides");
                let p = finish(&search, f, Some((&back, b)));
                search.sides.push(back);
                p
            } else {
                finish(&search, f, None)
            };
            return Ok(proof);
        }
    }
    Err(ProveError::NotFound {
        stats: search.stats,
    })
}
