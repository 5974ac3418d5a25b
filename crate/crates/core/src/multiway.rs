//! Multiway evolution: every match of every rule applied to every state,
//! with isomorphic states merged by canonical key.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use tracing::debug;

use crate::canon::{canonicalize, StateKey};
use crate::hypergraph::Hypergraph;
use crate::rewrite::{apply_match, find_matches, Match, RewriteRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvolveOptions {
    pub max_states: usize,
    pub max_events: usize,
    /// Worker threads for expansion; 0 uses the global rayon pool.
    pub workers: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            max_states: 100_000,
            max_events: 1_000_000,
            workers: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct State {
    pub key: StateKey,
    /// Canonical representative: vertices `0..n`, edge ids equal to indices.
    pub graph: Hypergraph,
    pub generation: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Event {
    pub id: usize,
    pub rule: usize,
    pub rule_name: String,
    pub from: usize,
    pub to: usize,
    /// Canonical edge indices consumed in `from`.
    pub consumed: BTreeSet<usize>,
    /// Canonical edge indices created in `to`.
    pub created: BTreeSet<usize>,
    pub step: usize,
    #[serde(skip)]
    pub matched: Match,
}

#[derive(Clone, Debug)]
pub struct MultiwayGraph {
    pub states: Vec<State>,
    pub index: HashMap<StateKey, usize>,
    pub events: Vec<Event>,
    pub initial: usize,
    /// Generations fully computed.
    pub steps: usize,
    /// False when a budget cut the evolution short.
    pub complete: bool,
}

impl MultiwayGraph {
    pub fn state_of(&self, key: &StateKey) -> Option<&State> {
        self.index.get(key).map(|&i| &self.states[i])
    }

    pub fn contains_isomorph(&self, h: &Hypergraph) -> bool {
        let (ck, _) = canonicalize(&h.prune_isolated());
        self.index.contains_key(&ck.key)
    }
}

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("rule `{0}` has an empty left-hand side")]
    EmptyLhs(String),
    #[error("budget exceeded after {} states and {} events", .0.states.len(), .0.events.len())]
    Budget(Box<MultiwayGraph>),
}

/// One application of a rule to a canonical representative.
#[derive(Clone, Debug)]
pub struct Successor {
    pub rule: usize,
    pub matched: Match,
    pub key: StateKey,
    /// Canonical representative of the pruned result.
    pub graph: Hypergraph,
    pub consumed: BTreeSet<usize>,
    pub created: BTreeSet<usize>,
}

/// Normalizes a rewrite output into a multiway state: isolated vertices are
/// dropped, then the graph is canonicalized.
pub fn state_key(h: &Hypergraph) -> StateKey {
    canonicalize(&h.prune_isolated()).0.key
}

/// All one-step successors of a canonical representative, in rule order and
/// then match order.
pub fn successors(rules: &[RewriteRule], rep: &Hypergraph) -> Vec<Successor> {
    let mut out = Vec::new();
    for (ri, rule) in rules.iter().enumerate() {
        for m in find_matches(rule, rep) {
            let r = apply_match(rule, rep, &m).expect("fresh match applies");
            let (ck, graph) = canonicalize(&r.result.prune_isolated());
            let consumed = m.edges.iter().map(|e| e.0 as usize).collect();
            let created = r.created.iter().map(|e| ck.edge_index[e]).collect();
            out.push(Successor {
                rule: ri,
                matched: m,
                key: ck.key,
                graph,
                consumed,
                created,
            });
        }
    }
    out
}

fn run_in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
        .install(f)
}

/// Evolves `init` for `max_steps` generations.
///
/// Frontier states are expanded concurrently; their successors are then
/// committed serially in frontier order, so the resulting numbering of
/// states and events does not depend on the worker count.
pub fn evolve(
    rules: &[RewriteRule],
    init: &Hypergraph,
    max_steps: usize,
    opts: &EvolveOptions,
) -> Result<MultiwayGraph, EvolveError> {
    if let Some(r) = rules.iter().find(|r| r.lhs.is_empty()) {
        return Err(EvolveError::EmptyLhs(r.name.clone()));
    }
    let (ck, graph) = canonicalize(&init.prune_isolated());
    let mut mw = MultiwayGraph {
        states: vec![State {
            key: ck.key.clone(),
            graph,
            generation: 0,
        }],
        index: HashMap::from([(ck.key, 0)]),
        events: Vec::new(),
        initial: 0,
        steps: 0,
        complete: true,
    };
    // (rule, from, to, consumed, created) of every recorded event.
    type EventSig = (usize, usize, usize, BTreeSet<usize>, BTreeSet<usize>);
    let mut seen_events: BTreeSet<EventSig> = BTreeSet::new();
    let mut frontier: Vec<usize> = vec![0];

    run_in_pool(opts.workers, || {
        for step in 1..=max_steps {
            if frontier.is_empty() {
                break;
            }
            let expanded: Vec<Vec<Successor>> = frontier
                .par_iter()
                .map(|&s| successors(rules, &mw.states[s].graph))
                .collect();
            let mut next = Vec::new();
            for (&from, succs) in frontier.iter().zip(expanded) {
                for s in succs {
                    let to = match mw.index.get(&s.key) {
                        Some(&i) => i,
                        None => {
                            let i = mw.states.len();
                            mw.index.insert(s.key.clone(), i);
                            mw.states.push(State {
                                key: s.key.clone(),
                                graph: s.graph,
                                generation: step,
                            });
                            next.push(i);
                            i
                        }
                    };
                    let dedup = (s.rule, from, to, s.consumed.clone(), s.created.clone());
                    if seen_events.insert(dedup) {
                        let id = mw.events.len();
                        mw.events.push(Event {
                            id,
                            rule: s.rule,
                            rule_name: rules[s.rule].name.clone(),
                            from,
                            to,
                            consumed: s.consumed,
                            created: s.created,
                            step,
                            matched: s.matched,
                        });
                    }
                    if mw.states.len() > opts.max_states || mw.events.len() > opts.max_events {
                        mw.steps = step - 1;
                        mw.complete = false;
                        return;
                    }
                }
            }
            mw.steps = step;
            debug!(
                step,
                states = mw.states.len(),
                events = mw.events.len(),
                "generation expanded"
            );
            frontier = next;
        }
    });

    if mw.complete {
        mw.steps = max_steps;
        Ok(mw)
    } else {
        Err(EvolveError::Budget(Box::new(mw)))
    }
}
