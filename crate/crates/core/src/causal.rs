//! Causal edges between rewrite events and the causal selection score.
//!
//! `(e1, e2)` is a causal edge iff `e2` starts where `e1` ends and consumes a
//! canonical edge slot `e1` created. Only direct creation and consumption
//! count; edges preserved through intermediate events are not traced.

use std::collections::HashMap;

use thiserror::Error;

use crate::multiway::{Event, MultiwayGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CausalError {
    #[error("unknown event {0}")]
    UnknownEvent(usize),
    #[error("events {0} and {1} are not consecutive")]
    Disconnected(usize, usize),
}

#[derive(Clone, Debug)]
pub struct CausalGraph<'a> {
    pub multiway: &'a MultiwayGraph,
    /// Sorted `(earlier, later)` event id pairs.
    pub edges: Vec<(usize, usize)>,
    out: Vec<Vec<usize>>,
}

pub fn causal_graph(mw: &MultiwayGraph) -> CausalGraph<'_> {
    let mut by_from: HashMap<usize, Vec<&Event>> = HashMap::new();
    for e in &mw.events {
        by_from.entry(e.from).or_default().push(e);
    }
    let mut edges = Vec::new();
    let mut out = vec![Vec::new(); mw.events.len()];
    for e1 in &mw.events {
        for e2 in by_from.get(&e1.to).into_iter().flatten() {
            if !e1.created.is_disjoint(&e2.consumed) {
                edges.push((e1.id, e2.id));
                out[e1.id].push(e2.id);
            }
        }
    }
    edges.sort_unstable();
    for o in &mut out {
        o.sort_unstable();
    }
    CausalGraph {
        multiway: mw,
        edges,
        out,
    }
}

impl CausalGraph<'_> {
    pub fn out_degree(&self, event: usize) -> usize {
        self.out.get(event).map_or(0, Vec::len)
    }

    pub fn successors(&self, event: usize) -> &[usize] {
        self.out.get(event).map_or(&[], Vec::as_slice)
    }

    pub fn is_causal(&self, e1: usize, e2: usize) -> bool {
        self.successors(e1).binary_search(&e2).is_ok()
    }
}

/// Total causal out-degree of the events along `path`, which must be a
/// connected path through the multiway graph.
pub fn selection_score(cg: &CausalGraph<'_>, path: &[usize]) -> Result<usize, CausalError> {
    let events = &cg.multiway.events;
    if let Some(&bad) = path.iter().find(|&&e| e >= events.len()) {
        return Err(CausalError::UnknownEvent(bad));
    }
    for w in path.windows(2) {
        if events[w[0]].to != events[w[1]].from {
            return Err(CausalError::Disconnected(w[0], w[1]));
        }
    }
    Ok(path.iter().map(|&e| cg.out_degree(e)).sum())
}

pub fn causally_independent(cg: &CausalGraph<'_>, e1: usize, e2: usize) -> bool {
    !cg.is_causal(e1, e2) && !cg.is_causal(e2, e1)
}
