use std::collections::BTreeSet;

use serde::Serialize;

use super::ProverConfig;
use crate::canon::StateKey;
use crate::causal::causal_graph;
use crate::compose::{compose_concurrent, rule_key};
use crate::hypergraph::Hypergraph;
use crate::multiway::{evolve, EvolveError};
use crate::rewrite::RewriteRule;

/// A composed rule together with the rules and overlap it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalPair {
    pub rule: RewriteRule,
    pub parents: (usize, usize),
    pub overlap: Vec<(usize, usize)>,
}

/// All partial injective maps from `0..n` into `0..m` with `1..=k` pairs,
/// respecting `compatible`, with domain listed in ascending order.
fn overlaps(
    n: usize,
    m: usize,
    k: usize,
    compatible: &dyn Fn(usize, usize) -> bool,
) -> Vec<Vec<(usize, usize)>> {
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        n: usize,
        m: usize,
        k: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        compatible: &dyn Fn(usize, usize) -> bool,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if i == n {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        go(i + 1, n, m, k, used, cur, compatible, out);
        if cur.len() == k {
            return;
        }
        for j in 0..m {
            if !used[j] && compatible(i, j) {
                used[j] = true;
                cur.push((i, j));
                go(i + 1, n, m, k, used, cur, compatible, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(
        0,
        n,
        m,
        k,
        &mut vec![false; m],
        &mut Vec::new(),
        compatible,
        &mut out,
    );
    out
}

/// Composes every ordered pair of rules along every arity-compatible overlap
/// of at most `max_overlap_edges` edges, keeping the first rule of each
/// isomorphism class. Pairs whose overlap does not unify are skipped.
pub fn enumerate_critical_pairs(
    rules: &[RewriteRule],
    max_overlap_edges: usize,
) -> Vec<CriticalPair> {
    let mut seen: BTreeSet<StateKey> = BTreeSet::new();
    let mut out = Vec::new();
    for (i, p1) in rules.iter().enumerate() {
        for (j, p2) in rules.iter().enumerate() {
            let compatible = |a: usize, b: usize| p1.rhs[a].len() == p2.lhs[b].len();
            for ov in overlaps(p1.rhs.len(), p2.lhs.len(), max_overlap_edges, &compatible) {
                let Ok(rule) = compose_concurrent(p1, p2, &ov) else {
                    continue;
                };
                if rule.lhs.is_empty() {
                    continue;
                }
                if seen.insert(rule_key(&rule)) {
                    out.push(CriticalPair {
                        rule,
                        parents: (i, j),
                        overlap: ov,
                    });
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankedLemma {
    /// Position in the candidate list.
    pub index: usize,
    pub score: usize,
}

/// Scores each candidate by the causal out-degree of its own events in a
/// probe evolution of `rules` plus the candidate from `context`, then sorts
/// by score descending. Ties are broken by the candidate's canonical rule
/// key, then by name and content.
pub fn rank_lemmas(
    rules: &[RewriteRule],
    candidates: &[RewriteRule],
    context: &Hypergraph,
    cfg: &ProverConfig,
) -> Vec<RankedLemma> {
    let mut scored: Vec<(RankedLemma, StateKey, String)> = candidates
        .iter()
        .enumerate()
        .map(|(index, cand)| {
            let mut with = rules.to_vec();
            with.push(cand.clone());
            let mw = match evolve(&with, context, cfg.probe_depth, &cfg.probe_options()) {
                Ok(mw) => Some(mw),
                Err(EvolveError::Budget(mw)) => Some(*mw),
                Err(EvolveError::EmptyLhs(_)) => None,
            };
            let score = mw.map_or(0, |mw| {
                let cg = causal_graph(&mw);
                mw.events
                    .iter()
                    .filter(|e| e.rule == rules.len())
                    .map(|e| cg.out_degree(e.id))
                    .sum()
            });
            (
                RankedLemma { index, score },
                rule_key(cand),
                format!("{}|{cand}", cand.name),
            )
        })
        .collect();
    scored.sort_by(|a, b| {
        b.0.score
            .cmp(&a.0.score)
            .then_with(|| a.1.cmp(&b.1))
            .then_with(|| a.2.cmp(&b.2))
    });
    scored.into_iter().map(|(r, _, _)| r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(name: &str, src: &str) -> RewriteRule {
        RewriteRule::from_notation(name, src).unwrap()
    }

    #[test]
    fn overlap_enumeration_counts() {
        // Injective partial maps of size 1..=2 from 2 into 3: 2*3 + 3*2 = 12.
        assert_eq!(overlaps(2, 3, 2, &|_, _| true).len(), 12);
        assert_eq!(overlaps(2, 3, 1, &|_, _| true).len(), 6);
    }

    #[test]
    fn disjoint_arities_give_no_pairs() {
        let r = rule("r", "{{x,y}}->{{x,y,y}}");
        assert!(enumerate_critical_pairs(&[r], 1).is_empty());
    }

    #[test]
    fn identity_composition_contains_the_rule() {
        let p = rule("p", "{{x,y}}->{{y,z}}");
        let id = rule("id", "{{a,b}}->{{a,b}}");
        let pairs = enumerate_critical_pairs(&[p.clone(), id], 1);
        assert!(pairs.iter().any(|c| rule_key(&c.rule) == rule_key(&p)));
    }

    #[test]
    fn unused_output_scores_zero_and_ranks_last() {
        let base = vec![rule("step", "{{x,y}}->{{y,z}}")];
        let dead = rule("dead", "{{x,y}}->{{x,y,y}}");
        let live = rule("live", "{{x,y}}->{{y,z},{z,w}}");
        let host = Hypergraph::from_notation("{{0,1}}").unwrap();
        let ranked = rank_lemmas(
            &base,
            &[dead.clone(), live.clone()],
            &host,
            &ProverConfig::default(),
        );
        assert_eq!(ranked[0].index, 1);
        assert!(ranked[0].score > 0);
        assert_eq!(ranked[1], RankedLemma { index: 0, score: 0 });
    }
}
