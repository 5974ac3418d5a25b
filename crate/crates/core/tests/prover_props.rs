mod common;

use common::brute_isomorphic;
use mwcau_core::prover::{
    prove_reachability, random_suite, Proof, ProveError, ProverConfig, Strategy,
};
use mwcau_core::rewrite::apply_match;
use mwcau_core::{Hypergraph, RewriteRule};
use proptest::prelude::*;

/// Re-applies every forward step from the start graph, checking each step
/// starts from a graph isomorphic to the running state.
fn independent_replay(p: &Proof) -> bool {
    let mut cur = p.from.prune_isolated();
    for s in &p.forward {
        if !brute_isomorphic(&cur, &s.before) {
            return false;
        }
        match apply_match(&p.rules[s.rule], &s.before, &s.matched) {
            Ok(r) => cur = r.result.prune_isolated(),
            Err(_) => return false,
        }
    }
    p.backward.is_empty() && brute_isomorphic(&cur, &p.to.prune_isolated())
}

fn cfg(strategy: Strategy, depth: usize) -> ProverConfig {
    ProverConfig {
        max_expansions: 20_000,
        ..ProverConfig::default()
            .with_strategy(strategy)
            .with_max_depth(depth)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn proofs_replay_and_causal_search_is_complete_at_the_bound(seed in 0u64..10_000) {
        for inst in random_suite(seed, 2, 3) {
            let bfs = prove_reachability(&inst.rules, &inst.from, &inst.to, &cfg(Strategy::PlainBfs, 4));
            let causal = prove_reachability(&inst.rules, &inst.from, &inst.to, &cfg(Strategy::CausalBestFirst, 4));
            if let Ok(p) = &bfs {
                prop_assert!(independent_replay(p));
                prop_assert!(p.replay().is_ok());
                let c = causal.as_ref().map_err(|e| TestCaseError::fail(format!("{}: causal failed: {e}", inst.name)))?;
                prop_assert!(independent_replay(c));
                prop_assert!(c.len() <= 4);
            }
            if let Err(ProveError::NotFound { .. }) = bfs {
                let not_found = matches!(causal, Err(ProveError::NotFound { .. }));
                prop_assert!(not_found);
            }
        }
    }
}

#[test]
fn two_triangle_target_is_found_in_five_steps_and_replays() {
    let rules =
        vec![RewriteRule::from_notation("r", "{{x,y},{x,z}}->{{x,z},{x,w},{w,y}}").unwrap()];
    let from = Hypergraph::from_notation("{{0,0},{0,0}}").unwrap();
    let to = Hypergraph::from_notation("{{0,1},{1,2},{2,0},{0,3},{3,4},{4,5},{5,0}}").unwrap();
    let p = prove_reachability(
        &rules,
        &from,
        &to,
        &ProverConfig::default().with_max_depth(5),
    )
    .unwrap();
    assert!(independent_replay(&p));
    assert!(p.len() <= 5);
}

#[test]
fn start_equal_to_goal_gives_an_empty_proof() {
    let rules = vec![RewriteRule::from_notation("r", "{{x,y}}->{{y,x}}").unwrap()];
    let g = Hypergraph::from_notation("{{0,1},{1,2}}").unwrap();
    let p = prove_reachability(
        &rules,
        &g,
        &Hypergraph::from_notation("{{7,8},{8,9}}").unwrap(),
        &ProverConfig::default(),
    )
    .unwrap();
    assert!(p.is_empty());
    assert!(independent_replay(&p));
}
