use std::collections::BTreeMap;

use thiserror::Error;

use super::{decode, encode, ZXDiagram, ZXError, ZXRuleSet};
use crate::canon::canonicalize;
use crate::multiway::successors;
use crate::prover::{
    probe_scores, prove_reachability, Proof, ProofGraph, ProofStep, ProveError, ProverConfig,
    SearchStats, Strategy,
};

#[derive(Debug, Error)]
pub enum ZXProveError {
    #[error("boundary signatures differ: {0} -> {1} against {2} -> {3}")]
    SignatureMismatch(usize, usize, usize, usize),
    #[error(transparent)]
    Diagram(#[from] ZXError),
    #[error(transparent)]
    Prove(#[from] ProveError),
}

#[derive(Clone, Debug)]
pub struct Simplified {
    pub diagram: ZXDiagram,
    /// The rewrites performed, as a one-directional proof from the input to
    /// the result.
    pub proof: Proof,
    /// False when the step budget ran out before a normal form was reached.
    pub complete: bool,
}

/// Rewrites greedily until no rule applies, at most `cfg.max_expansions`
/// times. Every standard rule removes at least one wire, so without a budget
/// this terminates after at most as many steps as the diagram has wires.
///
/// With `CausalBestFirst` the successor with the highest probe score is
/// taken (ties broken by canonical key); with `PlainBfs` the first match in
/// rule order is taken.
pub fn simplify(
    d: &ZXDiagram,
    rs: &ZXRuleSet,
    cfg: &ProverConfig,
) -> Result<Simplified, ZXProveError> {
    let from = encode(d)?;
    let (_, mut cur) = canonicalize(&from.prune_isolated());
    let mut steps: Vec<ProofStep> = Vec::new();
    let mut stats = SearchStats::default();
    let complete = loop {
        let succ = successors(&rs.rules, &cur);
        if succ.is_empty() {
            break true;
        }
        if steps.len() >= cfg.max_expansions {
            break false;
        }
        stats.expanded += 1;
        stats.generated += succ.len();
        let pick = match cfg.strategy {
            Strategy::PlainBfs => succ.into_iter().next(),
            Strategy::CausalBestFirst => {
                let scores = probe_scores(&rs.rules, &cur, cfg);
                succ.into_iter().min_by(|a, b| {
                    let (sa, sb) = (
                        scores.get(&a.key).copied().unwrap_or(0),
                        scores.get(&b.key).copied().unwrap_or(0),
                    );
                    sb.cmp(&sa).then_with(|| a.key.cmp(&b.key))
                })
            }
        }
        .expect("nonempty successor list");
        steps.push(ProofStep {
            rule: pick.rule,
            matched: pick.matched,
            before: cur.clone(),
            after: pick.graph.clone(),
        });
        cur = pick.graph;
        stats.max_depth_reached = steps.len();
    };
    let graph = ProofGraph::build(&rs.rules, &BTreeMap::new(), &from, &cur, &steps, &[]);
    let proof = Proof {
        rules: rs.rules.clone(),
        lemma_parents: BTreeMap::new(),
        from,
        to: cur.clone(),
        forward: steps,
        backward: Vec::new(),
        graph,
        stats,
    };
    Ok(Simplified {
        diagram: decode(&cur)?,
        proof,
        complete,
    })
}

/// Proves two diagrams equal up to scalar by rewriting both towards a common
/// diagram. Rules are equalities, so a forward rewrite from `d2` read in
/// reverse is an inverse-rule step towards `d1`.
pub fn prove_equal(
    d1: &ZXDiagram,
    d2: &ZXDiagram,
    rs: &ZXRuleSet,
    cfg: &ProverConfig,
) -> Result<Proof, ZXProveError> {
    if (d1.inputs.len(), d1.outputs.len()) != (d2.inputs.len(), d2.outputs.len()) {
        return Err(ZXProveError::SignatureMismatch(
            d1.inputs.len(),
            d1.outputs.len(),
            d2.inputs.len(),
            d2.outputs.len(),
        ));
    }
    let (h1, h2) = (encode(d1)?, encode(d2)?);
    let cfg = ProverConfig {
        bidirectional: true,
        ..cfg.clone()
    };
    Ok(prove_reachability(&rs.rules, &h1, &h2, &cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::is_isomorphic;
    use crate::phase::Phase;
    use crate::rewrite::find_matches;
    use crate::zx::{cnot, compose, identity_wires, spider, standard_rules, to_matrix, Color};

    fn cfg() -> ProverConfig {
        ProverConfig::default()
    }

    #[test]
    fn wires_are_already_simple() {
        let s = simplify(&identity_wires(2), &standard_rules(4), &cfg()).unwrap();
        assert!(s.complete);
        assert!(s.proof.is_empty());
        assert!(is_isomorphic(
            &encode(&s.diagram).unwrap(),
            &encode(&identity_wires(2)).unwrap()
        ));
    }

    #[test]
    fn phases_fuse_exactly() {
        let half = spider(Color::Z, Phase::new(1, 2), 1, 1);
        let d = compose(&half, &half).unwrap();
        let s = simplify(&d, &standard_rules(4), &cfg()).unwrap();
        assert_eq!(s.diagram.spiders.len(), 1);
        assert_eq!(s.diagram.spiders[0].phase, Phase::PI);
        let before = to_matrix(&d).unwrap();
        let after = to_matrix(&s.diagram).unwrap();
        assert!(before.approx_eq_up_to_scalar(&after, 1e-9));
    }

    #[test]
    fn cnot_squared_simplifies_to_wires() {
        let cc = compose(&cnot(), &cnot()).unwrap();
        for strategy in [Strategy::CausalBestFirst, Strategy::PlainBfs] {
            let s = simplify(&cc, &standard_rules(4), &cfg().with_strategy(strategy)).unwrap();
            assert!(s.complete);
            assert!(s.diagram.spiders.is_empty(), "{:?}", s.diagram);
            assert_eq!(s.diagram.inputs.len(), 2);
            assert_eq!(s.diagram.outputs.len(), 2);
            assert!(to_matrix(&s.diagram)
                .unwrap()
                .approx_eq_up_to_scalar(&to_matrix(&cc).unwrap(), 1e-9));
            s.proof.replay().unwrap();
            s.proof.graph.check().unwrap();
        }
    }

    #[test]
    fn budget_flags_partial_result() {
        let cc = compose(&cnot(), &cnot()).unwrap();
        let s = simplify(
            &cc,
            &standard_rules(4),
            &ProverConfig {
                max_expansions: 1,
                ..cfg()
            },
        )
        .unwrap();
        assert!(!s.complete);
        assert_eq!(s.proof.len(), 1);
    }

    #[test]
    fn reference_cnot_sequence_replays() {
        let rs = standard_rules(4);
        let mut cur = canonicalize(
            &encode(&compose(&cnot(), &cnot()).unwrap())
                .unwrap()
                .prune_isolated(),
        )
        .1;
        for name in [
            "fusion_Z_3_3",
            "fusion_X_3_3",
            "hopf",
            "identity_Z",
            "identity_X",
        ] {
            let rule = rs.get(name).unwrap();
            let m = find_matches(rule, &cur)
                .into_iter()
                .next()
                .unwrap_or_else(|| panic!("{name} applies"));
            let r = crate::rewrite::apply_match(rule, &cur, &m).unwrap();
            cur = canonicalize(&r.result.prune_isolated()).1;
        }
        assert!(is_isomorphic(&cur, &encode(&identity_wires(2)).unwrap()));
    }

    #[test]
    fn cnot_unitarity_is_provable() {
        let cc = compose(&cnot(), &cnot()).unwrap();
        let p = prove_equal(&cc, &identity_wires(2), &standard_rules(4), &cfg()).unwrap();
        assert_eq!(p.len(), 5);
        p.replay().unwrap();
        p.graph.check().unwrap();
    }

    #[test]
    fn trivial_and_mismatched_equalities() {
        let rs = standard_rules(3);
        assert!(prove_equal(&cnot(), &cnot(), &rs, &cfg())
            .unwrap()
            .is_empty());
        assert!(matches!(
            prove_equal(&identity_wires(1), &identity_wires(2), &rs, &cfg()),
            Err(ZXProveError::SignatureMismatch(1, 1, 2, 2))
        ));
    }

    #[test]
    fn inequivalent_diagrams_have_no_proof() {
        let z = spider(Color::Z, Phase::ZERO, 1, 1);
        let x = spider(Color::X, Phase::PI, 1, 1);
        assert!(!to_matrix(&z)
            .unwrap()
            .approx_eq_up_to_scalar(&to_matrix(&x).unwrap(), 1e-9));
        let r = prove_equal(&z, &x, &standard_rules(4), &cfg().with_max_depth(6));
        assert!(
            matches!(r, Err(ZXProveError::Prove(ProveError::NotFound { .. }))),
            "{r:?}"
        );
    }
}
