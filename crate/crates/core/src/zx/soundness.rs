//! Semantic checking of ZX rules against the matrix interpretation.

use std::collections::{BTreeMap, BTreeSet};

use super::{decode, encode, to_matrix, Color, MatrixError, Spider, ZXDiagram};
use crate::phase::Phase;
use crate::rewrite::{apply_match, find_matches, PhasePattern, RewriteRule, Term};

/// All set partitions of `0..n` as block indices per element, blocks
/// numbered in order of first appearance.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur.push(b);
            go(i + 1, n, cur, blocks.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), 0, &mut out);
    out
}

fn boundary_point(d: &mut ZXDiagram, count: &mut usize) -> String {
    let id = if count.is_multiple_of(2) {
        format!("in{count}")
    } else {
        format!("out{count}")
    };
    if count.is_multiple_of(2) {
        d.inputs.push(id.clone());
    } else {
        d.outputs.push(id.clone());
    }
    *count += 1;
    id
}

/// Host diagrams containing the left-hand side of `rule`.
///
/// Pattern spiders get every combination of phases from {0, π/4} for their
/// phase variables. Unlabelled variables are partitioned in every way; each
/// block becomes a spider with one boundary leg (colours alternating by
/// block), or, for a singleton whose variable has one wire, a bare boundary
/// point. When the rule does not delete its matched vertices, pattern
/// spiders also get one extra boundary leg. Boundary points alternate
/// between inputs and outputs.
pub fn host_diagrams(rule: &RewriteRule) -> Vec<ZXDiagram> {
    let vars = rule.lhs_vars();
    let open: Vec<&String> = vars
        .iter()
        .filter(|v| !rule.lhs_labels.contains_key(*v))
        .collect();
    let phase_vars: BTreeSet<&String> = rule
        .lhs_labels
        .values()
        .filter_map(|p| match &p.phase {
            Some(PhasePattern::Var(v)) => Some(v),
            _ => None,
        })
        .collect();
    let occurrences = |v: &str| {
        rule.lhs
            .iter()
            .flatten()
            .filter(|t| t.as_var() == Some(v))
            .count()
    };
    let phases = [Phase::ZERO, Phase::new(1, 4)];
    let mut out = Vec::new();
    for assignment in 0..1usize << phase_vars.len() {
        let phase_of: BTreeMap<&String, Phase> = phase_vars
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, phases[(assignment >> i) & 1]))
            .collect();
        for partition in set_partitions(open.len()) {
            for bare_singletons in [false, true] {
                let mut d = ZXDiagram::default();
                let mut name: BTreeMap<&str, String> = BTreeMap::new();
                let mut boundary = 0usize;
                for (var, p) in &rule.lhs_labels {
                    let color = if p.kind == "Z" { Color::Z } else { Color::X };
                    let phase = match &p.phase {
                        Some(PhasePattern::Exact(x)) => *x,
                        Some(PhasePattern::Var(v)) => phase_of[v],
                        None => Phase::ZERO,
                    };
                    let id = format!("p.{var}");
                    d.spiders.push(Spider {
                        id: id.clone(),
                        color,
                        phase,
                    });
                    if !rule.gluing {
                        let b = boundary_point(&mut d, &mut boundary);
                        d.wires.push((b, id.clone()));
                    }
                    name.insert(var, id);
                }
                let blocks = partition.iter().copied().max().map_or(0, |m| m + 1);
                for b in 0..blocks {
                    let members: Vec<&String> = open
                        .iter()
                        .zip(&partition)
                        .filter(|(_, &k)| k == b)
                        .map(|(v, _)| *v)
                        .collect();
                    if bare_singletons && members.len() == 1 && occurrences(members[0]) == 1 {
                        // Wired when the pattern edge is added.
                        name.insert(members[0], boundary_point(&mut d, &mut boundary));
                        continue;
                    }
                    let color = if b % 2 == 0 { Color::Z } else { Color::X };
                    let id = format!("c{b}");
                    d.spiders.push(Spider {
                        id: id.clone(),
                        color,
                        phase: Phase::new(1, 2),
                    });
                    let p = boundary_point(&mut d, &mut boundary);
                    d.wires.push((p, id.clone()));
                    for m in members {
                        name.insert(m, id.clone());
                    }
                }
                for e in &rule.lhs {
                    let end = |t: &Term| {
                        name[t.as_var().expect("standard rules have no constants")].clone()
                    };
                    d.wires.push((end(&e[0]), end(&e[1])));
                }
                if !out.contains(&d) {
                    out.push(d);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct SoundnessReport {
    pub hosts: usize,
    pub rewrites: usize,
    /// Host diagrams on which some rewrite changed the semantics.
    pub failures: Vec<ZXDiagram>,
}

/// Applies `rule` at every match in every host and compares the matrices
/// before and after up to a nonzero scalar.
pub fn check_rule(
    rule: &RewriteRule,
    hosts: &[ZXDiagram],
    tol: f64,
) -> Result<SoundnessReport, MatrixError> {
    let mut report = SoundnessReport {
        hosts: hosts.len(),
        rewrites: 0,
        failures: Vec::new(),
    };
    for d in hosts {
        let before = to_matrix(d)?;
        let h = encode(d)?;
        let mut ok = true;
        for m in find_matches(rule, &h) {
            let r = apply_match(rule, &h, &m).expect("found match applies");
            let after = to_matrix(&decode(&r.result)?)?;
            report.rewrites += 1;
            ok &= before.approx_eq_up_to_scalar(&after, tol);
        }
        if !ok {
            report.failures.push(d.clone());
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zx::standard_rules;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..7).map(|n| set_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn small_rules_are_sound() {
        for rule in &standard_rules(3).rules {
            let hosts = host_diagrams(rule);
            let r = check_rule(rule, &hosts, 1e-9).unwrap();
            assert!(
                r.rewrites >= hosts.len(),
                "{}: {} rewrites on {} hosts",
                rule.name,
                r.rewrites,
                hosts.len()
            );
            assert!(
                r.failures.is_empty(),
                "{}: {:?}",
                rule.name,
                r.failures.first()
            );
        }
    }

    #[test]
    fn unsound_rule_is_caught() {
        // Dropping the phase on fusion is wrong as soon as a phase is nonzero.
        let mut bad = standard_rules(2).get("fusion_Z_2_2").unwrap().clone();
        bad.rhs_labels.get_mut("u").unwrap().phase =
            Some(crate::rewrite::PhaseSum::constant(Phase::ZERO));
        let r = check_rule(&bad, &host_diagrams(&bad), 1e-9).unwrap();
        assert!(!r.failures.is_empty());
    }
}
