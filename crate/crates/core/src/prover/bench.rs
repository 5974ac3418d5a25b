use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{prove_reachability, ProveError, ProverConfig, Strategy};
use crate::hypergraph::Hypergraph;
use crate::multiway::successors;
use crate::rewrite::{RewriteRule, Term};

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub rules: Vec<RewriteRule>,
    pub from: Hypergraph,
    pub to: Hypergraph,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub found: bool,
    pub budget_exhausted: bool,
    pub expanded: usize,
    pub generated: usize,
    pub proof_length: Option<usize>,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceReport {
    pub name: String,
    pub causal: RunRecord,
    pub bfs: RunRecord,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Aggregate {
    pub instances: usize,
    pub expanded_causal: usize,
    pub expanded_bfs: usize,
    /// `expanded_bfs / expanded_causal`.
    pub expansion_ratio: Option<f64>,
    /// `ln(expanded_bfs) / ln(expanded_causal)`; 2 would be a quadratic
    /// reduction. Reported only.
    pub speedup_exponent: Option<f64>,
    pub causal_not_worse: usize,
    pub causal_strictly_fewer: usize,
    pub wall_ms_causal: f64,
    pub wall_ms_bfs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrategyReport {
    pub seed: Option<u64>,
    pub instances: Vec<InstanceReport>,
    pub aggregate: Aggregate,
}

fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.retain(|k, _| !k.starts_with("wall_ms"));
            map.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

impl StrategyReport {
    /// Pretty JSON; with `timing` off, every `wall_ms*` field is dropped so
    /// the output is reproducible byte for byte.
    pub fn to_json(&self, timing: bool) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if !timing {
            strip_timing(&mut v);
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut s = format!(
            "{:<16} {:>10} {:>10} {:>8} {:>8} {:>10} {:>10}\n",
            "instance", "exp.causal", "exp.bfs", "len.c", "len.b", "ms.causal", "ms.bfs"
        );
        let len = |r: &RunRecord| r.proof_length.map_or("-".to_string(), |l| l.to_string());
        for i in &self.instances {
            s.push_str(&format!(
                "{:<16} {:>10} {:>10} {:>8} {:>8} {:>10.1} {:>10.1}\n",
                i.name,
                i.causal.expanded,
                i.bfs.expanded,
                len(&i.causal),
                len(&i.bfs),
                i.causal.wall_ms,
                i.bfs.wall_ms
            ));
        }
        let a = &self.aggregate;
        s.push_str(&format!(
            "total            {:>10} {:>10}   causal <= bfs on {}/{}, strictly fewer on {}/{}\n",
            a.expanded_causal,
            a.expanded_bfs,
            a.causal_not_worse,
            a.instances,
            a.causal_strictly_fewer,
            a.instances
        ));
        if let Some(x) = a.speedup_exponent {
            s.push_str(&format!(
                "expansion ratio {:.3}, exponent {:.3}\n",
                a.expansion_ratio.unwrap_or(f64::NAN),
                x
            ));
        }
        s
    }
}

fn run(inst: &Instance, cfg: &ProverConfig) -> RunRecord {
    let t = Instant::now();
    let res = prove_reachability(&inst.rules, &inst.from, &inst.to, cfg);
    let wall_ms = t.elapsed().as_secs_f64() * 1e3;
    match res {
        Ok(p) => RunRecord {
            found: true,
            budget_exhausted: false,
            expanded: p.stats.expanded,
            generated: p.stats.generated,
            proof_length: Some(p.len()),
            wall_ms,
        },
        Err(e) => {
            let stats = e.stats().unwrap_or_default();
            RunRecord {
                found: false,
                budget_exhausted: matches!(e, ProveError::BudgetExhausted { .. }),
                expanded: stats.expanded,
                generated: stats.generated,
                proof_length: None,
                wall_ms,
            }
        }
    }
}

/// Runs every instance under both strategies. `causal` and `bfs` supply
/// the bounds; their `strategy` fields are overridden.
pub fn compare_strategies(
    instances: &[Instance],
    causal: &ProverConfig,
    bfs: &ProverConfig,
    seed: Option<u64>,
) -> StrategyReport {
    let causal = causal.clone().with_strategy(Strategy::CausalBestFirst);
    let bfs = bfs.clone().with_strategy(Strategy::PlainBfs);
    let records: Vec<InstanceReport> = instances
        .iter()
        .map(|inst| InstanceReport {
            name: inst.name.clone(),
            causal: run(inst, &causal),
            bfs: run(inst, &bfs),
        })
        .collect();
    let mut a = Aggregate {
        instances: records.len(),
        ..Aggregate::default()
    };
    for r in &records {
        a.expanded_causal += r.causal.expanded;
        a.expanded_bfs += r.bfs.expanded;
        a.causal_not_worse += usize::from(r.causal.expanded <= r.bfs.expanded);
        a.causal_strictly_fewer += usize::from(r.causal.expanded < r.bfs.expanded);
        a.wall_ms_causal += r.causal.wall_ms;
        a.wall_ms_bfs += r.bfs.wall_ms;
    }
    if a.expanded_causal > 0 {
        a.expansion_ratio = Some(a.expanded_bfs as f64 / a.expanded_causal as f64);
    }
    if a.expanded_causal > 1 && a.expanded_bfs > 0 {
        a.speedup_exponent = Some((a.expanded_bfs as f64).ln() / (a.expanded_causal as f64).ln());
    }
    StrategyReport {
        seed,
        instances: records,
        aggregate: a,
    }
}

/// A chain that advances one edge per step and whose new tip is always
/// consumed by the next step, next to `seeds` ternary seed edges that a decoy
/// rule turns into dead 4-ary edges. The goal is the chain advanced `length`
/// steps with every seed untouched.
pub fn decoy_instance(length: usize, seeds: usize) -> Instance {
    let chain = RewriteRule::from_notation("advance", "{{x,y},{y,y}}->{{x,y},{y,z},{z,z}}")
        .expect("valid rule");
    let decoy = RewriteRule::from_notation("decoy", "{{a,b,c}}->{{a,b,c,a}}").expect("valid rule");
    let seed_edges = |base: u32| (0..seeds as u32).map(move |i| vec![base + i; 3]);
    let start: Vec<Vec<u32>> = [vec![0, 1], vec![1, 1]]
        .into_iter()
        .chain(seed_edges(1000))
        .collect();
    let n = length as u32 + 1;
    let goal: Vec<Vec<u32>> = (0..n)
        .map(|i| vec![i, i + 1])
        .chain([vec![n, n]])
        .chain(seed_edges(1000))
        .collect();
    Instance {
        name: format!("decoy_{length}_{seeds}"),
        rules: vec![chain, decoy],
        from: Hypergraph::from_edges(start),
        to: Hypergraph::from_edges(goal),
    }
}

/// Instances with chain lengths 3..=6 and 1..=3 seeds.
pub fn decoy_suite(n: usize) -> Vec<Instance> {
    (0..n)
        .map(|i| decoy_instance(3 + i % 4, 1 + (i / 4) % 3))
        .collect()
}

fn random_rule(rng: &mut ChaCha8Rng, name: String) -> RewriteRule {
    let vars = ["a", "b", "c"];
    let fresh = ["u", "v"];
    let lhs_len = rng.gen_range(1..=2);
    let lhs: Vec<Vec<Term>> = (0..lhs_len)
        .map(|_| {
            (0..2)
                .map(|_| Term::var(vars[rng.gen_range(0..vars.len())]))
                .collect()
        })
        .collect();
    let mut lhs_vars: Vec<&str> = lhs.iter().flatten().filter_map(Term::as_var).collect();
    lhs_vars.sort_unstable();
    lhs_vars.dedup();
    let rhs_len = rng.gen_range(1..=3);
    let rhs = (0..rhs_len)
        .map(|_| {
            (0..2)
                .map(|_| {
                    if rng.gen_bool(0.25) {
                        Term::var(fresh[rng.gen_range(0..fresh.len())])
                    } else {
                        Term::var(lhs_vars.choose(rng).expect("nonempty lhs"))
                    }
                })
                .collect()
        })
        .collect();
    RewriteRule::new(name, lhs, rhs)
}

/// Seeded random instances whose goals are reached by random walks of length
/// at most `max_walk`, so a proof exists within that depth.
pub fn random_suite(seed: u64, n: usize, max_walk: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let k = out.len();
        let rules: Vec<RewriteRule> = (0..rng.gen_range(1..=2))
            .map(|r| random_rule(&mut rng, format!("r{k}_{r}")))
            .collect();
        let edges: Vec<Vec<u32>> = (0..rng.gen_range(1..=3))
            .map(|_| vec![rng.gen_range(0..3), rng.gen_range(0..3)])
            .collect();
        let from = Hypergraph::from_edges(edges);
        let mut cur = crate::canon::canonicalize(&from.prune_isolated()).1;
        let walk = rng.gen_range(1..=max_walk.max(1));
        let mut ok = true;
        for _ in 0..walk {
            let succ = successors(&rules, &cur);
            if succ.is_empty() || cur.edges().len() > 12 {
                ok = false;
                break;
            }
            cur = succ[rng.gen_range(0..succ.len())].graph.clone();
        }
        if ok {
            out.push(Instance {
                name: format!("random_{k}"),
                rules,
                from,
                to: cur,
            });
        }
    }
    out
}
