//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Limits and tolerances are pinned below.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use common::{
    brute_isomorphic, check_compose_fixture, mutated, permuted, random_host, random_hypergraph,
    random_rule, replay_causal, rng, ComposeTally,
};
use mwcau_core::canon::{canonical_form, canonicalize};
use mwcau_core::causal::causal_graph;
use mwcau_core::io::{parse_hypergraph, parse_rules};
use mwcau_core::multiway::{evolve, EvolveOptions};
use mwcau_core::prover::ProverConfig;
use mwcau_core::rewrite::{apply_match, find_matches};
use mwcau_core::zx::{self, check_rule, host_diagrams, standard_rules, to_matrix, ZXRuleSet};
use mwcau_core::Hypergraph;
use serde_json::Value;

const GROWTH_RULE: &str = "{{x,y},{x,z}}->{{x,z},{x,w},{w,y}}";
const GROWTH_INIT: &str = "{{0,0},{0,0}}";
const TWO_TRIANGLES: &str = "{{0,1},{1,2},{2,0},{0,3},{3,4},{4,5},{5,0}}";
const TRIANGLES_MAX_DEPTH: usize = 5;
const TRIANGLES_TIME_LIMIT: Duration = Duration::from_secs(60);
const CNOT_TIME_LIMIT: Duration = Duration::from_secs(30);
const CNOT_REFERENCE: [&str; 5] = [
    "fusion_Z_3_3",
    "fusion_X_3_3",
    "hopf",
    "identity_Z",
    "identity_X",
];
const ZX_MAX_ARITY: usize = 4;
const MATRIX_TOL: f64 = 1e-9;
const MAX_HOST_BOUNDARY: usize = 8;
const CANON_GRAPHS: u64 = 1000;
const CANON_PERMUTATIONS: usize = 10;
const BRUTE_MAX_VERTICES: usize = 8;
const COMPOSE_FIXTURES: u64 = 200;
const CAUSAL_RULES: u64 = 5;
const CAUSAL_STEPS: usize = 3;
const CAUSAL_INIT: &str = "{{0,0},{0,1},{1,2},{2,0}}";
const DECOY_INSTANCES: usize = 12;
const DECOY_STRICT_FRACTION: f64 = 0.8;
const MANY_WORKERS: &str = "4";

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn mwcau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwcau"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn expect_success(o: &Output) -> Result<(), String> {
    ensure(
        o.status.success(),
        format!(
            "exit {:?}: {}",
            o.status.code(),
            String::from_utf8_lossy(&o.stderr).trim()
        ),
    )
}

fn read_json(p: &Path) -> Result<Value, String> {
    let text = fs::read_to_string(p).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn graph_of(v: &Value) -> Result<Hypergraph, String> {
    parse_hypergraph(v.as_str().ok_or("expected an edge list string")?).map_err(|e| e.to_string())
}

/// Re-derives every step of a proof written by the binary: some match of the
/// named rule with the recorded binding must turn `before` into `after`, and
/// consecutive steps must chain from the start graph to the goal.
fn replay_proof_json(v: &Value, from: &Hypergraph, to: &Hypergraph) -> Result<(), String> {
    let rules = parse_rules(&v["rules"].to_string()).map_err(|e| e.to_string())?;
    let mut cur = from.prune_isolated();
    for (i, step) in v["steps"].as_array().ok_or("no steps")?.iter().enumerate() {
        ensure(
            step["direction"] == "forward",
            format!("step {i} is not forward"),
        )?;
        let before = graph_of(&step["before"])?;
        let after = graph_of(&step["after"])?;
        ensure(
            brute_isomorphic(&cur, &before),
            format!("step {i} does not continue the derivation"),
        )?;
        let rule = rules
            .iter()
            .find(|r| step["rule"] == r.name.as_str())
            .ok_or(format!("step {i}: unknown rule"))?;
        let binding: std::collections::BTreeMap<String, u32> =
            serde_json::from_value(step["binding"].clone()).map_err(|e| e.to_string())?;
        let applies = find_matches(rule, &before)
            .into_iter()
            .filter(|m| m.binding == binding)
            .any(|m| {
                let r = apply_match(rule, &before, &m).unwrap();
                brute_isomorphic(&r.result.prune_isolated(), &after)
            });
        ensure(
            applies,
            format!("step {i} does not rewrite before into after"),
        )?;
        cur = after;
    }
    ensure(
        brute_isomorphic(&cur, &to.prune_isolated()),
        "derivation does not end at the goal",
    )
}

fn c1_two_triangle_reachability(dir: &Path) -> Verdict {
    let out = dir.join("triangles.json");
    let depth = TRIANGLES_MAX_DEPTH.to_string();
    let t = Instant::now();
    let o = mwcau(&[
        "prove",
        "--rules",
        GROWTH_RULE,
        "--from",
        GROWTH_INIT,
        "--to",
        TWO_TRIANGLES,
        "--max-depth",
        &depth,
        "--out",
        out.to_str().unwrap(),
    ]);
    let elapsed = t.elapsed();
    expect_success(&o)?;
    ensure(elapsed < TRIANGLES_TIME_LIMIT, format!("took {elapsed:?}"))?;
    let v = read_json(&out)?;
    let len = v["length"].as_u64().ok_or("no length")? as usize;
    ensure(len <= TRIANGLES_MAX_DEPTH, format!("proof length {len}"))?;
    replay_proof_json(
        &v,
        &Hypergraph::from_notation(GROWTH_INIT).unwrap(),
        &Hypergraph::from_notation(TWO_TRIANGLES).unwrap(),
    )?;
    ensure(dir.join("triangles.dot").exists(), "no proof DOT written")?;
    Ok(format!(
        "length {len}, {} expansions, {:.2}s, replay isomorphic to target",
        v["stats"]["expanded"],
        elapsed.as_secs_f64()
    ))
}

/// Depth-first search for matches realizing `names` in order from `h`,
/// checking the matrix at each step; returns the final graph.
fn realize(
    rs: &ZXRuleSet,
    h: &Hypergraph,
    names: &[&str],
    reference: &zx::Matrix,
) -> Option<Hypergraph> {
    let Some((name, rest)) = names.split_first() else {
        return Some(h.clone());
    };
    let rule = rs.get(name)?;
    for m in find_matches(rule, h) {
        let (_, next) = canonicalize(&apply_match(rule, h, &m).ok()?.result.prune_isolated());
        let d = zx::decode(&next).ok()?;
        if !to_matrix(&d)
            .ok()?
            .approx_eq_up_to_scalar(reference, MATRIX_TOL)
        {
            return None;
        }
        if let Some(end) = realize(rs, &next, rest, reference) {
            return Some(end);
        }
    }
    None
}

fn c2_cnot_unitarity(dir: &Path) -> Verdict {
    let out = dir.join("cnot.json");
    let arity = ZX_MAX_ARITY.to_string();
    let t = Instant::now();
    let o = mwcau(&[
        "zx",
        "prove-unitary",
        "cnot",
        "--max-arity",
        &arity,
        "--out",
        out.to_str().unwrap(),
    ]);
    let elapsed = t.elapsed();
    expect_success(&o)?;
    ensure(elapsed < CNOT_TIME_LIMIT, format!("took {elapsed:?}"))?;
    let v = read_json(&out)?;

    let rs = standard_rules(ZX_MAX_ARITY);
    let start = zx::compose(&zx::cnot(), &zx::cnot()).unwrap();
    let identity = zx::identity_wires(2);
    let reference = to_matrix(&identity).unwrap();
    ensure(
        to_matrix(&start)
            .unwrap()
            .approx_eq_up_to_scalar(&reference, MATRIX_TOL),
        "CNOT;CNOT is not the identity",
    )?;
    let (_, h) = canonicalize(&zx::encode(&start).unwrap().prune_isolated());
    let end = realize(&rs, &h, &CNOT_REFERENCE, &reference)
        .ok_or("reference sequence does not replay")?;
    let target = zx::encode(&identity).unwrap();
    ensure(
        canonical_form(&end).key == canonical_form(&target).key,
        "reference sequence ends elsewhere",
    )?;
    ensure(
        brute_isomorphic(&end, &target),
        "reference end state not isomorphic to bare wires",
    )?;
    let p = zx::prove_equal(&start, &identity, &rs, &ProverConfig::default())
        .map_err(|e| e.to_string())?;
    p.replay().map_err(|e| e.to_string())?;
    Ok(format!(
        "proof length {}, {:.2}s; reference sequence {} replays",
        v["length"],
        elapsed.as_secs_f64(),
        CNOT_REFERENCE.join(", ")
    ))
}

fn c3_zx_soundness() -> Verdict {
    let rs = standard_rules(ZX_MAX_ARITY);
    let (mut hosts, mut rewrites, mut widest) = (0, 0, 0);
    for rule in &rs.rules {
        let hs = host_diagrams(rule);
        widest = widest.max(
            hs.iter()
                .map(|d| d.inputs.len() + d.outputs.len())
                .max()
                .unwrap_or(0),
        );
        let r = check_rule(rule, &hs, MATRIX_TOL).map_err(|e| format!("{}: {e}", rule.name))?;
        ensure(
            r.failures.is_empty(),
            format!("{} unsound on {:?}", rule.name, r.failures.first()),
        )?;
        ensure(r.rewrites > 0, format!("{} never applied", rule.name))?;
        hosts += r.hosts;
        rewrites += r.rewrites;
    }
    ensure(
        widest <= MAX_HOST_BOUNDARY,
        format!("host with {widest} boundary wires"),
    )?;
    Ok(format!("{} rules, {hosts} hosts (<= {widest} boundary wires), {rewrites} rewrites, tol {MATRIX_TOL:e}", rs.rules.len()))
}

fn c4_canonicalization() -> Verdict {
    let (mut perms, mut brute_pairs, mut iso_pairs) = (0, 0, 0);
    for seed in 0..CANON_GRAPHS {
        let mut r = rng(seed);
        let h = random_hypergraph(&mut r, 10, 12, seed % 2 == 0);
        let key = canonical_form(&h).key;
        let small = h.vertices().len() <= BRUTE_MAX_VERTICES;
        for _ in 0..CANON_PERMUTATIONS {
            let p = permuted(&mut r, &h);
            ensure(
                canonical_form(&p).key == key,
                format!("seed {seed}: permutation changed the key"),
            )?;
            if small {
                ensure(
                    brute_isomorphic(&h, &p),
                    format!("seed {seed}: oracle rejects a permutation"),
                )?;
                brute_pairs += 1;
            }
            perms += 1;
        }
        if small {
            let others = [
                mutated(&mut r, &h),
                random_hypergraph(&mut r, 8, 12, seed % 2 == 0),
            ];
            for o in others
                .iter()
                .filter(|o| o.vertices().len() <= BRUTE_MAX_VERTICES)
            {
                let same_key = canonical_form(o).key == key;
                let iso = brute_isomorphic(&h, o);
                ensure(
                    same_key == iso,
                    format!("seed {seed}: key equality {same_key}, isomorphic {iso}"),
                )?;
                brute_pairs += 1;
                iso_pairs += usize::from(iso);
            }
        }
    }
    Ok(format!(
        "{CANON_GRAPHS} graphs x {CANON_PERMUTATIONS} permutations ({perms} keys), {brute_pairs} pairs checked exhaustively ({iso_pairs} isomorphic non-permutation pairs)"
    ))
}

fn c5_compose_theorems() -> Verdict {
    let mut tally = ComposeTally::default();
    for seed in 0..COMPOSE_FIXTURES {
        let mut r = rng(10_000 + seed);
        let p1 = random_rule(&mut r, "p1");
        let p2 = random_rule(&mut r, "p2");
        check_compose_fixture(&p1, &p2, &random_host(&mut r), &mut tally);
    }
    ensure(
        tally.parallel_checked > 0 && tally.concurrent_checked > 0,
        format!("no valid cases: {tally:?}"),
    )?;
    ensure(tally.all_ok(), format!("{tally:?}"))?;
    Ok(format!(
        "{COMPOSE_FIXTURES} fixtures: parallel {}/{}, concurrent {}/{}",
        tally.parallel_ok, tally.parallel_checked, tally.concurrent_ok, tally.concurrent_checked
    ))
}

fn c6_causal_oracle() -> Verdict {
    let init = Hypergraph::from_notation(CAUSAL_INIT).unwrap();
    let (mut events, mut edges) = (0, 0);
    for seed in 0..CAUSAL_RULES {
        let rules = vec![random_rule(&mut rng(20_000 + seed), &format!("r{seed}"))];
        let mw = evolve(&rules, &init, CAUSAL_STEPS, &EvolveOptions::default())
            .map_err(|e| e.to_string())?;
        let cg = causal_graph(&mw);
        let got: BTreeSet<(usize, usize)> = cg.edges.iter().copied().collect();
        ensure(
            got == replay_causal(&mw, &rules),
            format!("rule {} disagrees with replay", rules[0]),
        )?;
        events += mw.events.len();
        edges += got.len();
    }
    ensure(edges > 0, "no causal edges at all")?;
    Ok(format!("{CAUSAL_RULES} rules x {CAUSAL_STEPS} steps: {events} events, {edges} causal edges, all equal"))
}

fn c7_decoy_benefit(dir: &Path) -> Verdict {
    let out = dir.join("bench.json");
    let n = DECOY_INSTANCES.to_string();
    let o = mwcau(&[
        "bench",
        "--suite",
        "decoy",
        "--instances",
        &n,
        "--out",
        out.to_str().unwrap(),
    ]);
    expect_success(&o)?;
    print!("{}", String::from_utf8_lossy(&o.stdout));
    let v = read_json(&out)?;
    let instances = v["instances"].as_array().ok_or("no instances")?;
    ensure(instances.len() == DECOY_INSTANCES, "wrong instance count")?;
    let mut strictly = 0;
    for i in instances {
        let (c, b) = (&i["causal"], &i["bfs"]);
        ensure(
            c["found"] == true && b["found"] == true,
            format!("{} not solved", i["name"]),
        )?;
        ensure(c["proof_length"].is_u64(), "missing proof length")?;
        let (ce, be) = (
            c["expanded"].as_u64().unwrap(),
            b["expanded"].as_u64().unwrap(),
        );
        ensure(ce <= be, format!("{}: causal {ce} > bfs {be}", i["name"]))?;
        strictly += usize::from(ce < be);
    }
    let need = (DECOY_STRICT_FRACTION * DECOY_INSTANCES as f64).ceil() as usize;
    ensure(
        strictly >= need,
        format!("strictly fewer on {strictly}, need {need}"),
    )?;
    Ok(format!(
        "causal <= bfs on {0}/{0}, strictly fewer on {strictly}/{0}; expansions {1} vs {2}",
        DECOY_INSTANCES, v["aggregate"]["expanded_causal"], v["aggregate"]["expanded_bfs"]
    ))
}

fn c8_determinism(dir: &Path) -> Verdict {
    let run = |label: &str, args: &[&str]| -> Result<Vec<u8>, String> {
        let mut bytes = None;
        for workers in ["1", MANY_WORKERS] {
            let out = dir.join(format!("{label}_{workers}.json"));
            let mut full: Vec<&str> = args.to_vec();
            full.extend(["--workers", workers, "--out", out.to_str().unwrap()]);
            let o = mwcau(&full);
            expect_success(&o)?;
            let b = fs::read(&out).map_err(|e| e.to_string())?;
            match &bytes {
                None => bytes = Some(b),
                Some(prev) => ensure(
                    *prev == b,
                    format!("{label} differs between 1 and {MANY_WORKERS} workers"),
                )?,
            }
        }
        Ok(bytes.unwrap())
    };
    let evolve = run(
        "evolve",
        &[
            "causal",
            "--rules",
            GROWTH_RULE,
            "--init",
            GROWTH_INIT,
            "--steps",
            "4",
            "--format",
            "json",
        ],
    )?;
    run(
        "prove",
        &[
            "prove",
            "--rules",
            GROWTH_RULE,
            "--from",
            GROWTH_INIT,
            "--to",
            TWO_TRIANGLES,
            "--max-depth",
            "5",
        ],
    )?;
    run(
        "bench_decoy",
        &[
            "bench",
            "--suite",
            "decoy",
            "--instances",
            "6",
            "--no-timing",
        ],
    )?;
    run(
        "bench_random",
        &[
            "bench",
            "--seed",
            "3",
            "--instances",
            "6",
            "--max-walk",
            "2",
            "--max-depth",
            "3",
            "--no-timing",
        ],
    )?;
    Ok(format!(
        "evolve ({} bytes), prove and bench outputs identical for 1 and {MANY_WORKERS} workers",
        evolve.len()
    ))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temporary directory");
    let d = dir.path();
    let criteria: Vec<Criterion<'_>> = vec![
        (
            "two-triangle reachability via prove",
            Box::new(|| c1_two_triangle_reachability(d)),
        ),
        (
            "CNOT unitarity via zx prove-unitary",
            Box::new(|| c2_cnot_unitarity(d)),
        ),
        ("ZX rule soundness", Box::new(c3_zx_soundness)),
        (
            "canonicalization vs exhaustive isomorphism",
            Box::new(c4_canonicalization),
        ),
        (
            "parallelism and concurrency theorems",
            Box::new(c5_compose_theorems),
        ),
        ("causal graph vs replay oracle", Box::new(c6_causal_oracle)),
        (
            "decoy suite heuristic benefit",
            Box::new(|| c7_decoy_benefit(d)),
        ),
        (
            "determinism across worker counts",
            Box::new(|| c8_determinism(d)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or(e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = t.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
