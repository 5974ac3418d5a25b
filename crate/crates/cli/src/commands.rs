use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use mwcau_core::causal::causal_graph;
use mwcau_core::io;
use mwcau_core::multiway::{evolve, EvolveError, EvolveOptions, MultiwayGraph};
use mwcau_core::prover::{
    compare_strategies, decoy_suite, prove_reachability, random_suite, Proof, ProveError,
    ProverConfig,
};
use mwcau_core::zx::{self, ZXDiagram, ZXProveError};
use mwcau_core::{Hypergraph, RewriteRule};
use tracing::info;

use crate::{
    BenchArgs, Command, EvolveArgs, Format, ProveArgs, SearchArgs, Suite, ZxArgs, ZxCommand,
};

pub const EXIT_BUDGET: u8 = 2;
pub const EXIT_NOT_FOUND: u8 = 3;

/// Reads `arg` as a file if one exists at that path, otherwise uses it as
/// inline text.
fn read_arg(arg: &str) -> Result<String> {
    let p = Path::new(arg);
    if p.is_file() {
        fs::read_to_string(p).with_context(|| format!("reading {arg}"))
    } else {
        Ok(arg.to_string())
    }
}

fn load_rules(arg: &str) -> Result<Vec<RewriteRule>> {
    let rules =
        io::parse_rules(&read_arg(arg)?).with_context(|| format!("parsing rules from {arg}"))?;
    if rules.is_empty() {
        bail!("no rules in {arg}");
    }
    Ok(rules)
}

fn load_graph(arg: &str) -> Result<Hypergraph> {
    io::parse_hypergraph(&read_arg(arg)?).with_context(|| format!("parsing hypergraph from {arg}"))
}

/// Built-in diagrams: `cnot`, `cnot2` (CNOT composed with itself) and
/// `id<n>` (n parallel wires).
fn load_diagram(arg: &str) -> Result<ZXDiagram> {
    match arg {
        "cnot" => return Ok(zx::cnot()),
        "cnot2" => return Ok(zx::compose(&zx::cnot(), &zx::cnot())?),
        _ => {}
    }
    if let Some(n) = arg.strip_prefix("id").and_then(|n| n.parse().ok()) {
        return Ok(zx::identity_wires(n));
    }
    io::parse_zx(&read_arg(arg)?).with_context(|| format!("parsing ZX diagram from {arg}"))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn prover_config(s: &SearchArgs) -> ProverConfig {
    ProverConfig {
        strategy: s.strategy.into(),
        max_depth: s.max_depth,
        max_expansions: s.max_expansions,
        probe_depth: s.probe_depth,
        workers: s.workers,
        ..ProverConfig::default()
    }
}

pub fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Evolve(a) => run_evolve(&a, false),
        Command::Causal(a) => run_evolve(&a, true),
        Command::Prove(a) => run_prove(&a),
        Command::Zx(z) => run_zx(z),
        Command::Bench(a) => run_bench(&a),
    }
}

fn render_multiway(mw: &MultiwayGraph, with_causal: bool, format: Format) -> String {
    let cg = with_causal.then(|| causal_graph(mw));
    match format {
        Format::Dot => io::multiway_dot(mw, cg.as_ref()),
        Format::Graphml => io::multiway_graphml(mw, cg.as_ref()),
        Format::Json => io::multiway_to_json(mw, cg.as_ref()),
    }
}

fn run_evolve(a: &EvolveArgs, with_causal: bool) -> Result<ExitCode> {
    let rules = load_rules(&a.rules)?;
    let init = load_graph(&a.init)?;
    let opts = EvolveOptions {
        max_states: a.max_states,
        max_events: a.max_events,
        workers: a.workers,
    };
    let (mw, code) = match evolve(&rules, &init, a.steps, &opts) {
        Ok(mw) => (mw, ExitCode::SUCCESS),
        Err(EvolveError::Budget(mw)) => {
            eprintln!(
                "budget exhausted after {} complete steps; writing partial graph",
                mw.steps
            );
            (*mw, ExitCode::from(EXIT_BUDGET))
        }
        Err(e) => return Err(e.into()),
    };
    info!(
        states = mw.states.len(),
        events = mw.events.len(),
        "evolution finished"
    );
    emit(
        a.out.as_deref(),
        &render_multiway(&mw, with_causal, a.format),
    )?;
    Ok(code)
}

fn sibling(p: &Path, ext: &str) -> PathBuf {
    let mut s = p.to_path_buf();
    s.set_extension(ext);
    if s == p {
        s.set_extension(format!("{ext}.{ext}"));
    }
    s
}

/// Proof JSON to `out` (or standard output) plus the proof graph rendered
/// in `format` next to it.
fn write_proof(p: &Proof, out: Option<&Path>, format: Format) -> Result<()> {
    emit(out, &io::proof_to_json(p))?;
    if let Some(out) = out {
        let (ext, text) = match format {
            Format::Dot | Format::Json => ("dot", io::proof_dot(&p.graph)),
            Format::Graphml => ("graphml", io::proof_graphml(&p.graph)),
        };
        let path = sibling(out, ext);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn prove_failure(e: &ProveError) -> Result<ExitCode> {
    eprintln!("{e}");
    match e {
        ProveError::NotFound { .. } => Ok(ExitCode::from(EXIT_NOT_FOUND)),
        ProveError::BudgetExhausted { .. } => Ok(ExitCode::from(EXIT_BUDGET)),
        ProveError::EmptyLhs(_) => Ok(ExitCode::from(1)),
    }
}

fn run_prove(a: &ProveArgs) -> Result<ExitCode> {
    let rules = load_rules(&a.rules)?;
    let from = load_graph(&a.from)?;
    let to = load_graph(&a.to)?;
    let cfg = ProverConfig {
        lemma_generation: a.lemmas,
        bidirectional: a.bidirectional,
        ..prover_config(&a.search)
    };
    match prove_reachability(&rules, &from, &to, &cfg) {
        Ok(p) => {
            eprintln!(
                "proof of length {} after {} expansions",
                p.len(),
                p.stats.expanded
            );
            write_proof(&p, a.out.as_deref(), a.format)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => prove_failure(&e),
    }
}

fn run_zx(cmd: ZxCommand) -> Result<ExitCode> {
    let equal = |left: &ZXDiagram, right: &ZXDiagram, z: &ZxArgs| -> Result<ExitCode> {
        let rs = zx::standard_rules(z.max_arity);
        match zx::prove_equal(left, right, &rs, &prover_config(&z.search)) {
            Ok(p) => {
                eprintln!(
                    "equal: proof of length {} after {} expansions",
                    p.len(),
                    p.stats.expanded
                );
                write_proof(&p, z.out.as_deref(), Format::Dot)?;
                Ok(ExitCode::SUCCESS)
            }
            Err(ZXProveError::Prove(e)) => prove_failure(&e),
            Err(e) => Err(e.into()),
        }
    };
    match cmd {
        ZxCommand::Simplify { diagram, zx: z } => {
            let d = load_diagram(&diagram)?;
            let rs = zx::standard_rules(z.max_arity);
            let s = zx::simplify(&d, &rs, &prover_config(&z.search))?;
            let v = serde_json::json!({
                "complete": s.complete,
                "steps": s.proof.len(),
                "rules": s.proof.forward.iter().map(|st| &rs.rules[st.rule].name).collect::<Vec<_>>(),
                "diagram": s.diagram,
                "graph": s.proof.graph,
            });
            emit(
                z.out.as_deref(),
                &(serde_json::to_string_pretty(&v)? + "\n"),
            )?;
            if let Some(out) = &z.out {
                fs::write(sibling(out, "dot"), io::proof_dot(&s.proof.graph))?;
            }
            Ok(if s.complete {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_BUDGET)
            })
        }
        ZxCommand::ProveEqual { left, right, zx: z } => {
            equal(&load_diagram(&left)?, &load_diagram(&right)?, &z)
        }
        ZxCommand::ProveUnitary { gate, zx: z } => {
            let g = load_diagram(&gate)?;
            if g.inputs.len() != g.outputs.len() {
                bail!(
                    "gate has {} inputs and {} outputs",
                    g.inputs.len(),
                    g.outputs.len()
                );
            }
            equal(
                &zx::compose(&g, &g)?,
                &zx::identity_wires(g.inputs.len()),
                &z,
            )
        }
    }
}

fn run_bench(a: &BenchArgs) -> Result<ExitCode> {
    let instances = match a.suite {
        Suite::Random => random_suite(a.seed, a.instances, a.max_walk),
        Suite::Decoy => decoy_suite(a.instances),
    };
    let cfg = prover_config(&a.search);
    let report = compare_strategies(&instances, &cfg, &cfg, Some(a.seed));
    let json = report.to_json(!a.no_timing) + "\n";
    match &a.out {
        Some(p) => {
            fs::write(p, &json).with_context(|| format!("writing {}", p.display()))?;
            print!("{}", report.to_table());
        }
        None => {
            print!("{json}");
            eprint!("{}", report.to_table());
        }
    }
    Ok(ExitCode::SUCCESS)
}
