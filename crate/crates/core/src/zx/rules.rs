use std::collections::BTreeMap;

use super::Color;
use crate::phase::Phase;
use crate::rewrite::{
    LabelPattern, LabelTemplate, PatternEdge, PhasePattern, PhaseSum, RewriteRule, Term,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZXRuleSet {
    pub rules: Vec<RewriteRule>,
    pub max_arity: usize,
}

impl ZXRuleSet {
    pub fn get(&self, name: &str) -> Option<&RewriteRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.name == name)
    }
}

fn wire(a: &str, b: &str) -> PatternEdge {
    vec![Term::var(a), Term::var(b)]
}

fn any_phase(color: Color, var: &str) -> LabelPattern {
    LabelPattern::spider(color.as_str(), PhasePattern::Var(var.to_string()))
}

fn zero_phase(color: Color) -> LabelPattern {
    LabelPattern::spider(color.as_str(), PhasePattern::Exact(Phase::ZERO))
}

fn template(color: Color, phase: PhaseSum) -> LabelTemplate {
    LabelTemplate {
        kind: color.as_str().to_string(),
        phase: Some(phase),
    }
}

struct Builder {
    rule: RewriteRule,
}

impl Builder {
    fn new(name: String) -> Builder {
        Builder {
            rule: RewriteRule::new(name, Vec::new(), Vec::new()).with_gluing(true),
        }
    }

    fn lhs(&mut self, a: &str, b: &str) {
        self.rule.lhs.push(wire(a, b));
    }

    fn rhs(&mut self, a: &str, b: &str) {
        self.rule.rhs.push(wire(a, b));
    }

    fn pattern(&mut self, var: &str, p: LabelPattern) {
        self.rule.lhs_labels.insert(var.to_string(), p);
    }

    fn fresh(&mut self, var: &str, t: LabelTemplate) {
        self.rule.rhs_labels.insert(var.to_string(), t);
    }
}

/// Spider fusion: adjacent same-colour spiders of arities `a` and `b` joined
/// by one wire become one spider carrying the sum of their phases.
fn fusion(color: Color, a: usize, b: usize) -> RewriteRule {
    let mut r = Builder::new(format!("fusion_{color}_{a}_{b}"));
    r.pattern("s", any_phase(color, "alpha"));
    r.pattern("t", any_phase(color, "beta"));
    if a + b > 2 {
        // Two fused arity-1 spiders leave only a scalar, which is dropped.
        r.fresh("u", template(color, PhaseSum::of_vars(&["alpha", "beta"])));
    }
    r.lhs("s", "t");
    for i in 0..a - 1 {
        let p = format!("p{i}");
        r.lhs("s", &p);
        r.rhs("u", &p);
    }
    for j in 0..b - 1 {
        let q = format!("q{j}");
        r.lhs("t", &q);
        r.rhs("u", &q);
    }
    r.rule
}

/// A phase-free arity-2 spider is a plain wire.
fn identity(color: Color) -> RewriteRule {
    let mut r = Builder::new(format!("identity_{color}"));
    r.pattern("s", zero_phase(color));
    r.lhs("p", "s");
    r.lhs("s", "q");
    r.rhs("p", "q");
    r.rule
}

/// Two wires between a Z and an X spider cancel, whatever the arities and
/// phases of the two spiders.
fn hopf() -> RewriteRule {
    let mut rule = RewriteRule::new("hopf", vec![wire("s", "t"), wire("s", "t")], Vec::new());
    rule.lhs_labels = BTreeMap::from([
        ("s".to_string(), any_phase(Color::Z, "alpha")),
        ("t".to_string(), any_phase(Color::X, "beta")),
    ]);
    rule
}

/// A phase-free arity-1 spider of the other colour is copied through a
/// spider of colour `color` with `n` further legs.
fn copy(color: Color, n: usize) -> RewriteRule {
    let mut r = Builder::new(format!("copy_{color}_{n}"));
    r.pattern("c", zero_phase(color.other()));
    r.pattern("s", any_phase(color, "alpha"));
    r.lhs("c", "s");
    for i in 0..n {
        let p = format!("p{i}");
        let f = format!("f{i}");
        r.lhs("s", &p);
        r.rhs(&f, &p);
        r.fresh(&f, template(color.other(), PhaseSum::constant(Phase::ZERO)));
    }
    r.rule
}

/// Bialgebra: `m` phase-free Z spiders completely connected to `n` phase-free
/// X spiders, each with one outer leg, become an X spider on the Z side's
/// legs joined to a Z spider on the X side's legs.
fn bialgebra(m: usize, n: usize) -> RewriteRule {
    let mut r = Builder::new(format!("bialgebra_{m}_{n}"));
    r.fresh("u", template(Color::X, PhaseSum::constant(Phase::ZERO)));
    r.fresh("w", template(Color::Z, PhaseSum::constant(Phase::ZERO)));
    for i in 0..m {
        let (z, a) = (format!("z{i}"), format!("a{i}"));
        r.pattern(&z, zero_phase(Color::Z));
        r.lhs(&z, &a);
        r.rhs(&a, "u");
    }
    for j in 0..n {
        let (x, b) = (format!("x{j}"), format!("b{j}"));
        r.pattern(&x, zero_phase(Color::X));
        r.lhs(&x, &b);
        r.rhs("w", &b);
    }
    for i in 0..m {
        for j in 0..n {
            r.lhs(&format!("z{i}"), &format!("x{j}"));
        }
    }
    r.rhs("u", "w");
    r.rule
}

/// The rule schemas instantiated for every spider arity up to `max_arity`
/// (at least 2): fusion, identity, Hopf, copy and bialgebra.
pub fn standard_rules(max_arity: usize) -> ZXRuleSet {
    let max_arity = max_arity.max(2);
    let mut rules = Vec::new();
    for color in [Color::Z, Color::X] {
        for a in 1..=max_arity {
            for b in a..=max_arity {
                rules.push(fusion(color, a, b));
            }
        }
    }
    rules.push(identity(Color::Z));
    rules.push(identity(Color::X));
    rules.push(hopf());
    for color in [Color::Z, Color::X] {
        for n in 0..max_arity {
            rules.push(copy(color, n));
        }
    }
    for m in 2..max_arity {
        for n in 2..max_arity {
            rules.push(bialgebra(m, n));
        }
    }
    for r in &rules {
        debug_assert_eq!(r.validate(), Ok(()), "{}", r.name);
    }
    ZXRuleSet { rules, max_arity }
}
