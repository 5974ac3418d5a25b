//! Rewrite rules as spans `L <- K -> R`, match enumeration and DPO
//! application.
//!
//! A rule is written as two lists of pattern edges over variables (and
//! optional integer constants). The interface `K` is the set of variables
//! shared by both sides. Applying a rule consumes every matched left-hand
//! edge instance and creates one fresh edge per right-hand pattern edge;
//! variables that only occur on the right create fresh vertices.
//!
//! Vertex bindings need not be injective, edge assignments must be. Rules
//! with `gluing` set additionally enforce the DPO gluing condition on their
//! left-only variables (no identification with other variables, no dangling
//! edges) and delete those vertices outright. Vertices typed as dummies can
//! only be bound by variables that occur exactly once on each side, which
//! keeps open interfaces intact.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::hypergraph::{EdgeId, Hyperedge, Hypergraph, Label, VertexId};
use crate::notation::{parse_rule_sides, NotationError};
use crate::phase::Phase;

/// A pattern position: a variable, or a literal host vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(VertexId),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    fn parse_token(t: &str) -> Term {
        match t.parse::<VertexId>() {
            Ok(c) => Term::Const(c),
            Err(_) => Term::Var(t.to_string()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Term::Var(v) => s.serialize_str(v),
            Term::Const(c) => s.serialize_u32(*c),
        }
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Term, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Const(VertexId),
            Var(String),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Const(c) => Term::Const(c),
            Raw::Var(v) => Term::Var(v),
        })
    }
}

pub type PatternEdge = Vec<Term>;

/// Phase slot of a label pattern: a fixed phase, or a phase variable bound
/// by the match. Serialized as a string; anything that parses as a phase is a
/// literal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PhasePattern {
    Exact(Phase),
    Var(String),
}

impl Serialize for PhasePattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PhasePattern::Exact(p) => s.collect_str(p),
            PhasePattern::Var(v) => s.serialize_str(v),
        }
    }
}

impl<'de> Deserialize<'de> for PhasePattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<PhasePattern, D::Error> {
        let s = String::deserialize(d)?;
        Ok(match s.parse::<Phase>() {
            Ok(p) => PhasePattern::Exact(p),
            Err(_) => PhasePattern::Var(s),
        })
    }
}

/// Constraint on the label of the vertex a variable binds to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LabelPattern {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<PhasePattern>,
}

impl LabelPattern {
    pub fn spider(kind: &str, phase: PhasePattern) -> LabelPattern {
        LabelPattern {
            kind: kind.to_string(),
            phase: Some(phase),
        }
    }

    fn admits(
        &self,
        label: Option<&Label>,
        phases: &mut BTreeMap<String, Phase>,
        bound: &mut Vec<String>,
    ) -> bool {
        let Some(label) = label else { return false };
        if label.kind != self.kind {
            return false;
        }
        match (&self.phase, label.phase) {
            (None, None) => true,
            (Some(PhasePattern::Exact(p)), Some(q)) => *p == q,
            (Some(PhasePattern::Var(v)), Some(q)) => match phases.get(v) {
                Some(p) => *p == q,
                None => {
                    phases.insert(v.clone(), q);
                    bound.push(v.clone());
                    true
                }
            },
            _ => false,
        }
    }
}

/// Sum of phase variables plus a constant, e.g. `a+b` or `a+1/2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhaseSum {
    pub vars: Vec<String>,
    pub constant: Phase,
}

impl PhaseSum {
    pub fn constant(p: Phase) -> PhaseSum {
        PhaseSum {
            vars: Vec::new(),
            constant: p,
        }
    }

    pub fn of_vars(vars: &[&str]) -> PhaseSum {
        PhaseSum {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            constant: Phase::ZERO,
        }
    }

    pub fn eval(&self, phases: &BTreeMap<String, Phase>) -> Option<Phase> {
        let mut acc = self.constant;
        for v in &self.vars {
            acc = acc + *phases.get(v)?;
        }
        Some(acc)
    }
}

impl fmt::Display for PhaseSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.vars.clone();
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        f.write_str(&parts.join("+"))
    }
}

impl Serialize for PhaseSum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PhaseSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<PhaseSum, D::Error> {
        let s = String::deserialize(d)?;
        let mut sum = PhaseSum {
            vars: Vec::new(),
            constant: Phase::ZERO,
        };
        for part in s.split('+').map(str::trim) {
            if part.is_empty() {
                return Err(serde::de::Error::custom(format!(
                    "empty term in phase sum `{s}`"
                )));
            }
            match part.parse::<Phase>() {
                Ok(p) => sum.constant = sum.constant + p,
                Err(_) => sum.vars.push(part.to_string()),
            }
        }
        Ok(sum)
    }
}

/// Label given to a fresh vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LabelTemplate {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<PhaseSum>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule `{rule}`: pattern edge with no positions")]
    EmptyPatternEdge { rule: String },
    #[error("rule `{rule}`: label pattern on `{var}`, which is not a left-hand variable")]
    UnknownLabeledVar { rule: String, var: String },
    #[error("rule `{rule}`: label template on `{var}`, which is not a fresh right-hand variable")]
    TemplateOnNonFresh { rule: String, var: String },
    #[error("rule `{rule}`: phase variable `{var}` is not bound on the left-hand side")]
    UnboundPhaseVar { rule: String, var: String },
    #[error(transparent)]
    Notation(#[from] NotationError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RewriteRule {
    pub name: String,
    pub lhs: Vec<PatternEdge>,
    pub rhs: Vec<PatternEdge>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lhs_labels: BTreeMap<String, LabelPattern>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub rhs_labels: BTreeMap<String, LabelTemplate>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub gluing: bool,
}

fn first_appearance(edges: &[PatternEdge]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for t in edges.iter().flatten() {
        if let Term::Var(v) = t {
            if seen.insert(v.as_str()) {
                out.push(v.clone());
            }
        }
    }
    out
}

impl RewriteRule {
    pub fn new(
        name: impl Into<String>,
        lhs: Vec<PatternEdge>,
        rhs: Vec<PatternEdge>,
    ) -> RewriteRule {
        RewriteRule {
            name: name.into(),
            lhs,
            rhs,
            lhs_labels: BTreeMap::new(),
            rhs_labels: BTreeMap::new(),
            gluing: false,
        }
    }

    /// Parses `{{x,y},{x,z}}->{{x,z},{x,w},{w,y}}`. Integer tokens are
    /// vertex constants, everything else is a variable.
    pub fn from_notation(name: impl Into<String>, src: &str) -> Result<RewriteRule, RuleError> {
        let (l, r) = parse_rule_sides(src)?;
        let conv = |side: Vec<Vec<String>>| -> Vec<PatternEdge> {
            side.into_iter()
                .map(|e| e.iter().map(|t| Term::parse_token(t)).collect())
                .collect()
        };
        let rule = RewriteRule::new(name, conv(l), conv(r));
        rule.validate()?;
        Ok(rule)
    }

    pub fn with_lhs_label(mut self, var: &str, pattern: LabelPattern) -> RewriteRule {
        self.lhs_labels.insert(var.to_string(), pattern);
        self
    }

    pub fn with_rhs_label(mut self, var: &str, template: LabelTemplate) -> RewriteRule {
        self.rhs_labels.insert(var.to_string(), template);
        self
    }

    pub fn with_gluing(mut self, gluing: bool) -> RewriteRule {
        self.gluing = gluing;
        self
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        let rule = || self.name.clone();
        if self.lhs.iter().chain(&self.rhs).any(|e| e.is_empty()) {
            return Err(RuleError::EmptyPatternEdge { rule: rule() });
        }
        let lhs = self.lhs_vars();
        if let Some(v) = self.lhs_labels.keys().find(|v| !lhs.contains(v)) {
            return Err(RuleError::UnknownLabeledVar {
                rule: rule(),
                var: v.clone(),
            });
        }
        let fresh = self.fresh_vars();
        if let Some(v) = self.rhs_labels.keys().find(|v| !fresh.contains(v)) {
            return Err(RuleError::TemplateOnNonFresh {
                rule: rule(),
                var: v.clone(),
            });
        }
        let bound: BTreeSet<&str> = self
            .lhs_labels
            .values()
            .filter_map(|p| match &p.phase {
                Some(PhasePattern::Var(v)) => Some(v.as_str()),
                _ => None,
            })
            .collect();
        for t in self.rhs_labels.values() {
            if let Some(sum) = &t.phase {
                if let Some(v) = sum.vars.iter().find(|v| !bound.contains(v.as_str())) {
                    return Err(RuleError::UnboundPhaseVar {
                        rule: rule(),
                        var: v.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Left-hand variables in order of first appearance.
    pub fn lhs_vars(&self) -> Vec<String> {
        first_appearance(&self.lhs)
    }

    pub fn rhs_vars(&self) -> Vec<String> {
        first_appearance(&self.rhs)
    }

    /// Shared variables, i.e. the preserved vertices of the interface.
    pub fn interface_vars(&self) -> Vec<String> {
        let rhs: BTreeSet<String> = self.rhs_vars().into_iter().collect();
        self.lhs_vars()
            .into_iter()
            .filter(|v| rhs.contains(v))
            .collect()
    }

    /// Right-only variables in right-hand order; each creates a vertex.
    pub fn fresh_vars(&self) -> Vec<String> {
        let lhs: BTreeSet<String> = self.lhs_vars().into_iter().collect();
        self.rhs_vars()
            .into_iter()
            .filter(|v| !lhs.contains(v))
            .collect()
    }

    /// Left-only variables.
    pub fn deleted_vars(&self) -> Vec<String> {
        let rhs: BTreeSet<String> = self.rhs_vars().into_iter().collect();
        self.lhs_vars()
            .into_iter()
            .filter(|v| !rhs.contains(v))
            .collect()
    }

    pub fn has_labels(&self) -> bool {
        !self.lhs_labels.is_empty() || !self.rhs_labels.is_empty()
    }

    /// Swaps the two sides. Only meaningful for unlabeled rules; labeled rules
    /// keep their left label patterns, which no longer apply, so callers
    /// should check [`RewriteRule::has_labels`] first.
    pub fn inverse(&self) -> RewriteRule {
        RewriteRule::new(
            format!("{}^-1", self.name),
            self.rhs.clone(),
            self.lhs.clone(),
        )
        .with_gluing(self.gluing)
    }

    /// Applies `f` to every variable name, including phase variables.
    pub fn rename_vars(&self, f: impl Fn(&str) -> String) -> RewriteRule {
        let side = |edges: &[PatternEdge]| -> Vec<PatternEdge> {
            edges
                .iter()
                .map(|e| {
                    e.iter()
                        .map(|t| match t {
                            Term::Var(v) => Term::Var(f(v)),
                            c => c.clone(),
                        })
                        .collect()
                })
                .collect()
        };
        RewriteRule {
            name: self.name.clone(),
            lhs: side(&self.lhs),
            rhs: side(&self.rhs),
            lhs_labels: self
                .lhs_labels
                .iter()
                .map(|(v, p)| {
                    let phase = p.phase.as_ref().map(|ph| match ph {
                        PhasePattern::Var(x) => PhasePattern::Var(f(x)),
                        e => e.clone(),
                    });
                    (
                        f(v),
                        LabelPattern {
                            kind: p.kind.clone(),
                            phase,
                        },
                    )
                })
                .collect(),
            rhs_labels: self
                .rhs_labels
                .iter()
                .map(|(v, t)| {
                    let phase = t.phase.as_ref().map(|s| PhaseSum {
                        vars: s.vars.iter().map(|x| f(x)).collect(),
                        constant: s.constant,
                    });
                    (
                        f(v),
                        LabelTemplate {
                            kind: t.kind.clone(),
                            phase,
                        },
                    )
                })
                .collect(),
            gluing: self.gluing,
        }
    }

    fn occurrences(edges: &[PatternEdge]) -> HashMap<&Term, usize> {
        let mut m = HashMap::new();
        for t in edges.iter().flatten() {
            *m.entry(t).or_insert(0) += 1;
        }
        m
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |edges: &[PatternEdge]| -> String {
            let es: Vec<String> = edges
                .iter()
                .map(|e| {
                    format!(
                        "{{{}}}",
                        e.iter()
                            .map(|t| t.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    )
                })
                .collect();
            format!("{{{}}}", es.join(","))
        };
        write!(f, "{}->{}", side(&self.lhs), side(&self.rhs))
    }
}

/// An occurrence of a rule's left-hand side in a host.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Match {
    pub rule: String,
    pub binding: BTreeMap<String, VertexId>,
    /// Host edge for each left-hand pattern edge, by pattern index.
    pub edges: Vec<EdgeId>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub phases: BTreeMap<String, Phase>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteResult {
    pub result: Hypergraph,
    /// Consumed host edges, in left-hand pattern order.
    pub consumed: Vec<EdgeId>,
    /// Created edges, in right-hand pattern order.
    pub created: Vec<EdgeId>,
    pub fresh_vertices: Vec<VertexId>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("match for `{rule}` is invalid: {reason}")]
    MatchInvalid { rule: String, reason: String },
    #[error("second rewrite does not start from the first rewrite's output")]
    StateMismatch,
}

/// Enumerates every match of `rule` in `host`, sorted by the host edge
/// positions assigned to the left-hand pattern edges.
pub fn find_matches(rule: &RewriteRule, host: &Hypergraph) -> Vec<Match> {
    let matcher = Matcher::new(rule, host);
    let mut found = Vec::new();
    let mut st = MatchState {
        binding: HashMap::new(),
        phases: BTreeMap::new(),
        assign: vec![usize::MAX; rule.lhs.len()],
        used: vec![false; host.edges().len()],
    };
    matcher.search(0, &mut st, &mut found);
    found.sort();
    found
        .into_iter()
        .map(|(positions, binding, phases)| Match {
            rule: rule.name.clone(),
            binding: binding.into_iter().collect(),
            edges: positions.iter().map(|&p| host.edges()[p].id).collect(),
            phases,
        })
        .collect()
}

type Found = (Vec<usize>, Vec<(String, VertexId)>, BTreeMap<String, Phase>);

struct MatchState<'r> {
    binding: HashMap<&'r str, VertexId>,
    phases: BTreeMap<String, Phase>,
    assign: Vec<usize>,
    used: Vec<bool>,
}

struct Matcher<'a> {
    rule: &'a RewriteRule,
    host: &'a Hypergraph,
    order: Vec<usize>,
    by_arity: HashMap<usize, Vec<usize>>,
    incident: HashMap<VertexId, Vec<usize>>,
    lhs_occ: HashMap<&'a Term, usize>,
    rhs_occ: HashMap<&'a Term, usize>,
    deleted: Vec<&'a str>,
    lhs_consts: BTreeSet<VertexId>,
}

impl<'a> Matcher<'a> {
    fn new(rule: &'a RewriteRule, host: &'a Hypergraph) -> Matcher<'a> {
        let mut by_arity: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut incident: HashMap<VertexId, Vec<usize>> = HashMap::new();
        for (i, e) in host.edges().iter().enumerate() {
            by_arity.entry(e.arity()).or_default().push(i);
            for &v in &e.vertices {
                let list = incident.entry(v).or_default();
                if list.last() != Some(&i) {
                    list.push(i);
                }
            }
        }

        // Most-constrained-first order: prefer pattern edges sharing variables
        // with what is already placed.
        let mut order = Vec::with_capacity(rule.lhs.len());
        let mut placed = vec![false; rule.lhs.len()];
        let mut known: BTreeSet<&Term> = BTreeSet::new();
        for _ in 0..rule.lhs.len() {
            let next = (0..rule.lhs.len())
                .filter(|&i| !placed[i])
                .max_by_key(|&i| {
                    let e = &rule.lhs[i];
                    let shared = e
                        .iter()
                        .filter(|t| known.contains(t) || matches!(t, Term::Const(_)))
                        .count();
                    let labeled = e
                        .iter()
                        .filter(|t| t.as_var().is_some_and(|v| rule.lhs_labels.contains_key(v)))
                        .count();
                    (shared, labeled, std::cmp::Reverse(i))
                })
                .unwrap();
            placed[next] = true;
            order.push(next);
            known.extend(rule.lhs[next].iter());
        }

        let deleted_owned = rule.deleted_vars();
        let deleted = if rule.gluing {
            let lhs_vars: Vec<&'a str> = rule
                .lhs
                .iter()
                .flatten()
                .filter_map(|t| t.as_var())
                .collect();
            lhs_vars
                .into_iter()
                .filter(|v| deleted_owned.iter().any(|d| d == v))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        } else {
            Vec::new()
        };
        let lhs_consts = rule
            .lhs
            .iter()
            .flatten()
            .filter_map(|t| {
                if let Term::Const(c) = t {
                    Some(*c)
                } else {
                    None
                }
            })
            .collect();
        Matcher {
            rule,
            host,
            order,
            by_arity,
            incident,
            lhs_occ: RewriteRule::occurrences(&rule.lhs),
            rhs_occ: RewriteRule::occurrences(&rule.rhs),
            deleted,
            lhs_consts,
        }
    }

    fn dummy_ok(&self, t: &Term, v: VertexId) -> bool {
        !self.host.is_dummy(v)
            || (self.lhs_occ.get(t).copied() == Some(1) && self.rhs_occ.get(t).copied() == Some(1))
    }

    fn search(&self, k: usize, st: &mut MatchState<'a>, out: &mut Vec<Found>) {
        if k == self.order.len() {
            if self.gluing_ok(st) {
                let mut b: Vec<(String, VertexId)> = st
                    .binding
                    .iter()
                    .map(|(k, v)| (k.to_string(), *v))
                    .collect();
                b.sort();
                out.push((st.assign.clone(), b, st.phases.clone()));
            }
            return;
        }
        let p = self.order[k];
        let pattern = &self.rule.lhs[p];
        let anchor = pattern.iter().find_map(|t| match t {
            Term::Const(c) => Some(*c),
            Term::Var(v) => st.binding.get(v.as_str()).copied(),
        });
        let empty = Vec::new();
        let candidates = match anchor {
            Some(v) => self.incident.get(&v).unwrap_or(&empty),
            None => self.by_arity.get(&pattern.len()).unwrap_or(&empty),
        };
        for &pos in candidates {
            if st.used[pos] {
                continue;
            }
            let edge = &self.host.edges()[pos];
            if edge.arity() != pattern.len() {
                continue;
            }
            let reversed: Vec<VertexId>;
            let mut orientations: Vec<&[VertexId]> = vec![&edge.vertices];
            if self.host.unordered_pairs()
                && edge.arity() == 2
                && edge.vertices[0] != edge.vertices[1]
            {
                reversed = vec![edge.vertices[1], edge.vertices[0]];
                orientations.push(&reversed);
            }
            for incidence in orientations {
                let mut newly: Vec<&'a str> = Vec::new();
                let mut new_phases: Vec<String> = Vec::new();
                if self.bind(pattern, incidence, st, &mut newly, &mut new_phases) {
                    st.used[pos] = true;
                    st.assign[p] = pos;
                    self.search(k + 1, st, out);
                    st.used[pos] = false;
                    st.assign[p] = usize::MAX;
                }
                for v in newly {
                    st.binding.remove(v);
                }
                for v in new_phases {
                    st.phases.remove(&v);
                }
            }
        }
    }

    fn bind(
        &self,
        pattern: &'a [Term],
        incidence: &[VertexId],
        st: &mut MatchState<'a>,
        newly: &mut Vec<&'a str>,
        new_phases: &mut Vec<String>,
    ) -> bool {
        for (t, &v) in pattern.iter().zip(incidence) {
            match t {
                Term::Const(c) => {
                    if *c != v || !self.dummy_ok(t, v) {
                        return false;
                    }
                }
                Term::Var(name) => match st.binding.get(name.as_str()) {
                    Some(&b) => {
                        if b != v {
                            return false;
                        }
                    }
                    None => {
                        if !self.dummy_ok(t, v) {
                            return false;
                        }
                        if let Some(lp) = self.rule.lhs_labels.get(name) {
                            if !lp.admits(self.host.label(v), &mut st.phases, new_phases) {
                                return false;
                            }
                        }
                        st.binding.insert(name.as_str(), v);
                        newly.push(name.as_str());
                    }
                },
            }
        }
        true
    }

    fn gluing_ok(&self, st: &MatchState<'a>) -> bool {
        for d in &self.deleted {
            let v = st.binding[d];
            if self.lhs_consts.contains(&v) || st.binding.iter().any(|(k, &u)| k != d && u == v) {
                return false;
            }
            if let Some(incident) = self.incident.get(&v) {
                if incident.iter().any(|&pos| !st.used[pos]) {
                    return false;
                }
            }
        }
        true
    }
}

/// Applies a match, consuming the matched edges and creating the right-hand
/// side. Fresh vertex ids continue from the host's largest id, fresh edge ids
/// likewise, both in right-hand order.
pub fn apply_match(
    rule: &RewriteRule,
    host: &Hypergraph,
    m: &Match,
) -> Result<RewriteResult, RewriteError> {
    let invalid = |reason: String| RewriteError::MatchInvalid {
        rule: rule.name.clone(),
        reason,
    };
    if m.edges.len() != rule.lhs.len() {
        return Err(invalid(format!(
            "{} edges assigned for {} pattern edges",
            m.edges.len(),
            rule.lhs.len()
        )));
    }
    let positions: HashMap<EdgeId, usize> = host
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id, i))
        .collect();
    let mut consumed_pos = BTreeSet::new();
    for (pattern, id) in rule.lhs.iter().zip(&m.edges) {
        let &pos = positions
            .get(id)
            .ok_or_else(|| invalid(format!("edge {id} not in host")))?;
        if !consumed_pos.insert(pos) {
            return Err(invalid(format!("edge {id} assigned twice")));
        }
        let resolved = pattern
            .iter()
            .map(|t| match t {
                Term::Const(c) => Ok(*c),
                Term::Var(v) => m
                    .binding
                    .get(v)
                    .copied()
                    .ok_or_else(|| invalid(format!("variable {v} unbound"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let actual = &host.edges()[pos].vertices;
        let fits = *actual == resolved
            || (host.unordered_pairs()
                && actual.len() == 2
                && actual[0] == resolved[1]
                && actual[1] == resolved[0]);
        if !fits {
            return Err(invalid(format!("edge {id} does not fit its pattern")));
        }
    }

    let mut binding = m.binding.clone();
    let mut fresh_vertices = Vec::new();
    for (next_v, v) in (host.next_vertex_id()..).zip(rule.fresh_vars()) {
        binding.insert(v, next_v);
        fresh_vertices.push(next_v);
    }
    let mut created = Vec::with_capacity(rule.rhs.len());
    let mut new_edges = Vec::with_capacity(rule.rhs.len());
    for (next_e, pattern) in (host.next_edge_id().0..).zip(&rule.rhs) {
        let vertices = pattern
            .iter()
            .map(|t| match t {
                Term::Const(c) => *c,
                Term::Var(v) => binding[v],
            })
            .collect();
        let id = EdgeId(next_e);
        created.push(id);
        new_edges.push(Hyperedge { id, vertices });
    }

    let deleted: BTreeSet<VertexId> = if rule.gluing {
        rule.deleted_vars().iter().map(|v| binding[v]).collect()
    } else {
        BTreeSet::new()
    };
    let mut vertices: BTreeSet<VertexId> = host
        .vertices()
        .iter()
        .copied()
        .filter(|v| !deleted.contains(v))
        .collect();
    vertices.extend(fresh_vertices.iter().copied());
    vertices.extend(rule.rhs.iter().flatten().filter_map(|t| {
        if let Term::Const(c) = t {
            Some(*c)
        } else {
            None
        }
    }));

    let mut labels: BTreeMap<VertexId, Label> = host
        .labels()
        .iter()
        .filter(|(v, _)| !deleted.contains(v))
        .map(|(v, l)| (*v, l.clone()))
        .collect();
    for (var, tmpl) in &rule.rhs_labels {
        let phase = match &tmpl.phase {
            None => None,
            Some(sum) => Some(
                sum.eval(&m.phases)
                    .ok_or_else(|| invalid(format!("phase of {var} unbound")))?,
            ),
        };
        labels.insert(
            binding[var],
            Label {
                kind: tmpl.kind.clone(),
                phase,
            },
        );
    }

    let mut edges: Vec<Hyperedge> = host
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| !consumed_pos.contains(i))
        .map(|(_, e)| e.clone())
        .collect();
    edges.extend(new_edges);

    let result = Hypergraph::from_parts(
        vertices,
        edges,
        labels,
        host.dummies().clone(),
        host.boundary().to_vec(),
        host.wire_mode(),
    );
    Ok(RewriteResult {
        result,
        consumed: m.edges.clone(),
        created,
        fresh_vertices,
    })
}

/// A rewrite together with its input, as needed to reason about pairs of
/// consecutive rewrites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppliedRewrite {
    pub input: Hypergraph,
    pub output: Hypergraph,
    pub consumed: BTreeSet<EdgeId>,
    pub created: BTreeSet<EdgeId>,
}

pub fn rewrite(
    rule: &RewriteRule,
    host: &Hypergraph,
    m: &Match,
) -> Result<AppliedRewrite, RewriteError> {
    let r = apply_match(rule, host, m)?;
    Ok(AppliedRewrite {
        input: host.clone(),
        output: r.result,
        consumed: r.consumed.into_iter().collect(),
        created: r.created.into_iter().collect(),
    })
}

/// True iff the second rewrite consumes nothing the first one created.
pub fn sequentially_independent(
    first: &AppliedRewrite,
    second: &AppliedRewrite,
) -> Result<bool, RewriteError> {
    if second.input != first.output {
        return Err(RewriteError::StateMismatch);
    }
    Ok(second.consumed.is_disjoint(&first.created))
}
