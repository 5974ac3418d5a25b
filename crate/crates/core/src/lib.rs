//! Hypergraph double-pushout rewriting, multiway evolution with causal
//! graphs, a causal-guided search for diagrammatic proofs, and a ZX-calculus
//! layer on top of it.

pub mod canon;
pub mod causal;
pub mod compose;
pub mod hypergraph;
pub mod io;
pub mod multiway;
pub mod notation;
pub mod phase;
pub mod prover;
pub mod rewrite;
pub mod zx;

pub use canon::{canonical_form, canonicalize, is_isomorphic, CanonicalKey, StateKey};
pub use hypergraph::{EdgeId, Hyperedge, Hypergraph, Label, VertexId, WireMode};
pub use phase::Phase;
pub use rewrite::{apply_match, find_matches, Match, RewriteRule, Term};
