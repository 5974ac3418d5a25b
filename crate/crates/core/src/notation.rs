//! Parser for the brace notation used throughout the tests and docs:
//! `{{0,1},{1,2}}` for hypergraphs and `{{x,y}}->{{x,y},{y,z}}` for rules.

use thiserror::Error;

use crate::hypergraph::{Hypergraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("notation error at byte {pos}: {msg}")]
pub struct NotationError {
    pub pos: usize,
    pub msg: String,
}

pub type EdgeLists = Vec<Vec<String>>;

/// Parses `{{a,b},{c}}` into nested token lists. `{}` is the empty list.
pub fn parse_edge_lists(src: &str) -> Result<EdgeLists, NotationError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let out = p.outer()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

/// Splits `lhs -> rhs` and parses both sides.
pub fn parse_rule_sides(src: &str) -> Result<(EdgeLists, EdgeLists), NotationError> {
    let (l, r) = src.split_once("->").ok_or(NotationError {
        pos: 0,
        msg: "expected `->`".into(),
    })?;
    let lhs = parse_edge_lists(l)?;
    let rhs = parse_edge_lists(r).map_err(|e| NotationError {
        pos: e.pos + l.len() + 2,
        msg: e.msg,
    })?;
    Ok((lhs, rhs))
}

impl Hypergraph {
    /// Parses `{{0,1},{1,2}}` into a closed hypergraph with ids `e0, e1, ...`.
    pub fn from_notation(src: &str) -> Result<Hypergraph, NotationError> {
        let lists = parse_edge_lists(src)?;
        let mut edges = Vec::with_capacity(lists.len());
        for l in lists {
            let vs = l
                .iter()
                .map(|t| t.parse::<VertexId>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| NotationError {
                    pos: 0,
                    msg: format!("non-integer vertex in {l:?}"),
                })?;
            edges.push(vs);
        }
        Ok(Hypergraph::from_edges(edges))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> NotationError {
        NotationError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), NotationError> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn outer(&mut self) -> Result<Vec<Vec<String>>, NotationError> {
        self.expect(b'{')?;
        let mut out = Vec::new();
        if self.peek() == Some(b'}') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.inner()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.err("expected `,` or `}`")),
            }
        }
    }

    fn inner(&mut self) -> Result<Vec<String>, NotationError> {
        self.expect(b'{')?;
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected a vertex or variable"));
            }
            out.push(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned());
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.err("expected `,` or `}`")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_lists() {
        let v = parse_edge_lists(" {{0, 1},{x}} ").unwrap();
        assert_eq!(v, vec![vec!["0".to_string(), "1".into()], vec!["x".into()]]);
        assert_eq!(parse_edge_lists("{}").unwrap(), Vec::<Vec<String>>::new());
    }

    #[test]
    fn reports_position() {
        let e = parse_edge_lists("{{0,}}").unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(parse_rule_sides("{{x}}").is_err());
    }
}
