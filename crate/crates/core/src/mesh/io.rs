//! Plain-text mesh format:
//!
//! ```text
//! nodes N elements E
//! id x y                  (N lines)
//! id n1 n2 n3 n4          (E lines)
//! edge elem local_edge tag
//! ```
//!
//! Fields are whitespace separated. Floats are written in Rust's shortest
//! round-trip form, so write/read reproduces coordinates bit for bit.

use std::fmt::Write as _;

use super::{BoundaryEdge, Mesh, Node, Quad4Element};
use crate::error::{Error, Result};

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "nodes {} elements {}", mesh.nodes.len(), mesh.elements.len());
    for n in &mesh.nodes {
        let _ = writeln!(s, "{} {:?} {:?}", n.id, n.x, n.y);
    }
    for (i, e) in mesh.elements.iter().enumerate() {
        let [a, b, c, d] = e.node_ids;
        let _ = writeln!(s, "{i} {a} {b} {c} {d}");
    }
    for b in &mesh.boundary_edges {
        let _ = writeln!(s, "edge {} {} {}", b.element, b.local_edge, b.tag);
    }
    s
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line, format!("malformed {what}")))
}

pub fn read_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty mesh file"))?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("nodes") {
        return Err(parse_err(ln, "expected `nodes N elements E`"));
    }
    let n_nodes: usize = field(tok.next(), ln, "node count")?;
    if tok.next() != Some("elements") {
        return Err(parse_err(ln, "expected `elements E`"));
    }
    let n_elems: usize = field(tok.next(), ln, "element count")?;

    let mut nodes = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(ln, "truncated node block"))?;
        let mut t = l.split_whitespace();
        let id = field(t.next(), ln, "node id")?;
        let x = field(t.next(), ln, "x")?;
        let y = field(t.next(), ln, "y")?;
        nodes.push(Node { id, x, y });
    }
    let mut elements = Vec::with_capacity(n_elems);
    for i in 0..n_elems {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(ln, "truncated element block"))?;
        let mut t = l.split_whitespace();
        let id: usize = field(t.next(), ln, "element id")?;
        if id != i {
            return Err(parse_err(ln, format!("element id {id} out of sequence")));
        }
        let mut node_ids = [0; 4];
        for n in node_ids.iter_mut() {
            *n = field(t.next(), ln, "element node")?;
        }
        elements.push(Quad4Element { node_ids });
    }
    let mut boundary_edges = Vec::new();
    for (ln, l) in lines {
        let mut t = l.split_whitespace();
        if t.next() != Some("edge") {
            return Err(parse_err(ln, "expected `edge elem local_edge tag`"));
        }
        boundary_edges.push(BoundaryEdge {
            element: field(t.next(), ln, "edge element")?,
            local_edge: field(t.next(), ln, "local edge")?,
            tag: t
                .next()
                .ok_or_else(|| parse_err(ln, "missing tag"))?
                .parse()
                .map_err(|e: Error| parse_err(ln, e.to_string()))?,
        });
    }
    let mesh = Mesh {
        nodes,
        elements,
        boundary_edges,
    };
    mesh.validate()?;
    Ok(mesh)
}
