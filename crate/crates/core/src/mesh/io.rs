//! Plain-text mesh format.
//!
//! ```text
//! <kind> <node count> <element count>
//! x y                      (one line per node)
//! n0 n1 ...                (one line per element, 0-based node indices)
//! element side marker      (any number of boundary facet lines)
//! ```
//! Blank lines and lines starting with `#` are ignored.

use std::io::{BufRead, Write};

use super::{BoundaryFacet, ElementKind, StructuralMesh};
use crate::error::{IfedError, Result};

fn parse<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| IfedError::Parse(format!("line {line}: cannot parse '{tok}'")))
}

pub fn read_mesh<R: BufRead>(reader: R) -> Result<StructuralMesh> {
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            lines.push((i + 1, t.to_string()));
        }
    }
    let mut it = lines.into_iter();
    let (ln, header) = it
        .next()
        .ok_or_else(|| IfedError::Parse("empty mesh file".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 {
        return Err(IfedError::Parse(format!("line {ln}: header needs kind, node count, element count")));
    }
    let kind: ElementKind = h[0].parse()?;
    let n_nodes: usize = parse(h[1], ln)?;
    let n_elems: usize = parse(h[2], ln)?;

    let mut nodes = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (ln, l) = it
            .next()
            .ok_or_else(|| IfedError::Parse("unexpected end of file in node block".into()))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 2 {
            return Err(IfedError::Parse(format!("line {ln}: node needs 2 coordinates")));
        }
        nodes.push([parse(t[0], ln)?, parse(t[1], ln)?]);
    }
    let mut elements = Vec::with_capacity(n_elems);
    for _ in 0..n_elems {
        let (ln, l) = it
            .next()
            .ok_or_else(|| IfedError::Parse("unexpected end of file in element block".into()))?;
        let el = l
            .split_whitespace()
            .map(|t| parse(t, ln))
            .collect::<Result<Vec<usize>>>()?;
        elements.push(el);
    }
    let mut facets = Vec::new();
    for (ln, l) in it {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 3 {
            return Err(IfedError::Parse(format!("line {ln}: facet needs element, side, marker")));
        }
        facets.push(BoundaryFacet {
            element: parse(t[0], ln)?,
            side: parse(t[1], ln)?,
            marker: parse(t[2], ln)?,
        });
    }
    StructuralMesh::new(kind, nodes, elements, facets)
}

pub fn write_mesh<W: Write>(mesh: &StructuralMesh, mut w: W) -> Result<()> {
    writeln!(w, "{} {} {}", mesh.kind(), mesh.node_count(), mesh.element_count())?;
    for p in mesh.nodes() {
        writeln!(w, "{:e} {:e}", p[0], p[1])?;
    }
    for e in 0..mesh.element_count() {
        let idx: Vec<String> = mesh.element(e).iter().map(|n| n.to_string()).collect();
        writeln!(w, "{}", idx.join(" "))?;
    }
    for f in mesh.boundary_facets() {
        writeln!(w, "{} {} {}", f.element, f.side, f.marker)?;
    }
    Ok(())
}
