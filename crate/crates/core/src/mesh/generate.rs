//! Structured generators for block-like benchmark geometries.

use std::collections::HashMap;

use super::{markers, BoundaryFacet, ElementKind, StructuralMesh};
use crate::error::{IfedError, Result};
use crate::linalg::Vec2;

/// Corners of the classical tapered Cook membrane (counter-clockwise from
/// the bottom-left), in the units of the original 48×44/60 drawing.
pub const COOK_CLASSIC_CORNERS: [Vec2; 4] = [[0.0, 0.0], [48.0, 44.0], [48.0, 60.0], [0.0, 44.0]];

/// Cook geometry rescaled so its longest side has length `longest_side` and
/// translated so its bounding box is centered on `center`.
pub fn cook_membrane_corners(longest_side: f64, center: Vec2) -> [Vec2; 4] {
    let c = COOK_CLASSIC_CORNERS;
    let mut longest: f64 = 0.0;
    for s in 0..4 {
        let (a, b) = (c[s], c[(s + 1) % 4]);
        longest = longest.max((b[0] - a[0]).hypot(b[1] - a[1]));
    }
    let k = longest_side / longest;
    let (w, h) = (48.0 * k, 60.0 * k);
    let shift = [center[0] - w / 2.0, center[1] - h / 2.0];
    c.map(|p| [p[0] * k + shift[0], p[1] * k + shift[1]])
}

impl StructuralMesh {
    /// Axis-aligned `width × height` block with lower-left corner `origin`,
    /// split into `nx × ny` cells.
    pub fn block(origin: Vec2, width: f64, height: f64, nx: usize, ny: usize, kind: ElementKind) -> Result<Self> {
        let [x0, y0] = origin;
        Self::quad_domain(
            [[x0, y0], [x0 + width, y0], [x0 + width, y0 + height], [x0, y0 + height]],
            nx,
            ny,
            kind,
        )
    }

    /// Rectangle of the given size centered at `center` and rotated by
    /// `angle` radians, with `nx` cells along its length.
    pub fn rotated_block(
        center: Vec2,
        length: f64,
        thickness: f64,
        angle: f64,
        nx: usize,
        ny: usize,
        kind: ElementKind,
    ) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        let corner = |a: f64, b: f64| [center[0] + a * c - b * s, center[1] + a * s + b * c];
        let (hl, ht) = (length / 2.0, thickness / 2.0);
        Self::quad_domain(
            [corner(-hl, -ht), corner(hl, -ht), corner(hl, ht), corner(-hl, ht)],
            nx,
            ny,
            kind,
        )
    }

    /// Meshes the bilinear image of the unit square through the four
    /// counter-clockwise `corners`. Sides are marked bottom (corner 0→1),
    /// right (1→2), top (2→3) and left (3→0). Triangles split each cell along
    /// its lower-left to upper-right diagonal.
    pub fn quad_domain(corners: [Vec2; 4], nx: usize, ny: usize, kind: ElementKind) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(IfedError::InvalidMesh(format!("need at least one cell, got {nx}×{ny}")));
        }
        let lattice = |i: usize, j: usize| -> Vec2 {
            let (s, t) = (i as f64 / nx as f64, j as f64 / ny as f64);
            let w = [(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t];
            let mut p = [0.0; 2];
            for k in 0..4 {
                p[0] += w[k] * corners[k][0];
                p[1] += w[k] * corners[k][1];
            }
            p
        };
        let mut nodes: Vec<Vec2> = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push(lattice(i, j));
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;

        // (vertices, cell sides carried by element sides 0..nv)
        let mut cells: Vec<(Vec<usize>, Vec<Option<u32>>)> = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                let bottom = (j == 0).then_some(markers::BOTTOM);
                let right = (i + 1 == nx).then_some(markers::RIGHT);
                let top = (j + 1 == ny).then_some(markers::TOP);
                let left = (i == 0).then_some(markers::LEFT);
                if kind.is_triangle() {
                    cells.push((vec![a, b, c], vec![bottom, right, None]));
                    cells.push((vec![a, c, d], vec![None, top, left]));
                } else {
                    cells.push((vec![a, b, c, d], vec![bottom, right, top, left]));
                }
            }
        }

        let nv = kind.vertex_count();
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut elements = Vec::with_capacity(cells.len());
        let mut facets = Vec::new();
        for (e, (verts, sides)) in cells.iter().enumerate() {
            let mut el = verts.clone();
            if kind.degree() == 2 {
                for s in 0..nv {
                    let (p, q) = (verts[s], verts[(s + 1) % nv]);
                    let key = (p.min(q), p.max(q));
                    let n = *mids.entry(key).or_insert_with(|| {
                        let (x, y) = (nodes[p], nodes[q]);
                        nodes.push([(x[0] + y[0]) / 2.0, (x[1] + y[1]) / 2.0]);
                        nodes.len() - 1
                    });
                    el.push(n);
                }
                if kind == ElementKind::Q2 {
                    let mut c = [0.0; 2];
                    for &v in verts {
                        c[0] += nodes[v][0] / 4.0;
                        c[1] += nodes[v][1] / 4.0;
                    }
                    nodes.push(c);
                    el.push(nodes.len() - 1);
                }
            }
            for (side, marker) in sides.iter().enumerate() {
                if let Some(marker) = *marker {
                    facets.push(BoundaryFacet { element: e, side, marker });
                }
            }
            elements.push(el);
        }
        Self::new(kind, nodes, elements, facets)
    }
}
