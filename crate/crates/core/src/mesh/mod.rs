//! Unstructured 2D structural meshes.

mod element;
mod generate;
mod io;

pub use element::ElementKind;
pub use generate::{cook_membrane_corners, COOK_CLASSIC_CORNERS};
pub use io::{read_mesh, write_mesh};

use std::collections::HashMap;

use crate::error::{IfedError, Result};
use crate::linalg::{det, Mat2, Vec2};

/// Boundary side of an element carrying a user marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryFacet {
    pub element: usize,
    pub side: usize,
    pub marker: u32,
}

/// Side markers assigned by the structured generators.
pub mod markers {
    pub const BOTTOM: u32 = 0;
    pub const RIGHT: u32 = 1;
    pub const TOP: u32 = 2;
    pub const LEFT: u32 = 3;
}

/// A conforming 2D finite element mesh of a single element kind.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct StructuralMesh {
    kind: ElementKind,
    nodes: Vec<Vec2>,
    connectivity: Vec<usize>,
    facets: Vec<BoundaryFacet>,
    boundary_nodes: Vec<bool>,
}

impl StructuralMesh {
    /// Validates and builds a mesh. `elements` is a list of node index lists in
    /// the reference ordering of `kind`.
    pub fn new(
        kind: ElementKind,
        nodes: Vec<Vec2>,
        elements: Vec<Vec<usize>>,
        facets: Vec<BoundaryFacet>,
    ) -> Result<Self> {
        let npe = kind.node_count();
        let mut referenced = vec![false; nodes.len()];
        let mut connectivity = Vec::with_capacity(elements.len() * npe);
        for (e, el) in elements.iter().enumerate() {
            if el.len() != npe {
                return Err(IfedError::InvalidMesh(format!(
                    "element {e} has {} nodes, {kind} needs {npe}",
                    el.len()
                )));
            }
            for &n in el {
                if n >= nodes.len() {
                    return Err(IfedError::InvalidMesh(format!(
                        "element {e} references node {n} of {}",
                        nodes.len()
                    )));
                }
                referenced[n] = true;
            }
            connectivity.extend_from_slice(el);
        }
        if let Some(n) = referenced.iter().position(|r| !r) {
            return Err(IfedError::InvalidMesh(format!("node {n} belongs to no element")));
        }
        for f in &facets {
            if f.element >= elements.len() || f.side >= kind.vertex_count() {
                return Err(IfedError::InvalidMesh(format!("invalid boundary facet {f:?}")));
            }
        }
        let mut mesh = Self {
            kind,
            nodes,
            connectivity,
            facets,
            boundary_nodes: Vec::new(),
        };
        mesh.check_orientation()?;
        mesh.boundary_nodes = mesh.topological_boundary_nodes();
        Ok(mesh)
    }

    fn check_orientation(&self) -> Result<()> {
        let mut probes: Vec<Vec2> = self.kind.reference_nodes()[..self.kind.vertex_count()].to_vec();
        probes.push(if self.kind.is_triangle() {
            [1.0 / 3.0, 1.0 / 3.0]
        } else {
            [0.0, 0.0]
        });
        for e in 0..self.element_count() {
            for &xi in &probes {
                let d = det(&self.jacobian(e, xi));
                if d <= 0.0 || !d.is_finite() {
                    return Err(IfedError::DegenerateElement { element: e, det: d });
                }
            }
        }
        Ok(())
    }

    /// Nodes on sides shared by exactly one element.
    fn topological_boundary_nodes(&self) -> Vec<bool> {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        let nv = self.kind.vertex_count();
        for e in 0..self.element_count() {
            let el = self.element(e);
            for s in 0..nv {
                let (a, b) = (el[s], el[(s + 1) % nv]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut flags = vec![false; self.nodes.len()];
        for e in 0..self.element_count() {
            let el = self.element(e);
            for s in 0..nv {
                let (a, b) = (el[s], el[(s + 1) % nv]);
                if count[&(a.min(b), a.max(b))] == 1 {
                    for ln in self.kind.side_nodes(s) {
                        flags[el[ln]] = true;
                    }
                }
            }
        }
        flags
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.connectivity.len() / self.kind.node_count()
    }

    pub fn element(&self, e: usize) -> &[usize] {
        let npe = self.kind.node_count();
        &self.connectivity[e * npe..(e + 1) * npe]
    }

    pub fn boundary_facets(&self) -> &[BoundaryFacet] {
        &self.facets
    }

    pub fn facets_with_marker(&self, marker: u32) -> impl Iterator<Item = &BoundaryFacet> {
        self.facets.iter().filter(move |f| f.marker == marker)
    }

    /// `true` for nodes on the topological boundary of the mesh.
    pub fn boundary_node_flags(&self) -> &[bool] {
        &self.boundary_nodes
    }

    /// Scalar degrees of freedom of a vector field on this mesh.
    pub fn dof_count(&self) -> usize {
        2 * self.nodes.len()
    }

    /// Image of `xi` under element `e`'s isoparametric map evaluated with
    /// arbitrary nodal positions `positions` (reference or deformed).
    pub fn map_with(&self, positions: &[Vec2], e: usize, xi: Vec2) -> Vec2 {
        let mut x = [0.0; 2];
        for (i, &n) in self.element(e).iter().enumerate() {
            let phi = self.kind.shape_value(i, xi);
            x[0] += phi * positions[n][0];
            x[1] += phi * positions[n][1];
        }
        x
    }

    /// `∂x/∂ξ` with rows indexing physical components.
    pub fn jacobian_with(&self, positions: &[Vec2], e: usize, xi: Vec2) -> Mat2 {
        let mut j = [[0.0; 2]; 2];
        for (i, &n) in self.element(e).iter().enumerate() {
            let g = self.kind.shape_gradient(i, xi);
            for a in 0..2 {
                for b in 0..2 {
                    j[a][b] += positions[n][a] * g[b];
                }
            }
        }
        j
    }

    pub fn map_to_physical(&self, e: usize, xi: Vec2) -> Vec2 {
        self.map_with(&self.nodes, e, xi)
    }

    pub fn jacobian(&self, e: usize, xi: Vec2) -> Mat2 {
        self.jacobian_with(&self.nodes, e, xi)
    }

    /// Longest vertex-to-vertex element edge (ΔX).
    pub fn longest_edge(&self) -> f64 {
        let nv = self.kind.vertex_count();
        let mut longest: f64 = 0.0;
        for e in 0..self.element_count() {
            let el = self.element(e);
            for s in 0..nv {
                let a = self.nodes[el[s]];
                let b = self.nodes[el[(s + 1) % nv]];
                longest = longest.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        longest
    }

    /// Combines disjoint meshes of the same kind into one.
    pub fn merge(meshes: &[StructuralMesh]) -> Result<Self> {
        let kind = meshes
            .first()
            .ok_or_else(|| IfedError::InvalidMesh("nothing to merge".into()))?
            .kind;
        let mut nodes = Vec::new();
        let mut elements = Vec::new();
        let mut facets = Vec::new();
        for m in meshes {
            if m.kind != kind {
                return Err(IfedError::InvalidMesh("cannot merge different element kinds".into()));
            }
            let node_offset = nodes.len();
            let elem_offset = elements.len();
            nodes.extend_from_slice(&m.nodes);
            for e in 0..m.element_count() {
                elements.push(m.element(e).iter().map(|n| n + node_offset).collect());
            }
            facets.extend(m.facets.iter().map(|f| BoundaryFacet {
                element: f.element + elem_offset,
                ..*f
            }));
        }
        Self::new(kind, nodes, elements, facets)
    }

    /// Same mesh with nodes relabelled by `perm` (new index of old node `i`
    /// is `perm[i]`).
    pub fn renumbered(&self, perm: &[usize]) -> Result<Self> {
        let mut nodes = vec![[0.0; 2]; self.nodes.len()];
        for (old, &new) in perm.iter().enumerate() {
            nodes[new] = self.nodes[old];
        }
        let elements = (0..self.element_count())
            .map(|e| self.element(e).iter().map(|&n| perm[n]).collect())
            .collect();
        Self::new(self.kind, nodes, elements, self.facets.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_triangle_map_is_identity() {
        let m = StructuralMesh::new(
            ElementKind::P1,
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![vec![0, 1, 2]],
            vec![],
        )
        .unwrap();
        let x = m.map_to_physical(0, [0.3, 0.2]);
        assert!((x[0] - 0.3).abs() < 1e-15 && (x[1] - 0.2).abs() < 1e-15);
        assert_eq!(det(&m.jacobian(0, [0.3, 0.2])), 1.0);
        assert!(m.boundary_node_flags().iter().all(|&b| b));
    }

    #[test]
    fn scaled_triangle_det_is_area_ratio() {
        let m = StructuralMesh::new(
            ElementKind::P1,
            vec![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]],
            vec![vec![0, 1, 2]],
            vec![],
        )
        .unwrap();
        // area 2 vs reference area 1/2
        assert!((det(&m.jacobian(0, [0.1, 0.1])) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn rectangle_q1_det_is_quarter_area() {
        let (a, b) = (3.0, 0.5);
        let m = StructuralMesh::block([1.0, 2.0], a, b, 1, 1, ElementKind::Q1).unwrap();
        let xi = [0.3, -0.7];
        let j = m.jacobian(0, xi);
        assert!((det(&j) - a * b / 4.0).abs() < 1e-14);
        // finite-difference check of the jacobian
        let h = 1e-6;
        for c in 0..2 {
            let mut p = xi;
            let mut q = xi;
            p[c] += h;
            q[c] -= h;
            let (xp, xq) = (m.map_to_physical(0, p), m.map_to_physical(0, q));
            for r in 0..2 {
                assert!(((xp[r] - xq[r]) / (2.0 * h) - j[r][c]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn inverted_element_rejected() {
        let err = StructuralMesh::new(
            ElementKind::P1,
            vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]],
            vec![vec![0, 1, 2]],
            vec![],
        );
        assert!(matches!(err, Err(IfedError::DegenerateElement { .. })));
    }

    #[test]
    fn dangling_node_rejected() {
        let err = StructuralMesh::new(
            ElementKind::P1,
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 5.0]],
            vec![vec![0, 1, 2]],
            vec![],
        );
        assert!(matches!(err, Err(IfedError::InvalidMesh(_))));
    }

    #[test]
    fn boundary_flags_exclude_interior_nodes() {
        for kind in ElementKind::ALL {
            let m = StructuralMesh::block([0.0, 0.0], 1.0, 1.0, 4, 4, kind).unwrap();
            for (n, &flag) in m.boundary_node_flags().iter().enumerate() {
                let [x, y] = m.nodes()[n];
                let on = x.abs() < 1e-12
                    || y.abs() < 1e-12
                    || (x - 1.0).abs() < 1e-12
                    || (y - 1.0).abs() < 1e-12;
                assert_eq!(flag, on, "{kind} node {n} at {x},{y}");
            }
        }
    }
}
