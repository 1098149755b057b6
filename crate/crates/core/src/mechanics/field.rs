//! Nodal finite element vector fields.

use crate::error::{IfedError, Result};
use crate::linalg::{det, inverse, mat_mul, Mat2, Vec2};
use crate::mesh::StructuralMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldRole {
    Deformation,
    Velocity,
    Force,
}

/// A vector field `Σ_ℓ c_ℓ φ_ℓ` with one 2-vector coefficient per node.
#[derive(Debug, Clone, PartialEq)]
pub struct FEField {
    pub role: FieldRole,
    pub values: Vec<Vec2>,
}

impl FEField {
    pub fn zeros(mesh: &StructuralMesh, role: FieldRole) -> Self {
        Self {
            role,
            values: vec![[0.0; 2]; mesh.node_count()],
        }
    }

    /// The identity deformation `χ(X) = X`.
    pub fn identity(mesh: &StructuralMesh) -> Self {
        Self {
            role: FieldRole::Deformation,
            values: mesh.nodes().to_vec(),
        }
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: &StructuralMesh, role: FieldRole, f: impl Fn(Vec2) -> Vec2) -> Self {
        Self {
            role,
            values: mesh.nodes().iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coefficient count (two per node).
    pub fn dof_count(&self) -> usize {
        2 * self.values.len()
    }

    /// Field value at reference point `xi` of element `e`.
    pub fn evaluate(&self, mesh: &StructuralMesh, e: usize, xi: Vec2) -> Vec2 {
        mesh.map_with(&self.values, e, xi)
    }

    /// Sum of all coefficients per component (`1ᵀc`).
    pub fn total(&self) -> Vec2 {
        self.values
            .iter()
            .fold([0.0; 2], |s, v| [s[0] + v[0], s[1] + v[1]])
    }
}

/// `∇_X φ_i` at `xi` for every local node of element `e`, and `det ∂X/∂ξ`.
pub fn reference_gradients(mesh: &StructuralMesh, e: usize, xi: Vec2) -> Result<(Vec<Vec2>, f64)> {
    let j = mesh.jacobian(e, xi);
    let d = det(&j);
    let j_inv = inverse(&j)
        .filter(|_| d > 0.0)
        .ok_or(IfedError::DegenerateElement { element: e, det: d })?;
    let kind = mesh.kind();
    let grads = (0..kind.node_count())
        .map(|i| {
            let g = kind.shape_gradient(i, xi);
            [g[0] * j_inv[0][0] + g[1] * j_inv[1][0], g[0] * j_inv[0][1] + g[1] * j_inv[1][1]]
        })
        .collect();
    Ok((grads, d))
}

/// `F_h = ∂χ_h/∂X` at reference point `xi` of element `e`.
pub fn deformation_gradient(mesh: &StructuralMesh, chi: &FEField, e: usize, xi: Vec2) -> Result<Mat2> {
    let dx_dxi = mesh.jacobian_with(&chi.values, e, xi);
    let j = mesh.jacobian(e, xi);
    let d = det(&j);
    let j_inv = inverse(&j)
        .filter(|_| d > 0.0)
        .ok_or(IfedError::DegenerateElement { element: e, det: d })?;
    Ok(mat_mul(&dx_dxi, &j_inv))
}

/// `F_h` from precomputed reference gradients.
pub fn deformation_gradient_from(grads: &[Vec2], nodes: &[usize], chi: &[Vec2]) -> Mat2 {
    let mut f = [[0.0; 2]; 2];
    for (g, &n) in grads.iter().zip(nodes) {
        for a in 0..2 {
            for b in 0..2 {
                f[a][b] += chi[n][a] * g[b];
            }
        }
    }
    f
}
