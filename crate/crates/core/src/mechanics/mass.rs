//! Consistent and lumped mass operators and the force projection.

use crate::error::{IfedError, Result};
use crate::linalg::{conjugate_gradient, CgSettings, CsrMatrix, Vec2};
use crate::mesh::StructuralMesh;
use crate::quadrature::{MeshQuadrature, QuadratureFamily, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassKind {
    Consistent,
    Lumped,
}

/// Scalar mass operator applied identically to both vector components.
#[derive(Debug, Clone)]
pub enum MassOperator {
    Consistent {
        matrix: CsrMatrix,
        diag: Vec<f64>,
        settings: CgSettings,
    },
    Lumped {
        diag: Vec<f64>,
    },
}

/// Default CG controls for consistent mass solves. Tight enough that the
/// projected force reproduces `1ᵀL` far below the conservation tolerance.
pub fn default_mass_settings() -> CgSettings {
    CgSettings {
        rel_tol: 1e-13,
        abs_tol: 0.0,
        max_iter: 10_000,
    }
}

impl MassOperator {
    /// `M_ij = Σ_q φ_i(X_q) φ_j(X_q) w_q` over an element-based rule.
    pub fn consistent(mesh: &StructuralMesh, rule: &MeshQuadrature) -> Result<Self> {
        let kind = mesh.kind();
        let npe = kind.node_count();
        let mut trip = Vec::with_capacity(rule.len() * npe * npe);
        let mut phi = vec![0.0; npe];
        for p in &rule.points {
            let Site::Element { element, xi } = p.site else {
                return Err(IfedError::Unsupported("consistent mass needs an element-based rule".into()));
            };
            kind.shape_values(xi, &mut phi);
            let el = mesh.element(element);
            for i in 0..npe {
                for j in 0..npe {
                    trip.push((el[i], el[j], phi[i] * phi[j] * p.weight));
                }
            }
        }
        let matrix = CsrMatrix::from_triplets(mesh.node_count(), trip);
        let diag = matrix.diagonal();
        Ok(Self::Consistent {
            matrix,
            diag,
            settings: default_mass_settings(),
        })
    }

    /// `D = diag(w̃_q)` from a nodal rule.
    pub fn lumped(rule: &MeshQuadrature) -> Result<Self> {
        if rule.family != QuadratureFamily::Nodal {
            return Err(IfedError::Unsupported("lumped mass needs the nodal rule".into()));
        }
        let mut diag = vec![0.0; rule.len()];
        for p in &rule.points {
            let Site::Node(n) = p.site else { unreachable!() };
            diag[n] = p.weight;
        }
        Self::from_diagonal(diag)
    }

    /// An arbitrary strictly positive diagonal.
    pub fn from_diagonal(diag: Vec<f64>) -> Result<Self> {
        if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
            return Err(IfedError::Unsupported(format!("lumped mass entry {i} is {}", diag[i])));
        }
        Ok(Self::Lumped { diag })
    }

    pub fn kind(&self) -> MassKind {
        match self {
            Self::Consistent { .. } => MassKind::Consistent,
            Self::Lumped { .. } => MassKind::Lumped,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Self::Consistent { matrix, .. } => matrix.n,
            Self::Lumped { diag } => diag.len(),
        }
    }

    pub fn with_settings(mut self, new: CgSettings) -> Self {
        if let Self::Consistent { settings, .. } = &mut self {
            *settings = new;
        }
        self
    }

    /// `y = M x` per component.
    pub fn apply(&self, x: &[Vec2]) -> Vec<Vec2> {
        match self {
            Self::Lumped { diag } => x.iter().zip(diag).map(|(v, d)| [v[0] * d, v[1] * d]).collect(),
            Self::Consistent { matrix, .. } => {
                let mut out = vec![[0.0; 2]; x.len()];
                let mut y = vec![0.0; x.len()];
                for c in 0..2 {
                    let xc: Vec<f64> = x.iter().map(|v| v[c]).collect();
                    matrix.mul(&xc, &mut y);
                    for (o, v) in out.iter_mut().zip(&y) {
                        o[c] = *v;
                    }
                }
                out
            }
        }
    }

    /// Row sums `M 1`.
    pub fn row_sums(&self) -> Vec<f64> {
        match self {
            Self::Lumped { diag } => diag.clone(),
            Self::Consistent { matrix, .. } => matrix.row_sums(),
        }
    }

    /// Solves `M x = rhs`, returning the solution and the CG iteration count
    /// (zero for the lumped operator).
    pub fn solve(&self, rhs: &[Vec2]) -> Result<(Vec<Vec2>, usize)> {
        match self {
            Self::Lumped { diag } => Ok((
                rhs.iter().zip(diag).map(|(v, d)| [v[0] / d, v[1] / d]).collect(),
                0,
            )),
            Self::Consistent {
                matrix,
                diag,
                settings,
            } => {
                let n = rhs.len();
                let mut out = vec![[0.0; 2]; n];
                let mut iterations = 0;
                for c in 0..2 {
                    let b: Vec<f64> = rhs.iter().map(|v| v[c]).collect();
                    let mut x: Vec<f64> = b.iter().zip(diag).map(|(b, d)| b / d).collect();
                    let outcome = conjugate_gradient(
                        "consistent mass CG",
                        |v, y| matrix.mul(v, y),
                        |r, z| {
                            for i in 0..r.len() {
                                z[i] = r[i] / diag[i];
                            }
                        },
                        &b,
                        &mut x,
                        *settings,
                    )?;
                    iterations += outcome.iterations;
                    for (o, v) in out.iter_mut().zip(x) {
                        o[c] = v;
                    }
                }
                Ok((out, iterations))
            }
        }
    }
}

/// Force coefficients `F` with `M F = L` (or `D F = L`).
pub fn project_force(load: &[Vec2], mass: &MassOperator) -> Result<Vec<Vec2>> {
    mass.solve(load).map(|(f, _)| f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::ElementKind;
    use crate::quadrature::{consistent_rule, nodal_rule, NodalWeights};

    fn unit_triangle() -> StructuralMesh {
        StructuralMesh::new(
            ElementKind::P1,
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![vec![0, 1, 2]],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn p1_consistent_mass_matches_analytic() {
        let m = unit_triangle();
        let MassOperator::Consistent { matrix, .. } = MassOperator::consistent(&m, &consistent_rule(&m).unwrap()).unwrap() else {
            panic!()
        };
        for i in 0..3 {
            for j in 0..3 {
                let exact = if i == j { 2.0 / 24.0 } else { 1.0 / 24.0 };
                assert!((matrix.get(i, j) - exact).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn p1_lumped_mass_is_area_thirds() {
        let m = unit_triangle();
        let d = MassOperator::lumped(&nodal_rule(&m, NodalWeights::default()).unwrap()).unwrap();
        assert!(d.row_sums().iter().all(|&v| (v - 1.0 / 6.0).abs() < 1e-15));
    }

    #[test]
    fn lumped_equals_consistent_row_sums_for_p1_and_q1() {
        for kind in [ElementKind::P1, ElementKind::Q1] {
            let m = StructuralMesh::block([0.0, 0.0], 1.0, 2.0, 3, 4, kind).unwrap();
            let c = MassOperator::consistent(&m, &consistent_rule(&m).unwrap()).unwrap();
            let l = MassOperator::lumped(&nodal_rule(&m, NodalWeights::default()).unwrap()).unwrap();
            for (a, b) in c.row_sums().iter().zip(l.row_sums()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn consistent_solve_roundtrip() {
        let m = StructuralMesh::block([0.0, 0.0], 1.0, 1.0, 4, 4, ElementKind::Q2).unwrap();
        let mass = MassOperator::consistent(&m, &consistent_rule(&m).unwrap()).unwrap();
        let x: Vec<Vec2> = (0..m.node_count()).map(|i| [(i as f64).sin(), 1.0]).collect();
        let b = mass.apply(&x);
        let (y, iters) = mass.solve(&b).unwrap();
        assert!(iters > 0);
        for (a, b) in x.iter().zip(&y) {
            assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn trivial_projections() {
        let m = StructuralMesh::block([0.0, 0.0], 1.0, 1.0, 2, 2, ElementKind::P2).unwrap();
        let zero = vec![[0.0; 2]; m.node_count()];
        let c = MassOperator::consistent(&m, &consistent_rule(&m).unwrap()).unwrap();
        assert_eq!(project_force(&zero, &c).unwrap(), zero);
        let id = MassOperator::from_diagonal(vec![1.0; m.node_count()]).unwrap();
        let l: Vec<Vec2> = (0..m.node_count()).map(|i| [i as f64, -0.5]).collect();
        assert_eq!(project_force(&l, &id).unwrap(), l);
        assert!(MassOperator::from_diagonal(vec![1.0, 0.0]).is_err());
    }
}
