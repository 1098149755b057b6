//! Regularized delta kernels, force spreading, velocity interpolation and
//! velocity projection for the nodal and elemental coupling schemes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{IfedError, Result};
use crate::grid::{MacGrid, StaggeredField};
use crate::linalg::Vec2;
use crate::mechanics::{MassKind, MassOperator, PointTable};
use crate::mesh::StructuralMesh;
use crate::quadrature::{adaptive_rule, AdaptiveSettings, MeshQuadrature, QuadratureFamily, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// Two-point hat `max(0, 1 − |r|)`.
    PiecewiseLinear,
    /// Three-point quadratic B-spline.
    #[serde(rename = "bspline3")]
    BSpline3,
}

impl Kernel {
    pub const ALL: [Kernel; 2] = [Kernel::PiecewiseLinear, Kernel::BSpline3];

    /// Support radius in cells.
    pub fn radius(self) -> f64 {
        match self {
            Kernel::PiecewiseLinear => 1.0,
            Kernel::BSpline3 => 1.5,
        }
    }

    /// 1D kernel `φ(r)` with `r` in cell units.
    pub fn phi(self, r: f64) -> f64 {
        let a = r.abs();
        match self {
            Kernel::PiecewiseLinear => (1.0 - a).max(0.0),
            Kernel::BSpline3 => {
                if a <= 0.5 {
                    0.75 - a * a
                } else if a < 1.5 {
                    0.5 * (1.5 - a) * (1.5 - a)
                } else {
                    0.0
                }
            }
        }
    }

    /// `δ_h(v) = φ(v₁/Δx) φ(v₂/Δx) / Δx²`.
    pub fn delta2(self, v: Vec2, dx: f64) -> f64 {
        self.phi(v[0] / dx) * self.phi(v[1] / dx) / (dx * dx)
    }

    /// Discrete zeroth and first moments `Σ_i φ(i − s)` and
    /// `Σ_i (i − s) φ(i − s)` over lattice points within `radius` of `s`.
    pub fn moments(self, s: f64, radius: f64) -> (f64, f64) {
        let lo = (s - radius).floor() as i64;
        let hi = (s + radius).ceil() as i64;
        let (mut m0, mut m1) = (0.0, 0.0);
        for i in lo..=hi {
            let r = i as f64 - s;
            if r.abs() < radius {
                let w = self.phi(r);
                m0 += w;
                m1 += r * w;
            }
        }
        (m0, m1)
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::PiecewiseLinear => "piecewise_linear",
            Kernel::BSpline3 => "bspline3",
        })
    }
}

impl FromStr for Kernel {
    type Err = IfedError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "piecewise_linear" | "linear" | "hat" => Ok(Kernel::PiecewiseLinear),
            "bspline3" | "bs3" => Ok(Kernel::BSpline3),
            _ => Err(IfedError::Parse(format!("unknown kernel '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Nodal,
    Elemental,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Nodal, Scheme::Elemental];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Nodal => "nodal",
            Scheme::Elemental => "elemental",
        })
    }
}

impl FromStr for Scheme {
    type Err = IfedError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nodal" => Ok(Scheme::Nodal),
            "elemental" => Ok(Scheme::Elemental),
            _ => Err(IfedError::Parse(format!("unknown scheme '{s}'"))),
        }
    }
}

/// What to do with kernel stencils that reach past the interior faces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StencilPolicy {
    /// Report [`IfedError::OutOfDomain`].
    #[default]
    Strict,
    /// Drop the missing stencil entries.
    Truncate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    pub scheme: Scheme,
    pub kernel: Kernel,
    #[serde(default)]
    pub adaptive: AdaptiveSettings,
    #[serde(default)]
    pub stencil: StencilPolicy,
}

impl CouplingConfig {
    pub fn new(scheme: Scheme, kernel: Kernel) -> Self {
        Self {
            scheme,
            kernel,
            adaptive: AdaptiveSettings::default(),
            stencil: StencilPolicy::Strict,
        }
    }
}

/// `M_FAC = ΔX / (E_FAC Δx)`.
pub fn mesh_factor(mesh: &StructuralMesh, dx: f64) -> f64 {
    mesh.longest_edge() / (mesh.kind().element_factor() * dx)
}

/// Stencil of one face component around a point: first index and weights
/// along each axis.
struct Stencil {
    i0: isize,
    j0: isize,
    wx: [f64; 4],
    wy: [f64; 4],
    nx: usize,
    ny: usize,
}

fn axis_weights(kernel: Kernel, s: f64) -> (isize, [f64; 4], usize) {
    let r = kernel.radius();
    let lo = (s - r).floor() as isize + 1;
    let mut w = [0.0; 4];
    let mut n = 0;
    for (k, slot) in w.iter_mut().enumerate() {
        let i = lo + k as isize;
        let rr = i as f64 - s;
        if rr.abs() >= r {
            break;
        }
        *slot = kernel.phi(rr);
        n = k + 1;
    }
    (lo, w, n)
}

/// Index ranges of interior faces for component `d`; boundary-normal faces
/// are excluded.
fn interior_range(grid: &MacGrid, d: usize) -> ([isize; 2], [isize; 2]) {
    if d == 0 {
        ([1, grid.nx as isize - 1], [0, grid.ny as isize - 1])
    } else {
        ([0, grid.nx as isize - 1], [1, grid.ny as isize - 1])
    }
}

fn stencil(grid: &MacGrid, kernel: Kernel, x: Vec2, d: usize) -> Stencil {
    let sx = (x[0] - grid.origin[0]) / grid.dx - if d == 0 { 0.0 } else { 0.5 };
    let sy = (x[1] - grid.origin[1]) / grid.dx - if d == 1 { 0.0 } else { 0.5 };
    let (i0, wx, nx) = axis_weights(kernel, sx);
    let (j0, wy, ny) = axis_weights(kernel, sy);
    Stencil { i0, j0, wx, wy, nx, ny }
}

/// Calls `visit(face_index, weight)` for every stencil entry with nonzero
/// weight, where `weight = φφ` (no `1/Δx²`).
fn for_each_face(
    grid: &MacGrid,
    kernel: Kernel,
    policy: StencilPolicy,
    point: usize,
    x: Vec2,
    d: usize,
    mut visit: impl FnMut(usize, f64),
) -> Result<()> {
    if !(x[0].is_finite() && x[1].is_finite()) {
        return Err(IfedError::OutOfDomain { index: point, x: x[0], y: x[1] });
    }
    let st = stencil(grid, kernel, x, d);
    let ([ilo, ihi], [jlo, jhi]) = interior_range(grid, d);
    let (w, _) = grid.face_dims(d);
    for b in 0..st.ny {
        let j = st.j0 + b as isize;
        for a in 0..st.nx {
            let i = st.i0 + a as isize;
            let wt = st.wx[a] * st.wy[b];
            if wt == 0.0 {
                continue;
            }
            if i < ilo || i > ihi || j < jlo || j > jhi {
                match policy {
                    StencilPolicy::Strict => return Err(IfedError::OutOfDomain { index: point, x: x[0], y: x[1] }),
                    StencilPolicy::Truncate => continue,
                }
            }
            visit(j as usize * w + i as usize, wt);
        }
    }
    Ok(())
}

/// `f(x_face) = Σ_k G_k δ_h(x_face − X_k)` for point forces `G_k` at `X_k`.
pub fn spread(grid: &MacGrid, kernel: Kernel, policy: StencilPolicy, points: &[Vec2], values: &[Vec2]) -> Result<StaggeredField> {
    let mut f = StaggeredField::zeros(grid);
    let inv = 1.0 / (grid.dx * grid.dx);
    for (k, (x, g)) in points.iter().zip(values).enumerate() {
        for d in 0..2 {
            let comp = f.component_mut(d);
            let gd = g[d] * inv;
            for_each_face(grid, kernel, policy, k, *x, d, |idx, w| comp[idx] += gd * w)?;
        }
    }
    Ok(f)
}

/// `U(X_k) = Σ_faces u δ_h(x_face − X_k) Δx²`.
pub fn interpolate(grid: &MacGrid, kernel: Kernel, policy: StencilPolicy, u: &StaggeredField, points: &[Vec2]) -> Result<Vec<Vec2>> {
    let mut out = vec![[0.0; 2]; points.len()];
    for (k, x) in points.iter().enumerate() {
        for d in 0..2 {
            let comp = u.component(d);
            let mut s = 0.0;
            for_each_face(grid, kernel, policy, k, *x, d, |idx, w| s += comp[idx] * w)?;
            out[k][d] = s;
        }
    }
    Ok(out)
}

/// Interaction points of one structural configuration.
#[derive(Debug, Clone)]
pub struct Interaction {
    pub rule: MeshQuadrature,
    /// Tabulated shape data; `None` for nodal rules.
    pub table: Option<PointTable>,
    /// Deformed positions `χ_h(X_q)`.
    pub positions: Vec<Vec2>,
}

impl Interaction {
    /// Points of an arbitrary rule at configuration `chi`.
    pub fn from_rule(mesh: &StructuralMesh, rule: MeshQuadrature, chi: &[Vec2]) -> Result<Self> {
        let nodal = rule.points.iter().all(|p| matches!(p.site, Site::Node(_)));
        let table = if nodal { None } else { Some(PointTable::new(mesh, &rule)?) };
        let positions = match &table {
            Some(t) => (0..t.len()).map(|q| t.sample(mesh, q, chi)).collect(),
            None => rule.sample(mesh, chi),
        };
        Ok(Self { rule, table, positions })
    }

    /// Mesh nodes at their deformed positions.
    pub fn nodal(mesh: &StructuralMesh, nodal_rule: &MeshQuadrature, chi: &[Vec2]) -> Result<Self> {
        Self::from_rule(mesh, nodal_rule.clone(), chi)
    }

    /// Deformation-adaptive Gauss points for `chi`.
    pub fn adaptive(mesh: &StructuralMesh, chi: &[Vec2], dx: f64, settings: &AdaptiveSettings) -> Result<Self> {
        Self::from_rule(mesh, adaptive_rule(mesh, chi, dx, settings)?, chi)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Values of a nodal field at the interaction points.
    pub fn sample(&self, mesh: &StructuralMesh, field: &[Vec2]) -> Vec<Vec2> {
        match &self.table {
            Some(t) => (0..t.len()).map(|q| t.sample(mesh, q, field)).collect(),
            None => self.rule.sample(mesh, field),
        }
    }

    fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.rule.points.iter().map(|p| p.weight)
    }
}

/// Elemental spreading of a force density field `F` (nodal coefficients):
/// `f = Σ_q F(X_q) δ_h(x − χ(X_q)) w_q`.
pub fn spread_density(
    grid: &MacGrid,
    kernel: Kernel,
    policy: StencilPolicy,
    mesh: &StructuralMesh,
    points: &Interaction,
    force: &[Vec2],
) -> Result<StaggeredField> {
    let values: Vec<Vec2> = points
        .sample(mesh, force)
        .into_iter()
        .zip(points.weights())
        .map(|(f, w)| [f[0] * w, f[1] * w])
        .collect();
    spread(grid, kernel, policy, &points.positions, &values)
}

/// Nodal spreading of the load vector `L̃` itself at the deformed nodes.
pub fn spread_load(grid: &MacGrid, kernel: Kernel, policy: StencilPolicy, chi: &[Vec2], load: &[Vec2]) -> Result<StaggeredField> {
    spread(grid, kernel, policy, chi, load)
}

/// Projects interpolated velocities onto the FE space. A nodal rule paired
/// with a lumped mass returns `U^IB` unchanged; otherwise solves
/// `M U = L^IB` with `L^IB_i = Σ_q φ_i(X_q) U^IB(X_q) w_q`.
///
/// Returns the nodal velocity and the number of mass-solve iterations.
pub fn project_velocity(
    mesh: &StructuralMesh,
    points: &Interaction,
    u_ib: &[Vec2],
    mass: &MassOperator,
) -> Result<(Vec<Vec2>, usize)> {
    if points.table.is_none() && mass.kind() == MassKind::Lumped {
        let mut u = vec![[0.0; 2]; mesh.node_count()];
        for (p, v) in points.rule.points.iter().zip(u_ib) {
            if let Site::Node(n) = p.site {
                u[n] = *v;
            }
        }
        return Ok((u, 0));
    }
    let rhs = velocity_load(mesh, points, u_ib);
    mass.solve(&rhs)
}

/// `L^IB_i = Σ_q φ_i(X_q) U^IB(X_q) w_q`.
pub fn velocity_load(mesh: &StructuralMesh, points: &Interaction, u_ib: &[Vec2]) -> Vec<Vec2> {
    let mut rhs = vec![[0.0; 2]; mesh.node_count()];
    match &points.table {
        Some(t) => {
            for q in 0..t.len() {
                let w = t.weights[q];
                for (phi, &n) in t.values(q).iter().zip(mesh.element(t.elements[q])) {
                    rhs[n][0] += phi * u_ib[q][0] * w;
                    rhs[n][1] += phi * u_ib[q][1] * w;
                }
            }
        }
        None => {
            for (p, v) in points.rule.points.iter().zip(u_ib) {
                if let Site::Node(n) = p.site {
                    rhs[n][0] += v[0] * p.weight;
                    rhs[n][1] += v[1] * p.weight;
                }
            }
        }
    }
    rhs
}

/// Grid sums `Σ Δx² f` and `Σ Δx² (f¹x¹ + f²x²)`.
pub fn grid_moments(grid: &MacGrid, f: &StaggeredField) -> (Vec2, f64) {
    let a = grid.dx * grid.dx;
    let mut total = [0.0; 2];
    let mut first = 0.0;
    for j in 0..grid.ny {
        for i in 0..=grid.nx {
            let v = f.u[grid.u_index(i, j)];
            total[0] += v * a;
            first += v * grid.u_position(i, j)[0] * a;
        }
    }
    for j in 0..=grid.ny {
        for i in 0..grid.nx {
            let v = f.v[grid.v_index(i, j)];
            total[1] += v * a;
            first += v * grid.v_position(i, j)[1] * a;
        }
    }
    (total, first)
}

/// Whether an interaction rule belongs to the elemental family.
pub fn is_adaptive(points: &Interaction) -> bool {
    points.rule.family == QuadratureFamily::Adaptive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::ElementKind;
    use crate::quadrature::{nodal_rule, NodalWeights};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_values() {
        let h = Kernel::PiecewiseLinear;
        assert_eq!(h.phi(0.0), 1.0);
        assert_eq!(h.phi(1.0), 0.0);
        assert_eq!(h.phi(-0.25), 0.75);
        let b = Kernel::BSpline3;
        assert_eq!(b.phi(0.0), 0.75);
        assert_eq!(b.phi(1.0), 0.125);
        assert_eq!(b.phi(-0.5), 0.5);
        assert_eq!(b.phi(1.5), 0.0);
        assert!((b.delta2([0.0, 0.0], 0.5) - 0.5625 * 4.0).abs() < 1e-15);
    }

    #[test]
    fn moments_hold_at_random_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in Kernel::ALL {
            for _ in 0..64 {
                let s: f64 = rng.gen_range(-3.0..3.0);
                let (m0, m1) = k.moments(s, k.radius());
                assert!((m0 - 1.0).abs() < 1e-13);
                assert!(m1.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn single_point_on_face_center() {
        let g = MacGrid::new(8, 8, 0.25, [0.0, 0.0]);
        let x = g.u_position(4, 4);
        let f = spread(&g, Kernel::PiecewiseLinear, StencilPolicy::Strict, &[x], &[[1.0, 0.0]]).unwrap();
        let nz: Vec<usize> = (0..f.u.len()).filter(|&k| f.u[k] != 0.0).collect();
        assert_eq!(nz, vec![g.u_index(4, 4)]);
        assert!((f.u[g.u_index(4, 4)] - 16.0).abs() < 1e-13);
        let (total, _) = grid_moments(&g, &f);
        assert!((total[0] - 1.0).abs() < 1e-14 && total[1].abs() < 1e-14);
    }

    #[test]
    fn interpolation_reproduces_linear_fields() {
        let g = MacGrid::new(16, 16, 1.0 / 16.0, [0.0, 0.0]);
        let u = StaggeredField::from_fn(&g, |x| [0.3 + 2.0 * x[0] - x[1], -1.0 + 0.5 * x[0] + 3.0 * x[1]]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts: Vec<Vec2> = (0..50).map(|_| [rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7)]).collect();
        for k in Kernel::ALL {
            let v = interpolate(&g, k, StencilPolicy::Strict, &u, &pts).unwrap();
            for (x, v) in pts.iter().zip(&v) {
                assert!((v[0] - (0.3 + 2.0 * x[0] - x[1])).abs() < 1e-12);
                assert!((v[1] - (-1.0 + 0.5 * x[0] + 3.0 * x[1])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stencils_near_walls_are_rejected_or_truncated() {
        let g = MacGrid::new(8, 8, 0.125, [0.0, 0.0]);
        let x = [0.05, 0.5];
        let err = spread(&g, Kernel::BSpline3, StencilPolicy::Strict, &[x], &[[1.0, 1.0]]);
        assert!(matches!(err, Err(IfedError::OutOfDomain { index: 0, .. })));
        let f = spread(&g, Kernel::BSpline3, StencilPolicy::Truncate, &[x], &[[1.0, 1.0]]).unwrap();
        let (total, _) = grid_moments(&g, &f);
        assert!(total[0] < 1.0 && total[0] > 0.0);
    }

    #[test]
    fn nodal_projection_is_sampling() {
        let mesh = StructuralMesh::block([0.3, 0.3], 0.4, 0.4, 3, 3, ElementKind::P2).unwrap();
        let g = MacGrid::new(16, 16, 1.0 / 16.0, [0.0, 0.0]);
        let u = StaggeredField::from_fn(&g, |x| [x[1].sin(), x[0] * x[0]]);
        let rule = nodal_rule(&mesh, NodalWeights::CompositeTrapezoid).unwrap();
        let mass = MassOperator::lumped(&rule).unwrap();
        let chi = mesh.nodes().to_vec();
        let pts = Interaction::nodal(&mesh, &rule, &chi).unwrap();
        let uib = interpolate(&g, Kernel::BSpline3, StencilPolicy::Strict, &u, &pts.positions).unwrap();
        let (proj, its) = project_velocity(&mesh, &pts, &uib, &mass).unwrap();
        let direct = interpolate(&g, Kernel::BSpline3, StencilPolicy::Strict, &u, &chi).unwrap();
        assert_eq!(its, 0);
        assert_eq!(proj, direct);
    }
}
