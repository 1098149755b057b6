//! Load vectors: internal elastic forces, tethers, and surface tractions.

use serde::{Deserialize, Serialize};

use super::field::{deformation_gradient_from, reference_gradients};
use super::material::Material;
use crate::error::{IfedError, Result};
use crate::linalg::{Mat2, Vec2};
use crate::mesh::StructuralMesh;
use crate::quadrature::{gauss_legendre, MeshQuadrature, Site};

/// Shape values and reference-configuration gradients tabulated at the
/// points of an element-based quadrature rule.
#[derive(Debug, Clone)]
pub struct PointTable {
    npe: usize,
    pub elements: Vec<usize>,
    pub positions: Vec<Vec2>,
    pub weights: Vec<f64>,
    values: Vec<f64>,
    grads: Vec<Vec2>,
}

impl PointTable {
    pub fn new(mesh: &StructuralMesh, rule: &MeshQuadrature) -> Result<Self> {
        let kind = mesh.kind();
        let npe = kind.node_count();
        let mut t = Self {
            npe,
            elements: Vec::with_capacity(rule.len()),
            positions: Vec::with_capacity(rule.len()),
            weights: Vec::with_capacity(rule.len()),
            values: Vec::with_capacity(rule.len() * npe),
            grads: Vec::with_capacity(rule.len() * npe),
        };
        for p in &rule.points {
            let Site::Element { element, xi } = p.site else {
                return Err(IfedError::Unsupported("point table needs an element-based rule".into()));
            };
            let (g, _) = reference_gradients(mesh, element, xi)?;
            t.elements.push(element);
            t.positions.push(p.position);
            t.weights.push(p.weight);
            t.grads.extend(g);
            t.values.extend((0..npe).map(|i| kind.shape_value(i, xi)));
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn values(&self, q: usize) -> &[f64] {
        &self.values[q * self.npe..(q + 1) * self.npe]
    }

    pub fn gradients(&self, q: usize) -> &[Vec2] {
        &self.grads[q * self.npe..(q + 1) * self.npe]
    }

    /// Value of a nodal field at point `q`.
    pub fn sample(&self, mesh: &StructuralMesh, q: usize, field: &[Vec2]) -> Vec2 {
        let mut v = [0.0; 2];
        for (phi, &n) in self.values(q).iter().zip(mesh.element(self.elements[q])) {
            v[0] += phi * field[n][0];
            v[1] += phi * field[n][1];
        }
        v
    }

    pub fn deformation_gradient(&self, mesh: &StructuralMesh, q: usize, chi: &[Vec2]) -> Mat2 {
        deformation_gradient_from(self.gradients(q), mesh.element(self.elements[q]), chi)
    }
}

/// `L_i = −Σ_q P(X_q) : ∇_X φ_i(X_q) w_q` for a stress supplied per point as
/// `stress(element, X_q, F_q)`.
pub fn stress_load<S>(mesh: &StructuralMesh, table: &PointTable, chi: &[Vec2], mut stress: S) -> Result<Vec<Vec2>>
where
    S: FnMut(usize, Vec2, &Mat2) -> Result<Mat2>,
{
    let mut load = vec![[0.0; 2]; mesh.node_count()];
    for q in 0..table.len() {
        let e = table.elements[q];
        let f = table.deformation_gradient(mesh, q, chi);
        let p = stress(e, table.positions[q], &f)?;
        let w = table.weights[q];
        for (g, &n) in table.gradients(q).iter().zip(mesh.element(e)) {
            load[n][0] -= (p[0][0] * g[0] + p[0][1] * g[1]) * w;
            load[n][1] -= (p[1][0] * g[0] + p[1][1] * g[1]) * w;
        }
    }
    Ok(load)
}

/// Internal elastic force of `material` at configuration `chi`.
pub fn material_load(mesh: &StructuralMesh, table: &PointTable, chi: &[Vec2], material: &Material) -> Result<Vec<Vec2>> {
    if material.is_rigid() {
        return Ok(vec![[0.0; 2]; mesh.node_count()]);
    }
    stress_load(mesh, table, chi, |e, _, f| material.pk1(f, e))
}

/// `L_i = Σ_q b(X_q, χ_q, U_q) φ_i(X_q) w_q`.
pub fn body_load<B>(mesh: &StructuralMesh, table: &PointTable, chi: &[Vec2], vel: &[Vec2], mut body: B) -> Vec<Vec2>
where
    B: FnMut(Vec2, Vec2, Vec2) -> Vec2,
{
    let mut load = vec![[0.0; 2]; mesh.node_count()];
    for q in 0..table.len() {
        let e = table.elements[q];
        let b = body(table.positions[q], table.sample(mesh, q, chi), table.sample(mesh, q, vel));
        let w = table.weights[q];
        for (phi, &n) in table.values(q).iter().zip(mesh.element(e)) {
            load[n][0] += b[0] * phi * w;
            load[n][1] += b[1] * phi * w;
        }
    }
    load
}

/// Adds `∫ t(X, χ, U, N) · φ_i dA` over boundary facets with `marker` whose
/// reference midpoint satisfies `select`. `N` is the outward reference normal.
pub fn add_surface_load<T, F>(
    mesh: &StructuralMesh,
    marker: u32,
    chi: &[Vec2],
    vel: &[Vec2],
    load: &mut [Vec2],
    mut select: F,
    mut traction: T,
) where
    T: FnMut(Vec2, Vec2, Vec2, Vec2) -> Vec2,
    F: FnMut(Vec2) -> bool,
{
    let kind = mesh.kind();
    let (gx, gw) = gauss_legendre(kind.degree() + 2);
    let mut phi = vec![0.0; kind.node_count()];
    for facet in mesh.facets_with_marker(marker) {
        let e = facet.element;
        let (mid, _) = kind.side_point(facet.side, 0.5);
        if !select(mesh.map_to_physical(e, mid)) {
            continue;
        }
        let el = mesh.element(e);
        for (s, w) in gx.iter().zip(&gw) {
            let t = 0.5 * (s + 1.0);
            let (xi, dxi) = kind.side_point(facet.side, t);
            let j = mesh.jacobian(e, xi);
            let tan = [j[0][0] * dxi[0] + j[0][1] * dxi[1], j[1][0] * dxi[0] + j[1][1] * dxi[1]];
            let len = tan[0].hypot(tan[1]);
            let normal = [tan[1] / len, -tan[0] / len];
            kind.shape_values(xi, &mut phi);
            let tr = traction(
                mesh.map_to_physical(e, xi),
                mesh.map_with(chi, e, xi),
                mesh.map_with(vel, e, xi),
                normal,
            );
            let ds = 0.5 * w * len;
            for (p, &n) in phi.iter().zip(el) {
                load[n][0] += tr[0] * p * ds;
                load[n][1] += tr[1] * p * ds;
            }
        }
    }
}

/// Spring–damper penalty `κ (X − χ) − η U` on the masked components, with
/// the reference configuration as the target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tether {
    pub kappa: f64,
    pub eta: f64,
    #[serde(default = "both_components")]
    pub mask: [bool; 2],
}

fn both_components() -> [bool; 2] {
    [true, true]
}

impl Tether {
    pub fn force(&self, target: Vec2, chi: Vec2, vel: Vec2) -> Vec2 {
        let mut f = [0.0; 2];
        for c in 0..2 {
            if self.mask[c] {
                f[c] = self.kappa * (target[c] - chi[c]) - self.eta * vel[c];
            }
        }
        f
    }
}

/// Dead-load traction per unit reference length on facets with `marker`,
/// optionally restricted to facets whose midpoint `x` lies in `x_range`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Traction {
    pub marker: u32,
    pub value: Vec2,
    #[serde(default)]
    pub x_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceTether {
    pub marker: u32,
    #[serde(flatten)]
    pub tether: Tether,
}

/// Everything that contributes to the structural load vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadModel {
    pub material: Material,
    #[serde(default)]
    pub body_tether: Option<Tether>,
    #[serde(default)]
    pub surface_tethers: Vec<SurfaceTether>,
    #[serde(default)]
    pub tractions: Vec<Traction>,
}

impl LoadModel {
    pub fn new(material: Material) -> Self {
        Self {
            material,
            body_tether: None,
            surface_tethers: Vec::new(),
            tractions: Vec::new(),
        }
    }

    /// Total load at configuration `chi` and velocity `vel`, with tractions
    /// scaled by `load_factor`.
    pub fn assemble(
        &self,
        mesh: &StructuralMesh,
        table: &PointTable,
        chi: &[Vec2],
        vel: &[Vec2],
        load_factor: f64,
    ) -> Result<Vec<Vec2>> {
        let mut load = material_load(mesh, table, chi, &self.material)?;
        if let Some(t) = &self.body_tether {
            let b = body_load(mesh, table, chi, vel, |x, c, u| t.force(x, c, u));
            for (l, v) in load.iter_mut().zip(b) {
                l[0] += v[0];
                l[1] += v[1];
            }
        }
        for st in &self.surface_tethers {
            add_surface_load(mesh, st.marker, chi, vel, &mut load, |_| true, |x, c, u, _| st.tether.force(x, c, u));
        }
        if load_factor != 0.0 {
            for tr in &self.tractions {
                let value = [tr.value[0] * load_factor, tr.value[1] * load_factor];
                let range = tr.x_range;
                add_surface_load(
                    mesh,
                    tr.marker,
                    chi,
                    vel,
                    &mut load,
                    |x| range.is_none_or(|r| x[0] >= r[0] && x[0] <= r[1]),
                    |_, _, _, _| value,
                );
            }
        }
        Ok(load)
    }
}

/// Strain energy `Σ_q Ψ(F_q) w_q`.
pub fn strain_energy(mesh: &StructuralMesh, table: &PointTable, chi: &[Vec2], material: &Material) -> f64 {
    (0..table.len())
        .map(|q| material.energy(&table.deformation_gradient(mesh, q, chi)) * table.weights[q])
        .sum()
}

/// Euclidean pairing `Σ_i L_i · v_i` of two nodal vectors.
pub fn load_dot(load: &[Vec2], v: &[Vec2]) -> f64 {
    load.iter().zip(v).map(|(l, v)| l[0] * v[0] + l[1] * v[1]).sum()
}
