//! Mesh-global quadrature rules: consistent and higher-order Gauss rules,
//! deformation-adaptive rules, and nodal (lumping) rules.

use crate::error::{IfedError, Result};
use crate::linalg::{det, Vec2};
use crate::mesh::{ElementKind, StructuralMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureFamily {
    Consistent,
    HigherOrder,
    Adaptive,
    Nodal,
}

/// Where a quadrature point lives: inside an element at reference
/// coordinates, or exactly at a mesh node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Site {
    Element { element: usize, xi: Vec2 },
    Node(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub site: Site,
    /// Location in the reference configuration.
    pub position: Vec2,
    /// Weight in reference-configuration area.
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct MeshQuadrature {
    pub family: QuadratureFamily,
    pub points: Vec<QuadPoint>,
}

impl MeshQuadrature {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }

    /// Values of a nodal field (one 2-vector per node) at every point.
    pub fn sample(&self, mesh: &StructuralMesh, field: &[Vec2]) -> Vec<Vec2> {
        self.points
            .iter()
            .map(|p| match p.site {
                Site::Node(n) => field[n],
                Site::Element { element, xi } => mesh.map_with(field, element, xi),
            })
            .collect()
    }
}

/// Weights and points on a reference element.
#[derive(Debug, Clone)]
pub struct ReferenceRule {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one point");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn triangle_rule(degree: usize) -> Result<ReferenceRule> {
    let sym3 = |a: f64, b: f64| [[a, a], [b, a], [a, b]];
    let (points, weights): (Vec<Vec2>, Vec<f64>) = match degree {
        0 | 1 => (vec![[1.0 / 3.0, 1.0 / 3.0]], vec![0.5]),
        2 => (sym3(1.0 / 6.0, 2.0 / 3.0).to_vec(), vec![1.0 / 6.0; 3]),
        3 | 4 => {
            let (a, wa) = (0.445_948_490_915_964_9, 0.223_381_589_678_011_47);
            let (b, wb) = (0.091_576_213_509_770_74, 0.109_951_743_655_321_87);
            let mut p = sym3(a, 1.0 - 2.0 * a).to_vec();
            p.extend(sym3(b, 1.0 - 2.0 * b));
            (p, vec![wa / 2.0, wa / 2.0, wa / 2.0, wb / 2.0, wb / 2.0, wb / 2.0])
        }
        5 => {
            let (a, wa) = (0.470_142_064_105_115_1, 0.132_394_152_788_506_2);
            let (b, wb) = (0.101_286_507_323_456_34, 0.125_939_180_544_827_14);
            let mut p = vec![[1.0 / 3.0, 1.0 / 3.0]];
            p.extend(sym3(a, 1.0 - 2.0 * a));
            p.extend(sym3(b, 1.0 - 2.0 * b));
            let mut w = vec![0.225 / 2.0];
            w.extend([wa / 2.0; 3]);
            w.extend([wb / 2.0; 3]);
            (p, w)
        }
        d => {
            return Err(IfedError::Unsupported(format!(
                "no triangle Gauss rule of degree {d} (maximum 5)"
            )))
        }
    };
    Ok(ReferenceRule { points, weights })
}

fn quad_tensor_rule(n: usize) -> ReferenceRule {
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            points.push([x[i], x[j]]);
            weights.push(w[i] * w[j]);
        }
    }
    ReferenceRule { points, weights }
}

/// Gauss rule on the reference element exact for polynomials of total
/// degree `degree` (per-direction degree for quadrilaterals).
pub fn reference_gauss_rule(kind: ElementKind, degree: usize) -> Result<ReferenceRule> {
    if kind.is_triangle() {
        triangle_rule(degree)
    } else {
        let n = degree / 2 + 1;
        if n > 64 {
            return Err(IfedError::Unsupported(format!("quadrilateral Gauss rule of degree {degree}")));
        }
        Ok(quad_tensor_rule(n))
    }
}

/// Degree integrating every mass-matrix product `φ_i φ_j` exactly on affine
/// elements.
pub fn consistent_degree(kind: ElementKind) -> usize {
    2 * kind.degree()
}

/// Points per direction of the consistent rule, used by the adaptive
/// spacing estimate.
fn base_points_per_direction(kind: ElementKind) -> usize {
    kind.degree() + 1
}

/// Splits the reference triangle into `k²` congruent sub-triangles and
/// copies `base` into each.
fn composite_triangle_rule(base: &ReferenceRule, k: usize) -> ReferenceRule {
    let h = 1.0 / k as f64;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut push = |o: Vec2, e1: Vec2, e2: Vec2| {
        for (p, &w) in base.points.iter().zip(&base.weights) {
            points.push([o[0] + p[0] * e1[0] + p[1] * e2[0], o[1] + p[0] * e1[1] + p[1] * e2[1]]);
            weights.push(w * h * h);
        }
    };
    for j in 0..k {
        for i in 0..k - j {
            let o = [i as f64 * h, j as f64 * h];
            push(o, [h, 0.0], [0.0, h]);
            if i + j + 1 < k {
                push([o[0] + h, o[1]], [0.0, h], [-h, h]);
            }
        }
    }
    ReferenceRule { points, weights }
}

fn push_element(mesh: &StructuralMesh, e: usize, rule: &ReferenceRule, out: &mut Vec<QuadPoint>) -> Result<()> {
    for (xi, &w) in rule.points.iter().zip(&rule.weights) {
        let d = det(&mesh.jacobian(e, *xi));
        if d <= 0.0 {
            return Err(IfedError::DegenerateElement { element: e, det: d });
        }
        out.push(QuadPoint {
            site: Site::Element { element: e, xi: *xi },
            position: mesh.map_to_physical(e, *xi),
            weight: w * d,
        });
    }
    Ok(())
}

/// Gauss rule of the given degree on every element, concatenated.
pub fn gauss_rule(mesh: &StructuralMesh, degree: usize, family: QuadratureFamily) -> Result<MeshQuadrature> {
    let rule = reference_gauss_rule(mesh.kind(), degree)?;
    let mut points = Vec::with_capacity(rule.points.len() * mesh.element_count());
    for e in 0..mesh.element_count() {
        push_element(mesh, e, &rule, &mut points)?;
    }
    Ok(MeshQuadrature { family, points })
}

/// The rule that makes the consistent mass matrix exact.
pub fn consistent_rule(mesh: &StructuralMesh) -> Result<MeshQuadrature> {
    gauss_rule(mesh, consistent_degree(mesh.kind()), QuadratureFamily::Consistent)
}

/// The rule used for load vectors.
pub fn higher_order_rule(mesh: &StructuralMesh) -> Result<MeshQuadrature> {
    gauss_rule(mesh, consistent_degree(mesh.kind()), QuadratureFamily::HigherOrder)
}

/// How nodal weights of quadratic elements are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodalWeights {
    /// Trapezoid rule on the linear sub-elements spanned by the quadratic
    /// element's nodes. Always positive.
    #[default]
    CompositeTrapezoid,
    /// `∫ φ_q` of the quadratic basis. May be zero or negative, in which case
    /// the weight falls back to 1.
    BasisIntegral,
}

/// `∫ φ_i` for each node of a linear element with the given vertices.
fn linear_node_integrals(kind: ElementKind, verts: &[Vec2]) -> Vec<f64> {
    if kind.is_triangle() {
        let a = 0.5
            * ((verts[1][0] - verts[0][0]) * (verts[2][1] - verts[0][1])
                - (verts[2][0] - verts[0][0]) * (verts[1][1] - verts[0][1]));
        vec![a / 3.0; 3]
    } else {
        let rule = quad_tensor_rule(2);
        let mut out = vec![0.0; 4];
        for (xi, &w) in rule.points.iter().zip(&rule.weights) {
            let mut j = [[0.0; 2]; 2];
            for (v, p) in verts.iter().enumerate() {
                let g = ElementKind::Q1.shape_gradient(v, *xi);
                for a in 0..2 {
                    for b in 0..2 {
                        j[a][b] += p[a] * g[b];
                    }
                }
            }
            let d = det(&j);
            for (i, o) in out.iter_mut().enumerate() {
                *o += ElementKind::Q1.shape_value(i, *xi) * w * d;
            }
        }
        out
    }
}

/// Local sub-element connectivity of the composite trapezoid rule.
fn linear_subelements(kind: ElementKind) -> &'static [&'static [usize]] {
    match kind {
        ElementKind::P1 => &[&[0, 1, 2]],
        ElementKind::Q1 => &[&[0, 1, 2, 3]],
        ElementKind::P2 => &[&[0, 3, 5], &[3, 1, 4], &[5, 4, 2], &[3, 4, 5]],
        ElementKind::Q2 => &[&[0, 4, 8, 7], &[4, 1, 5, 8], &[8, 5, 2, 6], &[7, 8, 6, 3]],
    }
}

/// Raw nodal weights before the positivity fallback.
pub fn nodal_weights_raw(mesh: &StructuralMesh, mode: NodalWeights) -> Result<Vec<f64>> {
    let mut w = vec![0.0; mesh.node_count()];
    let kind = mesh.kind();
    if kind.degree() == 1 || mode == NodalWeights::BasisIntegral {
        let rule = reference_gauss_rule(kind, consistent_degree(kind))?;
        for e in 0..mesh.element_count() {
            let el = mesh.element(e);
            for (xi, &wq) in rule.points.iter().zip(&rule.weights) {
                let d = det(&mesh.jacobian(e, *xi));
                for (i, &n) in el.iter().enumerate() {
                    w[n] += kind.shape_value(i, *xi) * wq * d;
                }
            }
        }
    } else {
        for e in 0..mesh.element_count() {
            let el = mesh.element(e);
            for sub in linear_subelements(kind) {
                let verts: Vec<Vec2> = sub.iter().map(|&l| mesh.nodes()[el[l]]).collect();
                for (&l, wi) in sub.iter().zip(linear_node_integrals(kind.linear(), &verts)) {
                    w[el[l]] += wi;
                }
            }
        }
    }
    Ok(w)
}

/// One point per node with weight `w̃_q`: the nodal weight, or 1 where that
/// weight is not positive (up to round-off relative to the mean weight).
pub fn nodal_rule(mesh: &StructuralMesh, mode: NodalWeights) -> Result<MeshQuadrature> {
    let raw = nodal_weights_raw(mesh, mode)?;
    let mean = raw.iter().map(|w| w.abs()).sum::<f64>() / raw.len().max(1) as f64;
    let floor = 1e-12 * mean;
    let points = raw
        .iter()
        .enumerate()
        .map(|(n, &w)| QuadPoint {
            site: Site::Node(n),
            position: mesh.nodes()[n],
            weight: if w > floor { w } else { 1.0 },
        })
        .collect();
    Ok(MeshQuadrature {
        family: QuadratureFamily::Nodal,
        points,
    })
}

/// Controls for [`adaptive_rule`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct AdaptiveSettings {
    /// Target deformed point spacing in units of the grid spacing.
    pub c_a: f64,
    /// Largest allowed refinement factor per direction.
    pub max_refinement: usize,
}

impl Default for AdaptiveSettings {
    fn default() -> Self {
        Self {
            c_a: 0.5,
            max_refinement: 64,
        }
    }
}

/// Length scale of element `e` under the deformation `chi`: longest deformed
/// edge (measured through the midpoint node on quadratic elements), and for
/// quadrilaterals also the diagonals divided by √2.
pub fn deformed_element_size(mesh: &StructuralMesh, chi: &[Vec2], e: usize) -> f64 {
    let kind = mesh.kind();
    let el = mesh.element(e);
    let nv = kind.vertex_count();
    let dist = |a: Vec2, b: Vec2| (a[0] - b[0]).hypot(a[1] - b[1]);
    let mut size: f64 = 0.0;
    for s in 0..nv {
        let (a, b) = (chi[el[s]], chi[el[(s + 1) % nv]]);
        let len = if kind.degree() == 2 {
            let m = chi[el[nv + s]];
            dist(a, m) + dist(m, b)
        } else {
            dist(a, b)
        };
        size = size.max(len);
    }
    if nv == 4 {
        let diag = dist(chi[el[0]], chi[el[2]]).max(dist(chi[el[1]], chi[el[3]]));
        size = size.max(diag / std::f64::consts::SQRT_2);
    }
    size
}

/// Refinement factor needed so that the deformed point spacing of element
/// `e` is at most `c_a · dx`.
pub fn adaptive_refinement(mesh: &StructuralMesh, chi: &[Vec2], e: usize, dx: f64, settings: &AdaptiveSettings) -> Result<usize> {
    let ppd = base_points_per_direction(mesh.kind()) as f64;
    let size = deformed_element_size(mesh, chi, e);
    let k = (size / (ppd * settings.c_a * dx)).ceil().max(1.0);
    if !k.is_finite() || k > settings.max_refinement as f64 {
        return Err(IfedError::RefinementCap {
            element: e,
            needed: if k.is_finite() { k as usize } else { usize::MAX },
            cap: settings.max_refinement,
        });
    }
    Ok(k as usize)
}

/// Per-element Gauss rules refined until the deformed point spacing is at
/// most `c_a · dx`. Never coarser than the consistent rule.
pub fn adaptive_rule(mesh: &StructuralMesh, chi: &[Vec2], dx: f64, settings: &AdaptiveSettings) -> Result<MeshQuadrature> {
    let kind = mesh.kind();
    let base = reference_gauss_rule(kind, consistent_degree(kind))?;
    let mut cache: Vec<Option<ReferenceRule>> = Vec::new();
    let mut points = Vec::new();
    for e in 0..mesh.element_count() {
        let k = adaptive_refinement(mesh, chi, e, dx, settings)?;
        if cache.len() < k {
            cache.resize(k, None);
        }
        let rule = cache[k - 1].get_or_insert_with(|| {
            if kind.is_triangle() {
                composite_triangle_rule(&base, k)
            } else {
                quad_tensor_rule(k * base_points_per_direction(kind))
            }
        });
        push_element(mesh, e, rule, &mut points)?;
    }
    Ok(MeshQuadrature {
        family: QuadratureFamily::Adaptive,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_triangle(kind: ElementKind) -> StructuralMesh {
        let mut nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        if kind == ElementKind::P2 {
            nodes.extend([[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]]);
        }
        let el = (0..nodes.len()).collect();
        StructuralMesh::new(kind, nodes, vec![el], vec![]).unwrap()
    }

    fn integrate(rule: &ReferenceRule, f: impl Fn(Vec2) -> f64) -> f64 {
        rule.points.iter().zip(&rule.weights).map(|(p, w)| f(*p) * w).sum()
    }

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for n in 1..=8 {
            let (x, w) = gauss_legendre(n);
            for k in 0..2 * n {
                let exact = if k % 2 == 0 { 2.0 / (k + 1) as f64 } else { 0.0 };
                let q: f64 = x.iter().zip(&w).map(|(x, w)| x.powi(k as i32) * w).sum();
                assert!((q - exact).abs() < 1e-14, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn one_point_triangle_rule() {
        let m = unit_triangle(ElementKind::P1);
        let q = gauss_rule(&m, 1, QuadratureFamily::Consistent).unwrap();
        assert_eq!(q.len(), 1);
        assert!((q.total_weight() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quad_2x2_integrates_x2y2() {
        let r = reference_gauss_rule(ElementKind::Q1, 2).unwrap();
        let v = integrate(&r, |p| p[0] * p[0] * p[1] * p[1]);
        assert!((v - 4.0 / 9.0).abs() < 1e-15);
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn triangle_rules_exact_to_degree() {
        // ∫ x^a y^b over the unit triangle = a! b! / (a + b + 2)!
        for degree in 1..=5 {
            let r = triangle_rule(degree).unwrap();
            assert!(r.weights.iter().all(|&w| w > 0.0));
            for a in 0..=degree {
                for b in 0..=degree - a {
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    let q = integrate(&r, |p| p[0].powi(a as i32) * p[1].powi(b as i32));
                    assert!((q - exact).abs() < 1e-15, "deg {degree}: x^{a} y^{b}");
                }
            }
        }
        assert!(matches!(triangle_rule(9), Err(IfedError::Unsupported(_))));
    }

    #[test]
    fn composite_rule_keeps_exactness() {
        let base = triangle_rule(2).unwrap();
        for k in 1..5 {
            let r = composite_triangle_rule(&base, k);
            assert_eq!(r.points.len(), 3 * k * k);
            let q = integrate(&r, |p| p[0] * p[1]);
            assert!((q - 1.0 / 24.0).abs() < 1e-15);
            assert!(r.points.iter().all(|&p| ElementKind::P1.contains(p, 1e-14)));
        }
    }

    #[test]
    fn consistent_mass_entries_exact() {
        for kind in ElementKind::ALL {
            let r = reference_gauss_rule(kind, consistent_degree(kind)).unwrap();
            let fine = reference_gauss_rule(kind, if kind.is_triangle() { 5 } else { 12 }).unwrap();
            let n = kind.node_count();
            for i in 0..n {
                for j in 0..n {
                    let f = |p: Vec2| kind.shape_value(i, p) * kind.shape_value(j, p);
                    let (a, b) = (integrate(&r, f), integrate(&fine, f));
                    assert!((a - b).abs() < 1e-12, "{kind} ({i},{j}): {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn p1_nodal_weights_are_thirds() {
        let m = unit_triangle(ElementKind::P1);
        let q = nodal_rule(&m, NodalWeights::default()).unwrap();
        assert_eq!(q.len(), 3);
        for p in &q.points {
            assert!((p.weight - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn p2_composite_trapezoid_weights() {
        let m = unit_triangle(ElementKind::P2);
        let w = nodal_weights_raw(&m, NodalWeights::CompositeTrapezoid).unwrap();
        for v in 0..3 {
            assert!((w[v] - 0.5 / 12.0).abs() < 1e-15);
        }
        for e in 3..6 {
            assert!((w[e] - 0.5 / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn p2_vertex_basis_integrates_to_zero_and_falls_back() {
        let m = unit_triangle(ElementKind::P2);
        let raw = nodal_weights_raw(&m, NodalWeights::BasisIntegral).unwrap();
        for v in 0..3 {
            assert!(raw[v].abs() < 1e-15);
        }
        let q = nodal_rule(&m, NodalWeights::BasisIntegral).unwrap();
        assert!(q.points.iter().all(|p| p.weight > 0.0));
        assert_eq!(q.points[0].weight, 1.0);
    }

    #[test]
    fn nodal_weights_sum_to_area() {
        for kind in ElementKind::ALL {
            let m = StructuralMesh::block([0.0, 0.0], 2.0, 3.0, 3, 4, kind).unwrap();
            let q = nodal_rule(&m, NodalWeights::default()).unwrap();
            assert!((q.total_weight() - 6.0).abs() < 1e-12, "{kind}");
        }
    }

    #[test]
    fn adaptive_undeformed_small_elements_use_consistent_rule() {
        for kind in ElementKind::ALL {
            let m = StructuralMesh::block([0.0, 0.0], 1.0, 1.0, 4, 4, kind).unwrap();
            let a = adaptive_rule(&m, m.nodes(), 1.0, &AdaptiveSettings::default()).unwrap();
            let c = consistent_rule(&m).unwrap();
            assert_eq!(a.len(), c.len(), "{kind}");
            assert!((a.total_weight() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn adaptive_stretch_refines_proportionally() {
        let m = StructuralMesh::block([0.0, 0.0], 1.0, 1.0, 1, 1, ElementKind::Q1).unwrap();
        let s = AdaptiveSettings::default();
        // the undeformed element sits exactly at the spacing limit
        let dx = 1.0 / (2.0 * s.c_a);
        let k1 = adaptive_refinement(&m, m.nodes(), 0, dx, &s).unwrap();
        let stretched: Vec<Vec2> = m.nodes().iter().map(|p| [4.0 * p[0], p[1]]).collect();
        let k4 = adaptive_refinement(&m, &stretched, 0, dx, &s).unwrap();
        assert!(k4 >= 4 * k1, "{k1} -> {k4}");
    }

    #[test]
    fn adaptive_refinement_cap_reported() {
        let m = StructuralMesh::block([0.0, 0.0], 1.0, 1.0, 1, 1, ElementKind::P1).unwrap();
        let s = AdaptiveSettings {
            c_a: 0.5,
            max_refinement: 4,
        };
        let err = adaptive_rule(&m, m.nodes(), 1e-3, &s);
        assert!(matches!(err, Err(IfedError::RefinementCap { cap: 4, .. })));
    }

    #[test]
    fn adaptive_points_cover_deformed_mesh() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in ElementKind::ALL {
            let m = StructuralMesh::block([0.0, 0.0], 1.0, 1.0, 3, 3, kind).unwrap();
            let deform = |p: Vec2| [p[0] + 0.3 * p[1] * p[1] + 0.5 * p[0] * p[0], 1.6 * p[1] + 0.2 * p[0]];
            let chi: Vec<Vec2> = m.nodes().iter().map(|&p| deform(p)).collect();
            let dx = 0.05;
            let s = AdaptiveSettings::default();
            let q = adaptive_rule(&m, &chi, dx, &s).unwrap();
            let xq = q.sample(&m, &chi);
            for _ in 0..1000 {
                let e = rng.gen_range(0..m.element_count());
                let xi = loop {
                    let p = if kind.is_triangle() {
                        [rng.gen::<f64>(), rng.gen::<f64>()]
                    } else {
                        [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
                    };
                    if kind.contains(p, 0.0) {
                        break p;
                    }
                };
                let x = m.map_with(&chi, e, xi);
                let nearest = xq
                    .iter()
                    .map(|y| (x[0] - y[0]).hypot(x[1] - y[1]))
                    .fold(f64::INFINITY, f64::min);
                assert!(nearest <= 1.05 * s.c_a * dx, "{kind}: {nearest}");
            }
        }
    }
}
