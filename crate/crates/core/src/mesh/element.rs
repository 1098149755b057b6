//! Reference elements and their nodal Lagrange shape functions.
//!
//! Triangles live on the unit right triangle `{ξ ≥ 0, η ≥ 0, ξ + η ≤ 1}`,
//! quadrilaterals on `[-1, 1]²`. Node ordering is vertices first
//! (counter-clockwise), then edge midpoints in edge order, then the Q2 center.
//! Side `s` of an element joins vertex `s` and vertex `s + 1` (cyclically).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::IfedError;
use crate::linalg::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    P1,
    P2,
    Q1,
    Q2,
}

impl ElementKind {
    pub const ALL: [ElementKind; 4] = [Self::P1, Self::Q1, Self::P2, Self::Q2];

    pub fn node_count(self) -> usize {
        match self {
            Self::P1 => 3,
            Self::P2 => 6,
            Self::Q1 => 4,
            Self::Q2 => 9,
        }
    }

    pub fn vertex_count(self) -> usize {
        if self.is_triangle() {
            3
        } else {
            4
        }
    }

    pub fn is_triangle(self) -> bool {
        matches!(self, Self::P1 | Self::P2)
    }

    /// Polynomial degree along an edge (1 linear, 2 quadratic).
    pub fn degree(self) -> usize {
        match self {
            Self::P1 | Self::Q1 => 1,
            Self::P2 | Self::Q2 => 2,
        }
    }

    /// Element factor used in the mesh factor: nodes of quadratic elements
    /// sit roughly half an element apart.
    pub fn element_factor(self) -> f64 {
        self.degree() as f64
    }

    /// The linear element with the same shape.
    pub fn linear(self) -> Self {
        if self.is_triangle() {
            Self::P1
        } else {
            Self::Q1
        }
    }

    /// Area of the reference domain.
    pub fn reference_area(self) -> f64 {
        if self.is_triangle() {
            0.5
        } else {
            4.0
        }
    }

    pub fn reference_nodes(self) -> &'static [Vec2] {
        match self {
            Self::P1 => &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            Self::P2 => &[
                [0.0, 0.0],
                [1.0, 0.0],
                [0.0, 1.0],
                [0.5, 0.0],
                [0.5, 0.5],
                [0.0, 0.5],
            ],
            Self::Q1 => &[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
            Self::Q2 => &[
                [-1.0, -1.0],
                [1.0, -1.0],
                [1.0, 1.0],
                [-1.0, 1.0],
                [0.0, -1.0],
                [1.0, 0.0],
                [0.0, 1.0],
                [-1.0, 0.0],
                [0.0, 0.0],
            ],
        }
    }

    /// Local node indices on side `s`, ordered start vertex, end vertex,
    /// then the midpoint for quadratic elements.
    pub fn side_nodes(self, side: usize) -> Vec<usize> {
        let nv = self.vertex_count();
        assert!(side < nv, "side {side} out of range for {self}");
        let mut nodes = vec![side, (side + 1) % nv];
        if self.degree() == 2 {
            nodes.push(nv + side);
        }
        nodes
    }

    /// Reference-space parametrization of side `s` for `t ∈ [0, 1]`,
    /// returned as (point, d point / dt).
    pub fn side_point(self, side: usize, t: f64) -> (Vec2, Vec2) {
        let refs = self.reference_nodes();
        let nv = self.vertex_count();
        let a = refs[side];
        let b = refs[(side + 1) % nv];
        (
            [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])],
            [b[0] - a[0], b[1] - a[1]],
        )
    }

    /// True when `xi` lies in the closed reference domain (with slack `tol`).
    pub fn contains(self, xi: Vec2, tol: f64) -> bool {
        if self.is_triangle() {
            xi[0] >= -tol && xi[1] >= -tol && xi[0] + xi[1] <= 1.0 + tol
        } else {
            xi[0].abs() <= 1.0 + tol && xi[1].abs() <= 1.0 + tol
        }
    }

    /// Value of shape function `i` at reference point `xi`.
    ///
    /// # Panics
    /// Panics if `i >= node_count()`.
    pub fn shape_value(self, i: usize, xi: Vec2) -> f64 {
        assert!(i < self.node_count(), "basis index {i} out of range for {self}");
        let [x, y] = xi;
        match self {
            Self::P1 => [1.0 - x - y, x, y][i],
            Self::P2 => {
                let l = [1.0 - x - y, x, y];
                match i {
                    0..=2 => l[i] * (2.0 * l[i] - 1.0),
                    3 => 4.0 * l[0] * l[1],
                    4 => 4.0 * l[1] * l[2],
                    _ => 4.0 * l[2] * l[0],
                }
            }
            Self::Q1 => {
                let n = Self::Q1.reference_nodes()[i];
                0.25 * (1.0 + n[0] * x) * (1.0 + n[1] * y)
            }
            Self::Q2 => {
                let n = Self::Q2.reference_nodes()[i];
                lagrange3(n[0], x) * lagrange3(n[1], y)
            }
        }
    }

    /// Reference-space gradient of shape function `i` at `xi`.
    ///
    /// # Panics
    /// Panics if `i >= node_count()`.
    pub fn shape_gradient(self, i: usize, xi: Vec2) -> Vec2 {
        assert!(i < self.node_count(), "basis index {i} out of range for {self}");
        let [x, y] = xi;
        match self {
            Self::P1 => [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]][i],
            Self::P2 => {
                let l = [1.0 - x - y, x, y];
                let dl: [Vec2; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
                let (a, b) = match i {
                    0..=2 => {
                        let s = 4.0 * l[i] - 1.0;
                        return [s * dl[i][0], s * dl[i][1]];
                    }
                    3 => (0, 1),
                    4 => (1, 2),
                    _ => (2, 0),
                };
                [
                    4.0 * (dl[a][0] * l[b] + l[a] * dl[b][0]),
                    4.0 * (dl[a][1] * l[b] + l[a] * dl[b][1]),
                ]
            }
            Self::Q1 => {
                let n = Self::Q1.reference_nodes()[i];
                [
                    0.25 * n[0] * (1.0 + n[1] * y),
                    0.25 * (1.0 + n[0] * x) * n[1],
                ]
            }
            Self::Q2 => {
                let n = Self::Q2.reference_nodes()[i];
                [
                    dlagrange3(n[0], x) * lagrange3(n[1], y),
                    lagrange3(n[0], x) * dlagrange3(n[1], y),
                ]
            }
        }
    }

    /// All shape values at `xi`, written into `out`.
    pub fn shape_values(self, xi: Vec2, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.node_count()) {
            *o = self.shape_value(i, xi);
        }
    }

    pub fn shape_gradients(self, xi: Vec2, out: &mut [Vec2]) {
        for (i, o) in out.iter_mut().enumerate().take(self.node_count()) {
            *o = self.shape_gradient(i, xi);
        }
    }
}

/// 1D quadratic Lagrange polynomial on nodes {-1, 0, 1}, for the node at `node`.
fn lagrange3(node: f64, x: f64) -> f64 {
    if node < -0.5 {
        0.5 * x * (x - 1.0)
    } else if node > 0.5 {
        0.5 * x * (x + 1.0)
    } else {
        1.0 - x * x
    }
}

fn dlagrange3(node: f64, x: f64) -> f64 {
    if node < -0.5 {
        x - 0.5
    } else if node > 0.5 {
        x + 0.5
    } else {
        -2.0 * x
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::P1 => "p1",
            Self::P2 => "p2",
            Self::Q1 => "q1",
            Self::Q2 => "q2",
        })
    }
}

impl FromStr for ElementKind {
    type Err = IfedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "p1" => Ok(Self::P1),
            "p2" => Ok(Self::P2),
            "q1" => Ok(Self::Q1),
            "q2" => Ok(Self::Q2),
            other => Err(IfedError::Parse(format!("unknown element kind `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(kind: ElementKind, rng: &mut ChaCha8Rng) -> Vec2 {
        loop {
            let p = if kind.is_triangle() {
                [rng.gen::<f64>(), rng.gen::<f64>()]
            } else {
                [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
            };
            if kind.contains(p, 0.0) {
                return p;
            }
        }
    }

    #[test]
    fn p1_vertex_and_barycenter() {
        assert_eq!(ElementKind::P1.shape_value(0, [0.0, 0.0]), 1.0);
        for i in 0..3 {
            let v = ElementKind::P1.shape_value(i, [1.0 / 3.0, 1.0 / 3.0]);
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(ElementKind::P1.shape_gradient(0, [0.2, 0.3]), [-1.0, -1.0]);
    }

    #[test]
    fn q1_center_is_quarter() {
        for i in 0..4 {
            assert_eq!(ElementKind::Q1.shape_value(i, [0.0, 0.0]), 0.25);
        }
    }

    #[test]
    fn kronecker_property() {
        for kind in ElementKind::ALL {
            for (j, &node) in kind.reference_nodes().iter().enumerate() {
                for i in 0..kind.node_count() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (kind.shape_value(i, node) - expected).abs() <= 1e-14,
                        "{kind} phi_{i}(node {j})"
                    );
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_and_zero_gradient_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in ElementKind::ALL {
            for _ in 0..100 {
                let xi = random_point(kind, &mut rng);
                let s: f64 = (0..kind.node_count()).map(|i| kind.shape_value(i, xi)).sum();
                assert!((s - 1.0).abs() <= 1e-14);
                let g = (0..kind.node_count()).fold([0.0, 0.0], |acc, i| {
                    let gi = kind.shape_gradient(i, xi);
                    [acc[0] + gi[0], acc[1] + gi[1]]
                });
                assert!(g[0].hypot(g[1]) <= 1e-12);
            }
        }
    }

    #[test]
    fn gradients_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-6;
        for kind in ElementKind::ALL {
            for _ in 0..50 {
                // keep the stencil inside the element
                let xi = loop {
                    let p = random_point(kind, &mut rng);
                    if kind.contains([p[0] - h, p[1] - h], 0.0)
                        && kind.contains([p[0] + h, p[1] + h], 0.0)
                    {
                        break p;
                    }
                };
                for i in 0..kind.node_count() {
                    let g = kind.shape_gradient(i, xi);
                    let fx = (kind.shape_value(i, [xi[0] + h, xi[1]])
                        - kind.shape_value(i, [xi[0] - h, xi[1]]))
                        / (2.0 * h);
                    let fy = (kind.shape_value(i, [xi[0], xi[1] + h])
                        - kind.shape_value(i, [xi[0], xi[1] - h]))
                        / (2.0 * h);
                    assert!((g[0] - fx).abs() < 1e-6 && (g[1] - fy).abs() < 1e-6, "{kind} {i}");
                }
            }
        }
    }

    #[test]
    fn p2_vertex_gradient_at_vertex() {
        // φ0 = λ0(2λ0 - 1) with λ0 = 1 - ξ - η; at the vertex λ0 = 1 so ∇φ0 = 3∇λ0.
        assert_eq!(ElementKind::P2.shape_gradient(0, [0.0, 0.0]), [-3.0, -3.0]);
        assert_eq!(ElementKind::P2.shape_gradient(1, [1.0, 0.0]), [3.0, 0.0]);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn out_of_range_basis_index_panics() {
        ElementKind::P1.shape_value(3, [0.0, 0.0]);
    }
}
