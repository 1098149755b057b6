//! Pressure Poisson solver: conjugate gradients preconditioned by a fast
//! cosine/sine transform diagonalization of the same operator.

use std::f64::consts::PI;
use std::sync::Arc;

use rustdct::{DctPlanner, TransformType2And3, TransformType4};

use super::boundary::{Boundaries, Side};
use super::MacGrid;
use crate::error::Result;
use crate::linalg::{conjugate_gradient, CgOutcome, CgSettings};

/// Boundary pair along one axis: `N` Neumann (velocity wall), `D` Dirichlet
/// (traction wall), low side first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AxisKind {
    NN,
    DD,
    ND,
    DN,
}

impl AxisKind {
    fn new(lo_dirichlet: bool, hi_dirichlet: bool) -> Self {
        match (lo_dirichlet, hi_dirichlet) {
            (false, false) => Self::NN,
            (true, true) => Self::DD,
            (false, true) => Self::ND,
            (true, false) => Self::DN,
        }
    }

    fn lo_dirichlet(self) -> bool {
        matches!(self, Self::DD | Self::DN)
    }

    fn hi_dirichlet(self) -> bool {
        matches!(self, Self::DD | Self::ND)
    }

    /// Eigenvalues of the unscaled 1D operator, matching the transform
    /// ordering.
    fn eigenvalues(self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| {
                let theta = match self {
                    Self::NN => PI * k as f64 / n as f64,
                    Self::DD => PI * (k + 1) as f64 / n as f64,
                    Self::ND | Self::DN => PI * (k as f64 + 0.5) / n as f64,
                };
                2.0 - 2.0 * theta.cos()
            })
            .collect()
    }
}

#[derive(Clone)]
enum Plan {
    Type23(Arc<dyn TransformType2And3<f64>>),
    Type4(Arc<dyn TransformType4<f64>>),
}

#[derive(Clone)]
struct AxisTransform {
    kind: AxisKind,
    n: usize,
    plan: Plan,
}

impl AxisTransform {
    fn new(planner: &mut DctPlanner<f64>, kind: AxisKind, n: usize) -> Self {
        let plan = match kind {
            AxisKind::NN | AxisKind::DD => Plan::Type23(planner.plan_dct2(n)),
            AxisKind::ND | AxisKind::DN => Plan::Type4(planner.plan_dct4(n)),
        };
        Self { kind, n, plan }
    }

    fn forward(&self, buf: &mut [f64]) {
        match (&self.plan, self.kind) {
            (Plan::Type23(p), AxisKind::NN) => p.process_dct2(buf),
            (Plan::Type23(p), AxisKind::DD) => p.process_dst2(buf),
            (Plan::Type4(p), AxisKind::ND) => p.process_dct4(buf),
            (Plan::Type4(p), AxisKind::DN) => p.process_dst4(buf),
            _ => unreachable!(),
        }
    }

    fn inverse(&self, buf: &mut [f64]) {
        match (&self.plan, self.kind) {
            (Plan::Type23(p), AxisKind::NN) => p.process_dct3(buf),
            (Plan::Type23(p), AxisKind::DD) => p.process_dst3(buf),
            (Plan::Type4(p), AxisKind::ND) => p.process_dct4(buf),
            (Plan::Type4(p), AxisKind::DN) => p.process_dst4(buf),
            _ => unreachable!(),
        }
        let s = 2.0 / self.n as f64;
        buf.iter_mut().for_each(|v| *v *= s);
    }
}

/// Solves `A φ = b` with `A = −D G` on cell centers: homogeneous Neumann at
/// velocity walls and half-cell homogeneous Dirichlet at traction walls.
#[derive(Clone)]
pub struct PoissonSolver {
    nx: usize,
    ny: usize,
    inv_dx2: f64,
    x: AxisTransform,
    y: AxisTransform,
    lambda_x: Vec<f64>,
    lambda_y: Vec<f64>,
    pub settings: CgSettings,
}

impl PoissonSolver {
    pub fn new(grid: &MacGrid, bcs: &Boundaries) -> Self {
        let d = |s: Side| bcs.pressure_value(s).is_some();
        let kx = AxisKind::new(d(Side::Left), d(Side::Right));
        let ky = AxisKind::new(d(Side::Bottom), d(Side::Top));
        let mut planner = DctPlanner::new();
        Self {
            nx: grid.nx,
            ny: grid.ny,
            inv_dx2: 1.0 / (grid.dx * grid.dx),
            x: AxisTransform::new(&mut planner, kx, grid.nx),
            y: AxisTransform::new(&mut planner, ky, grid.ny),
            lambda_x: kx.eigenvalues(grid.nx),
            lambda_y: ky.eigenvalues(grid.ny),
            settings: CgSettings {
                rel_tol: 1e-12,
                abs_tol: 1e-13,
                max_iter: 200,
            },
        }
    }

    /// True when `A` has the constant null space.
    pub fn is_singular(&self) -> bool {
        self.x.kind == AxisKind::NN && self.y.kind == AxisKind::NN
    }

    /// `y = A φ`.
    pub fn apply(&self, phi: &[f64], out: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        for j in 0..ny {
            for i in 0..nx {
                let c = phi[j * nx + i];
                let mut s = 0.0;
                if i > 0 {
                    s += c - phi[j * nx + i - 1];
                } else if self.x.kind.lo_dirichlet() {
                    s += 2.0 * c;
                }
                if i + 1 < nx {
                    s += c - phi[j * nx + i + 1];
                } else if self.x.kind.hi_dirichlet() {
                    s += 2.0 * c;
                }
                if j > 0 {
                    s += c - phi[(j - 1) * nx + i];
                } else if self.y.kind.lo_dirichlet() {
                    s += 2.0 * c;
                }
                if j + 1 < ny {
                    s += c - phi[(j + 1) * nx + i];
                } else if self.y.kind.hi_dirichlet() {
                    s += 2.0 * c;
                }
                out[j * nx + i] = s * self.inv_dx2;
            }
        }
    }

    /// Exact inverse of `A` via separable transforms (pseudo-inverse on the
    /// mean-free subspace when singular).
    pub fn apply_inverse(&self, b: &[f64], out: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        out.copy_from_slice(b);
        for row in out.chunks_mut(nx) {
            self.x.forward(row);
        }
        let mut col = vec![0.0; ny];
        for i in 0..nx {
            for j in 0..ny {
                col[j] = out[j * nx + i];
            }
            self.y.forward(&mut col);
            for j in 0..ny {
                let lam = (self.lambda_x[i] + self.lambda_y[j]) * self.inv_dx2;
                col[j] = if lam > 1e-12 * self.inv_dx2 { col[j] / lam } else { 0.0 };
            }
            self.y.inverse(&mut col);
            for j in 0..ny {
                out[j * nx + i] = col[j];
            }
        }
        for row in out.chunks_mut(nx) {
            self.x.inverse(row);
        }
    }

    /// Solves `A φ = b`; for the singular operator the mean of `b` is removed
    /// first and the returned `φ` has zero mean.
    pub fn solve(&self, b: &[f64], phi: &mut [f64]) -> Result<CgOutcome> {
        let mut rhs = b.to_vec();
        let singular = self.is_singular();
        if singular {
            remove_mean(&mut rhs);
        }
        phi.fill(0.0);
        let out = conjugate_gradient(
            "pressure Poisson CG",
            |x, y| self.apply(x, y),
            |r, z| {
                self.apply_inverse(r, z);
                if singular {
                    remove_mean(z);
                }
            },
            &rhs,
            phi,
            self.settings,
        )?;
        if singular {
            remove_mean(phi);
        }
        Ok(out)
    }
}

fn remove_mean(v: &mut [f64]) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
}
