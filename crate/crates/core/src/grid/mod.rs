//! Uniform marker-and-cell grid, staggered fields, and the incompressible
//! Navier–Stokes solver.

mod boundary;
mod navier_stokes;
mod operators;
mod poisson;
mod snapshot;

pub use boundary::{BoundaryCondition, Boundaries, Side, VelocityProfile};
pub use navier_stokes::{FluidParams, FluidSolver, FluidStats};
pub use operators::{divergence, gradient, kinetic_energy};
pub use poisson::PoissonSolver;
pub use snapshot::{read_snapshot_binary, read_snapshot_text, write_snapshot_binary, write_snapshot_text, Snapshot};

use crate::linalg::Vec2;

/// Uniform grid of square cells with `nx × ny` cells and lower-left corner
/// `origin`.
///
/// The x-velocity lives on faces `(i, j)` at `(i Δx, (j + ½) Δx)` for
/// `0 ≤ i ≤ nx`, the y-velocity on faces at `((i + ½) Δx, j Δx)` for
/// `0 ≤ j ≤ ny`, pressure at cell centers. All arrays are row-major with `i`
/// fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacGrid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub origin: Vec2,
}

impl MacGrid {
    pub fn new(nx: usize, ny: usize, dx: f64, origin: Vec2) -> Self {
        assert!(nx >= 2 && ny >= 2 && dx > 0.0, "grid needs at least 2×2 cells");
        Self { nx, ny, dx, origin }
    }

    /// Grid covering `[x0, x0 + nx Δx] × [y0, y0 + ny Δx]`.
    pub fn covering(width: f64, height: f64, cells_per_unit: f64, origin: Vec2) -> Self {
        let nx = (width * cells_per_unit).round() as usize;
        let ny = (height * cells_per_unit).round() as usize;
        Self::new(nx, ny, width / nx as f64, origin)
    }

    pub fn u_len(&self) -> usize {
        (self.nx + 1) * self.ny
    }

    pub fn v_len(&self) -> usize {
        self.nx * (self.ny + 1)
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn u_index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn v_index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn u_position(&self, i: usize, j: usize) -> Vec2 {
        [
            self.origin[0] + i as f64 * self.dx,
            self.origin[1] + (j as f64 + 0.5) * self.dx,
        ]
    }

    pub fn v_position(&self, i: usize, j: usize) -> Vec2 {
        [
            self.origin[0] + (i as f64 + 0.5) * self.dx,
            self.origin[1] + j as f64 * self.dx,
        ]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Vec2 {
        [
            self.origin[0] + (i as f64 + 0.5) * self.dx,
            self.origin[1] + (j as f64 + 0.5) * self.dx,
        ]
    }

    pub fn width(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn height(&self) -> f64 {
        self.ny as f64 * self.dx
    }

    /// Face position for component `d` (0 = x-faces, 1 = y-faces).
    pub fn face_position(&self, d: usize, i: usize, j: usize) -> Vec2 {
        if d == 0 {
            self.u_position(i, j)
        } else {
            self.v_position(i, j)
        }
    }

    /// `(columns, rows)` of component `d`'s face array.
    pub fn face_dims(&self, d: usize) -> (usize, usize) {
        if d == 0 {
            (self.nx + 1, self.ny)
        } else {
            (self.nx, self.ny + 1)
        }
    }
}

/// Face-centered vector field (velocity or force density).
#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredField {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl StaggeredField {
    pub fn zeros(grid: &MacGrid) -> Self {
        Self {
            u: vec![0.0; grid.u_len()],
            v: vec![0.0; grid.v_len()],
        }
    }

    /// Samples `f` at face centers.
    pub fn from_fn(grid: &MacGrid, f: impl Fn(Vec2) -> Vec2) -> Self {
        let mut s = Self::zeros(grid);
        for j in 0..grid.ny {
            for i in 0..=grid.nx {
                s.u[grid.u_index(i, j)] = f(grid.u_position(i, j))[0];
            }
        }
        for j in 0..=grid.ny {
            for i in 0..grid.nx {
                s.v[grid.v_index(i, j)] = f(grid.v_position(i, j))[1];
            }
        }
        s
    }

    pub fn component(&self, d: usize) -> &[f64] {
        if d == 0 {
            &self.u
        } else {
            &self.v
        }
    }

    pub fn component_mut(&mut self, d: usize) -> &mut [f64] {
        if d == 0 {
            &mut self.u
        } else {
            &mut self.v
        }
    }

    /// `Σ_faces a · b` over both components.
    pub fn dot(&self, other: &Self) -> f64 {
        crate::linalg::dot(&self.u, &other.u) + crate::linalg::dot(&self.v, &other.v)
    }

    pub fn max_abs(&self) -> f64 {
        self.u.iter().chain(&self.v).fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }

    pub fn fill(&mut self, value: f64) {
        self.u.fill(value);
        self.v.fill(value);
    }

    pub fn axpy(&mut self, a: f64, x: &Self) {
        for (y, x) in self.u.iter_mut().zip(&x.u) {
            *y += a * x;
        }
        for (y, x) in self.v.iter_mut().zip(&x.v) {
            *y += a * x;
        }
    }
}

/// Cell-centered scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    pub data: Vec<f64>,
}

impl CellField {
    pub fn zeros(grid: &MacGrid) -> Self {
        Self {
            data: vec![0.0; grid.cell_count()],
        }
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}
