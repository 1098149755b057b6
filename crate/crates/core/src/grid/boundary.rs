//! Physical boundary conditions and ghost-value filling.

use std::fmt;
use std::sync::Arc;

use super::{MacGrid, StaggeredField};
use crate::linalg::Vec2;

/// Prescribed wall velocity as a function of position and time.
pub type VelocityProfile = Arc<dyn Fn(Vec2, f64) -> Vec2 + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryCondition {
    /// Both velocity components prescribed.
    Velocity(VelocityProfile),
    /// Normal traction `−p + 2μ ∂u_n/∂n = −p_ext` with zero tangential
    /// velocity. Realized as a pressure Dirichlet value `p_ext` at the wall.
    NormalTraction { p_ext: f64 },
}

impl BoundaryCondition {
    pub fn no_slip() -> Self {
        Self::Velocity(Arc::new(|_, _| [0.0, 0.0]))
    }

    pub fn velocity(f: impl Fn(Vec2, f64) -> Vec2 + Send + Sync + 'static) -> Self {
        Self::Velocity(Arc::new(f))
    }

    pub fn is_velocity(&self) -> bool {
        matches!(self, Self::Velocity(_))
    }

    /// Wall velocity at `x`; traction walls have zero tangential velocity.
    fn wall_velocity(&self, x: Vec2, t: f64) -> Vec2 {
        match self {
            Self::Velocity(f) => f(x, t),
            Self::NormalTraction { .. } => [0.0, 0.0],
        }
    }
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Velocity(_) => f.write_str("Velocity(..)"),
            Self::NormalTraction { p_ext } => write!(f, "NormalTraction {{ p_ext: {p_ext} }}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

/// One boundary condition per side of the rectangular domain.
#[derive(Debug, Clone)]
pub struct Boundaries {
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
    pub bottom: BoundaryCondition,
    pub top: BoundaryCondition,
}

impl Boundaries {
    pub fn no_slip() -> Self {
        Self {
            left: BoundaryCondition::no_slip(),
            right: BoundaryCondition::no_slip(),
            bottom: BoundaryCondition::no_slip(),
            top: BoundaryCondition::no_slip(),
        }
    }

    /// The same velocity profile on every side.
    pub fn all_velocity(f: impl Fn(Vec2, f64) -> Vec2 + Send + Sync + 'static) -> Self {
        let f: VelocityProfile = Arc::new(f);
        Self {
            left: BoundaryCondition::Velocity(f.clone()),
            right: BoundaryCondition::Velocity(f.clone()),
            bottom: BoundaryCondition::Velocity(f.clone()),
            top: BoundaryCondition::Velocity(f),
        }
    }

    pub fn side(&self, s: Side) -> &BoundaryCondition {
        match s {
            Side::Left => &self.left,
            Side::Right => &self.right,
            Side::Bottom => &self.bottom,
            Side::Top => &self.top,
        }
    }

    /// True when every side prescribes velocity, so pressure is only defined
    /// up to a constant.
    pub fn all_velocity_sides(&self) -> bool {
        [&self.left, &self.right, &self.bottom, &self.top]
            .iter()
            .all(|b| b.is_velocity())
    }

    /// Whether face `(i, j)` of component `d` carries a prescribed value.
    pub fn is_fixed(&self, grid: &MacGrid, d: usize, i: usize, j: usize) -> bool {
        if d == 0 {
            (i == 0 && self.left.is_velocity()) || (i == grid.nx && self.right.is_velocity())
        } else {
            (j == 0 && self.bottom.is_velocity()) || (j == grid.ny && self.top.is_velocity())
        }
    }

    /// Per-face mask of prescribed faces for component `d`.
    pub fn fixed_mask(&self, grid: &MacGrid, d: usize) -> Vec<bool> {
        let (w, h) = grid.face_dims(d);
        let mut m = vec![false; w * h];
        for j in 0..h {
            for i in 0..w {
                m[j * w + i] = self.is_fixed(grid, d, i, j);
            }
        }
        m
    }

    /// Writes the prescribed normal velocities at time `t` into `field`.
    pub fn impose(&self, grid: &MacGrid, field: &mut StaggeredField, t: f64) {
        for j in 0..grid.ny {
            if let BoundaryCondition::Velocity(f) = &self.left {
                field.u[grid.u_index(0, j)] = f(grid.u_position(0, j), t)[0];
            }
            if let BoundaryCondition::Velocity(f) = &self.right {
                field.u[grid.u_index(grid.nx, j)] = f(grid.u_position(grid.nx, j), t)[0];
            }
        }
        for i in 0..grid.nx {
            if let BoundaryCondition::Velocity(f) = &self.bottom {
                field.v[grid.v_index(i, 0)] = f(grid.v_position(i, 0), t)[1];
            }
            if let BoundaryCondition::Velocity(f) = &self.top {
                field.v[grid.v_index(i, grid.ny)] = f(grid.v_position(i, grid.ny), t)[1];
            }
        }
    }

    /// Pressure Dirichlet value on a side, if any.
    pub fn pressure_value(&self, s: Side) -> Option<f64> {
        match self.side(s) {
            BoundaryCondition::NormalTraction { p_ext } => Some(*p_ext),
            BoundaryCondition::Velocity(_) => None,
        }
    }
}

/// A face array padded by one ghost layer on every side.
#[derive(Debug, Clone)]
pub(crate) struct Padded {
    pub w: usize,
    pub data: Vec<f64>,
}

impl Padded {
    #[inline]
    pub fn at(&self, i: isize, j: isize) -> f64 {
        self.data[((j + 1) as usize) * self.w + (i + 1) as usize]
    }

    #[inline]
    fn set(&mut self, i: isize, j: isize, v: f64) {
        self.data[((j + 1) as usize) * self.w + (i + 1) as usize] = v;
    }
}

/// How ghost values treat the boundary data.
#[derive(Debug, Clone, Copy)]
pub(crate) enum GhostMode {
    /// Prescribed wall values at time `t`.
    Physical(f64),
    /// All wall data zero, as for correction or linearized operators.
    Homogeneous,
}

/// Pads component `d` of `field` with ghost values: tangential ghosts
/// reflect to the wall velocity (`2g − interior`), normal ghosts mirror the
/// first interior face. Prescribed normal faces are overwritten with wall
/// data.
pub(crate) fn pad_component(
    grid: &MacGrid,
    bcs: &Boundaries,
    field: &[f64],
    d: usize,
    mode: GhostMode,
) -> Padded {
    let (w, h) = grid.face_dims(d);
    let mut p = Padded {
        w: w + 2,
        data: vec![0.0; (w + 2) * (h + 2)],
    };
    for j in 0..h {
        for i in 0..w {
            p.set(i as isize, j as isize, field[j * w + i]);
        }
    }
    let wall = |bc: &BoundaryCondition, x: Vec2| -> Vec2 {
        match mode {
            GhostMode::Physical(t) => bc.wall_velocity(x, t),
            GhostMode::Homogeneous => [0.0, 0.0],
        }
    };
    let (lo_n, hi_n, lo_t, hi_t) = if d == 0 {
        (&bcs.left, &bcs.right, &bcs.bottom, &bcs.top)
    } else {
        (&bcs.bottom, &bcs.top, &bcs.left, &bcs.right)
    };
    // (normal index, tangential index) → padded (i, j)
    let at = |n: isize, t: isize| if d == 0 { (n, t) } else { (t, n) };
    let (nn, nt) = if d == 0 { (w, h) } else { (h, w) };
    let face_pos = |n: usize, t: usize| if d == 0 { grid.u_position(n, t) } else { grid.v_position(t, n) };

    for t in 0..nt {
        for (bc, n_face, n_in, n_ghost) in [
            (lo_n, 0usize, 1isize, -1isize),
            (hi_n, nn - 1, nn as isize - 2, nn as isize),
        ] {
            if bc.is_velocity() {
                let g = wall(bc, face_pos(n_face, t))[d];
                let (a, b) = at(n_face as isize, t as isize);
                p.set(a, b, g);
                let (ai, bi) = at(n_in, t as isize);
                let inner = p.at(ai, bi);
                let (ag, bg) = at(n_ghost, t as isize);
                p.set(ag, bg, 2.0 * g - inner);
            } else {
                let (ai, bi) = at(n_in, t as isize);
                let inner = p.at(ai, bi);
                let (ag, bg) = at(n_ghost, t as isize);
                p.set(ag, bg, inner);
            }
        }
    }
    // tangential walls: the ghost row sits half a cell outside the wall
    let spacing = grid.dx;
    for n in -1..=(nn as isize) {
        for (bc, t_in, t_ghost, offset) in [
            (lo_t, 0isize, -1isize, -0.5),
            (hi_t, nt as isize - 1, nt as isize, 0.5),
        ] {
            let nc = n.clamp(0, nn as isize - 1) as usize;
            let mut x = face_pos(nc, t_in as usize);
            x[1 - d] += offset * spacing;
            x[d] += (n - nc as isize) as f64 * spacing;
            let g = wall(bc, x)[d];
            let (ai, bi) = at(n, t_in);
            let inner = p.at(ai, bi);
            let (ag, bg) = at(n, t_ghost);
            p.set(ag, bg, 2.0 * g - inner);
        }
    }
    p
}
