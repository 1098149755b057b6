//! Discrete MAC operators.

use super::boundary::{pad_component, Boundaries, GhostMode, Padded, Side};
use super::{CellField, MacGrid, StaggeredField};

/// Cell divergence `(u_E − u_W + v_N − v_S) / Δx`.
pub fn divergence(grid: &MacGrid, u: &StaggeredField) -> CellField {
    let mut out = CellField::zeros(grid);
    let inv = 1.0 / grid.dx;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            out.data[grid.cell_index(i, j)] = (u.u[grid.u_index(i + 1, j)] - u.u[grid.u_index(i, j)]
                + u.v[grid.v_index(i, j + 1)]
                - u.v[grid.v_index(i, j)])
                * inv;
        }
    }
    out
}

/// Face gradient of a cell field. Faces with prescribed velocity get zero;
/// faces on traction walls use the wall value `p_wall` (or zero when
/// `homogeneous`) half a cell outside the last cell.
pub fn gradient(grid: &MacGrid, bcs: &Boundaries, p: &CellField, homogeneous: bool) -> StaggeredField {
    let mut g = StaggeredField::zeros(grid);
    let inv = 1.0 / grid.dx;
    let wall = |s: Side| -> Option<f64> { bcs.pressure_value(s).map(|v| if homogeneous { 0.0 } else { v }) };
    let (pl, pr, pb, pt) = (wall(Side::Left), wall(Side::Right), wall(Side::Bottom), wall(Side::Top));
    for j in 0..grid.ny {
        for i in 1..grid.nx {
            g.u[grid.u_index(i, j)] = (p.data[grid.cell_index(i, j)] - p.data[grid.cell_index(i - 1, j)]) * inv;
        }
        if let Some(pw) = pl {
            g.u[grid.u_index(0, j)] = 2.0 * (p.data[grid.cell_index(0, j)] - pw) * inv;
        }
        if let Some(pw) = pr {
            g.u[grid.u_index(grid.nx, j)] = 2.0 * (pw - p.data[grid.cell_index(grid.nx - 1, j)]) * inv;
        }
    }
    for i in 0..grid.nx {
        for j in 1..grid.ny {
            g.v[grid.v_index(i, j)] = (p.data[grid.cell_index(i, j)] - p.data[grid.cell_index(i, j - 1)]) * inv;
        }
        if let Some(pw) = pb {
            g.v[grid.v_index(i, 0)] = 2.0 * (p.data[grid.cell_index(i, 0)] - pw) * inv;
        }
        if let Some(pw) = pt {
            g.v[grid.v_index(i, grid.ny)] = 2.0 * (pw - p.data[grid.cell_index(i, grid.ny - 1)]) * inv;
        }
    }
    g
}

/// `½ ρ Σ |u|² Δx²` with every face weighted equally.
pub fn kinetic_energy(grid: &MacGrid, u: &StaggeredField, rho: f64) -> f64 {
    0.5 * rho * u.dot(u) * grid.dx * grid.dx
}

/// Five-point Laplacian of a padded component at face `(i, j)`.
#[inline]
pub(crate) fn laplacian_at(p: &Padded, i: isize, j: isize, inv_dx2: f64) -> f64 {
    (p.at(i + 1, j) + p.at(i - 1, j) + p.at(i, j + 1) + p.at(i, j - 1) - 4.0 * p.at(i, j)) * inv_dx2
}

/// Centered interface value blended toward upwind at large cell Péclet
/// numbers.
#[inline]
fn blend(lo: f64, hi: f64, a: f64, beta_max: f64, pe_per_speed: f64) -> f64 {
    let centered = 0.5 * (lo + hi);
    if beta_max == 0.0 {
        return centered;
    }
    let pe = a.abs() * pe_per_speed;
    let beta = beta_max * (1.0 - 2.0 / pe).clamp(0.0, 1.0);
    let up = if a >= 0.0 { lo } else { hi };
    centered + beta * (up - centered)
}

/// Conservative advection `∇·(u u)` at every face, using ghost values from
/// the physical boundary data at time `t`. `upwind` caps the upwind blend
/// weight; `pe_per_speed` is `ρ Δx / μ`.
pub(crate) fn advection(
    grid: &MacGrid,
    bcs: &Boundaries,
    u: &StaggeredField,
    t: f64,
    upwind: f64,
    pe_per_speed: f64,
) -> StaggeredField {
    let pu = pad_component(grid, bcs, &u.u, 0, GhostMode::Physical(t));
    let pv = pad_component(grid, bcs, &u.v, 1, GhostMode::Physical(t));
    advection_padded(grid, &pu, &pv, upwind, pe_per_speed)
}

pub(crate) fn advection_padded(grid: &MacGrid, pu: &Padded, pv: &Padded, upwind: f64, pe_per_speed: f64) -> StaggeredField {
    let mut n = StaggeredField::zeros(grid);
    let inv = 1.0 / grid.dx;
    let bl = |lo: f64, hi: f64, a: f64| blend(lo, hi, a, upwind, pe_per_speed);
    for j in 0..grid.ny as isize {
        for i in 0..=grid.nx as isize {
            let uc = pu.at(i, j);
            let (ue, uw) = (pu.at(i + 1, j), pu.at(i - 1, j));
            let (un, us) = (pu.at(i, j + 1), pu.at(i, j - 1));
            let ae = 0.5 * (uc + ue);
            let aw = 0.5 * (uw + uc);
            let an = 0.5 * (pv.at(i - 1, j + 1) + pv.at(i, j + 1));
            let as_ = 0.5 * (pv.at(i - 1, j) + pv.at(i, j));
            let fe = ae * bl(uc, ue, ae);
            let fw = aw * bl(uw, uc, aw);
            let fnn = an * bl(uc, un, an);
            let fs = as_ * bl(us, uc, as_);
            n.u[grid.u_index(i as usize, j as usize)] = (fe - fw + fnn - fs) * inv;
        }
    }
    for j in 0..=grid.ny as isize {
        for i in 0..grid.nx as isize {
            let vc = pv.at(i, j);
            let (ve, vw) = (pv.at(i + 1, j), pv.at(i - 1, j));
            let (vn, vs) = (pv.at(i, j + 1), pv.at(i, j - 1));
            let an = 0.5 * (vc + vn);
            let as_ = 0.5 * (vs + vc);
            let ae = 0.5 * (pu.at(i + 1, j - 1) + pu.at(i + 1, j));
            let aw = 0.5 * (pu.at(i, j - 1) + pu.at(i, j));
            let fnn = an * bl(vc, vn, an);
            let fs = as_ * bl(vs, vc, as_);
            let fe = ae * bl(vc, ve, ae);
            let fw = aw * bl(vw, vc, aw);
            n.v[grid.v_index(i as usize, j as usize)] = (fe - fw + fnn - fs) * inv;
        }
    }
    n
}
