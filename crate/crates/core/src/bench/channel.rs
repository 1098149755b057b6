//! Flow through a slanted channel bounded by two rigid, tethered plates.
//!
//! The domain is `[0, L]²`. The plates are inclined by `θ`, separated by a
//! gap `D`, and span the whole domain so the lumen is sealed from the
//! fluid outside it. Every side of the domain carries the analytic field:
//! the rotated Poiseuille profile inside the lumen and zero elsewhere.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{base_row, cell_error_norms, cell_velocity, Benchmark, ErrorNorms, ReportRow, RunOverrides};
use crate::coupling::{CouplingConfig, Kernel, Scheme, StencilPolicy};
use crate::error::Result;
use crate::fsi::{Simulation, SimulationConfig};
use crate::grid::{Boundaries, FluidParams, MacGrid, StaggeredField};
use crate::linalg::Vec2;
use crate::mechanics::{LoadModel, Material, Tether};
use crate::mesh::{ElementKind, StructuralMesh};
use crate::quadrature::AdaptiveSettings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelParams {
    pub length: f64,
    pub gap: f64,
    pub wall_thickness: f64,
    pub theta_degrees: f64,
    pub p0: f64,
    pub rho: f64,
    pub mu: f64,
    pub upwind: f64,
    pub n: usize,
    pub mfac: f64,
    pub scheme: Scheme,
    pub kernel: Kernel,
    pub element: ElementKind,
    pub c_a: f64,
    /// `Δt = cfl · Δx / u_max`.
    pub cfl: f64,
    pub final_time: f64,
    /// Body tether stiffness in units of `ρ / Δt²`.
    pub kappa_b: f64,
    /// Body tether damping in units of `ρ / Δt`.
    pub eta_b: f64,
    /// Cells next to each plate left out of the error region.
    pub layer_cells: f64,
    /// Distance from the inlet and outlet left out of the error region.
    pub end_exclusion: f64,
}

impl ChannelParams {
    pub fn theta(&self) -> f64 {
        self.theta_degrees.to_radians()
    }

    /// Pressure gradient `2 p₀ / (L / cos θ + D tan θ)`.
    pub fn pressure_gradient(&self) -> f64 {
        let t = self.theta();
        2.0 * self.p0 / (self.length / t.cos() + self.gap * t.tan())
    }

    /// Peak velocity of the Poiseuille profile.
    pub fn u_max(&self) -> f64 {
        self.pressure_gradient() * self.gap * self.gap / (8.0 * self.mu)
    }

    /// Height of the lower plate's inner wall at `x = 0`, chosen so the
    /// channel centerline passes through the domain center.
    pub fn y0(&self) -> f64 {
        let t = self.theta();
        let c = 0.5 * self.length;
        c - c * t.tan() - 0.5 * self.gap / t.cos()
    }

    /// Distance `η` across the channel from the lower inner wall.
    pub fn eta(&self, x: Vec2) -> f64 {
        let t = self.theta();
        -x[0] * t.sin() + (x[1] - self.y0()) * t.cos()
    }

    /// Analytic velocity: Poiseuille flow along the channel inside the
    /// lumen, rest outside.
    pub fn exact(&self, x: Vec2) -> Vec2 {
        let eta = self.eta(x);
        if eta <= 0.0 || eta >= self.gap {
            return [0.0, 0.0];
        }
        let s = self.pressure_gradient() * self.gap / (2.0 * self.mu) * eta * (1.0 - eta / self.gap);
        let t = self.theta();
        [s * t.cos(), s * t.sin()]
    }
}

/// Cells along and across a `length × w` plate so that the longest vertex
/// edge of every element is at most `h` and, for thin plates, close to it.
/// Triangles split each cell along a diagonal, which is then the longest edge.
fn plate_cells(h: f64, length: f64, w: f64, kind: ElementKind) -> (usize, usize) {
    if kind.is_triangle() {
        let ny = (w * std::f64::consts::SQRT_2 / h).ceil().max(1.0);
        let hy = w / ny;
        let hx = (h * h - hy * hy).sqrt();
        ((length / hx).ceil().max(1.0) as usize, ny as usize)
    } else {
        ((length / h).ceil().max(1.0) as usize, (w / h).ceil().max(1.0) as usize)
    }
}

/// Channel geometry and grid for a run.
pub struct ChannelSetup {
    pub params: ChannelParams,
    pub grid: MacGrid,
    pub mesh: StructuralMesh,
    pub dt: f64,
}

/// Builds the plate mesh: two rotated rectangles long enough to cross both
/// side walls, with element size `M_FAC · E_FAC · Δx`.
pub fn setup(p: &ChannelParams) -> Result<ChannelSetup> {
    let dx = p.length / p.n as f64;
    let grid = MacGrid::new(p.n, p.n, dx, [0.0, 0.0]);
    let t = p.theta();
    let w = p.wall_thickness;
    // plate length so both ends lie beyond the walls by at least one cell
    let half = 0.5 * p.length;
    let plate_len = 2.0 * (half + 0.5 * w * t.sin() + dx) / t.cos();
    let (nx, ny) = plate_cells(p.mfac * p.element.element_factor() * dx, plate_len, w, p.element);
    let normal = [-t.sin(), t.cos()];
    let on_wall = [half, p.y0() + half * t.tan()];
    let mut plates = Vec::new();
    for offset in [-0.5 * w, p.gap + 0.5 * w] {
        let c = [on_wall[0] + offset * normal[0], on_wall[1] + offset * normal[1]];
        plates.push(StructuralMesh::rotated_block(c, plate_len, w, t, nx, ny, p.element)?);
    }
    let mesh = StructuralMesh::merge(&plates)?;
    let dt = p.cfl * dx / p.u_max();
    Ok(ChannelSetup {
        params: p.clone(),
        grid,
        mesh,
        dt,
    })
}

/// Steady-state velocity error inside the lumen.
pub fn lumen_error(p: &ChannelParams, grid: &MacGrid, u: &StaggeredField) -> ErrorNorms {
    let layer = p.layer_cells * grid.dx;
    cell_error_norms(grid, |i, j| {
        let x = grid.cell_center(i, j);
        let eta = p.eta(x);
        let inside = eta > layer
            && eta < p.gap - layer
            && x[0] > p.end_exclusion
            && x[0] < p.length - p.end_exclusion;
        inside.then(|| {
            let v = cell_velocity(grid, u, i, j);
            let e = p.exact(x);
            [v[0] - e[0], v[1] - e[1]]
        })
    })
}

pub fn apply_overrides(p: &ChannelParams, o: &RunOverrides) -> ChannelParams {
    let mut p = p.clone();
    if let Some(v) = o.scheme {
        p.scheme = v;
    }
    if let Some(v) = o.kernel {
        p.kernel = v;
    }
    if let Some(v) = o.element {
        p.element = v;
    }
    if let Some(v) = o.mfac {
        p.mfac = v;
    }
    if let Some(v) = o.n {
        p.n = v;
    }
    if let Some(v) = o.final_time {
        p.final_time = v;
    }
    if let Some(v) = o.dt_factor {
        p.cfl *= v;
    }
    p
}

/// Builds the simulation, starting from the analytic field.
pub fn simulation(p: &ChannelParams) -> Result<Simulation> {
    let s = setup(p)?;
    let exact = {
        let p = p.clone();
        move |x: Vec2, _t: f64| p.exact(x)
    };
    let mut loads = LoadModel::new(Material::RigidPenalty {
        kappa_b: p.kappa_b * p.rho / (s.dt * s.dt),
        eta_b: p.eta_b * p.rho / s.dt,
    });
    loads.body_tether = Some(Tether {
        kappa: p.kappa_b * p.rho / (s.dt * s.dt),
        eta: p.eta_b * p.rho / s.dt,
        mask: [true, true],
    });
    let config = SimulationConfig {
        fluid: FluidParams {
            rho: p.rho,
            mu: p.mu,
            upwind: p.upwind,
        },
        coupling: CouplingConfig {
            scheme: p.scheme,
            kernel: p.kernel,
            adaptive: AdaptiveSettings {
                c_a: p.c_a,
                ..AdaptiveSettings::default()
            },
            stencil: StencilPolicy::Truncate,
        },
        dt: s.dt,
        ramp_time: 0.0,
        final_time: p.final_time,
        output_every: 1000,
        check_conservation: false,
    };
    let mut sim = Simulation::new(config, s.grid, Boundaries::all_velocity(exact.clone()), s.mesh, loads)?;
    sim.state.u = StaggeredField::from_fn(&s.grid, |x| exact(x, 0.0));
    // plate ends whose kernel reaches through the inlet or outlet
    let reach = p.kernel.radius() * s.grid.dx;
    sim.pinned = sim.mesh.nodes().iter().map(|x| x[0] < reach || x[0] > p.length - reach).collect();
    Ok(sim)
}

/// Runs the channel benchmark and reports lumen error norms.
pub fn run(base: &ChannelParams, o: &RunOverrides) -> Result<ReportRow> {
    let started = Instant::now();
    let p = apply_overrides(base, o);
    let mut sim = simulation(&p)?;
    sim.run(|_| Ok(()))?;
    let err = lumen_error(&p, sim.grid(), &sim.state.u);
    let mut row = base_row(Benchmark::ChannelFlow, &sim, p.mfac, p.n, 0, started);
    row.error_l1 = Some(err.l1);
    row.error_l2 = Some(err.l2);
    row.error_linf = Some(err.linf);
    row.params = super::config::params_string(&p);
    Ok(row)
}

/// Error of the fluid solver alone with the analytic field on every side
/// and no structure: the discretization floor.
pub fn no_structure_error(p: &ChannelParams) -> Result<ErrorNorms> {
    let s = setup(p)?;
    let exact = {
        let p = p.clone();
        move |x: Vec2, _t: f64| p.exact(x)
    };
    let mut fluid = crate::grid::FluidSolver::new(
        s.grid,
        Boundaries::all_velocity(exact.clone()),
        FluidParams {
            rho: p.rho,
            mu: p.mu,
            upwind: p.upwind,
        },
    );
    let mut u = StaggeredField::from_fn(&s.grid, |x| exact(x, 0.0));
    let mut pr = crate::grid::CellField::zeros(&s.grid);
    let f = StaggeredField::zeros(&s.grid);
    let steps = (p.final_time / s.dt - 1e-9).ceil().max(0.0) as usize;
    for k in 0..steps {
        fluid.step(&mut u, &mut pr, &f, k as f64 * s.dt, s.dt)?;
    }
    Ok(lumen_error(p, &s.grid, &u))
}

/// Report row for the structure-free control run.
pub fn control_row(base: &ChannelParams, o: &RunOverrides) -> Result<ReportRow> {
    let started = Instant::now();
    let p = apply_overrides(base, o);
    let err = no_structure_error(&p)?;
    let dx = p.length / p.n as f64;
    let dt = p.cfl * dx / p.u_max();
    Ok(ReportRow {
        benchmark: Benchmark::ChannelFlow.name().into(),
        scheme: "none".into(),
        kernel: String::new(),
        element: String::new(),
        mfac: 0.0,
        n: p.n,
        dx,
        dt,
        steps: (p.final_time / dt - 1e-9).ceil().max(0.0) as usize,
        final_time: p.final_time,
        error_l1: Some(err.l1),
        error_l2: Some(err.l2),
        error_linf: Some(err.linf),
        params: super::config::params_string(&p),
        status: "ok".into(),
        wall_time: started.elapsed(),
        ..Default::default()
    })
}
