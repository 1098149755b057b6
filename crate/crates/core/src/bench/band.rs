//! Pressure-loaded elastic band.
//!
//! A vertical incompressible neo-Hookean strip spans the `2L × L` channel at
//! `x = L`. Normal tractions `±h` on the left and right sides set up a
//! pressure jump that the band carries once it has bowed to equilibrium. At
//! steady state the exact fluid velocity is zero, so any remaining velocity
//! is leakage through the discrete interface.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{base_row, cell_error_norms, cell_velocity, Benchmark, ErrorNorms, ReportRow, RunOverrides};
use crate::coupling::{CouplingConfig, Kernel, Scheme, StencilPolicy};
use crate::error::Result;
use crate::fsi::{Simulation, SimulationConfig};
use crate::grid::{BoundaryCondition, Boundaries, FluidParams, MacGrid, StaggeredField};
use crate::mechanics::{LoadModel, Material, SurfaceTether, Tether};
use crate::mesh::{markers, ElementKind, StructuralMesh};
use crate::quadrature::AdaptiveSettings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandParams {
    /// Height `L`; the domain is `2L × L`.
    pub length: f64,
    pub thickness: f64,
    /// Horizontal traction magnitude `h`.
    pub traction: f64,
    pub rho: f64,
    pub mu: f64,
    pub upwind: f64,
    /// Shear modulus of the band.
    pub g: f64,
    /// Cells per `L`.
    pub n: usize,
    pub mfac: f64,
    pub scheme: Scheme,
    pub kernel: Kernel,
    pub element: ElementKind,
    pub c_a: f64,
    /// `Δt = dt_factor · Δx`.
    pub dt_factor: f64,
    pub final_time: f64,
    /// Tether stiffness holding the band ends on the walls, in units of
    /// `ρ Δx / Δt²`.
    pub kappa_s: f64,
    /// Body damping `−η U` in units of `ρ / Δt`.
    pub damping: f64,
}

impl BandParams {
    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn dt(&self) -> f64 {
        self.dt_factor * self.dx()
    }
}

pub fn apply_overrides(p: &BandParams, o: &RunOverrides) -> BandParams {
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
        p.dt_factor *= v;
    }
    p
}

/// Band mesh with element size `M_FAC · E_FAC · Δx`, spanning the full
/// channel height.
pub fn band_mesh(p: &BandParams) -> Result<StructuralMesh> {
    let h = p.mfac * p.element.element_factor() * p.dx();
    let ny = (p.length / h).round().max(1.0) as usize;
    let nx = (p.thickness / h).round().max(1.0) as usize;
    StructuralMesh::block([p.length - 0.5 * p.thickness, 0.0], p.thickness, p.length, nx, ny, p.element)
}

pub fn simulation(p: &BandParams) -> Result<Simulation> {
    let dx = p.dx();
    let dt = p.dt();
    let grid = MacGrid::new(2 * p.n, p.n, dx, [0.0, 0.0]);
    let bcs = Boundaries {
        left: BoundaryCondition::NormalTraction { p_ext: p.traction },
        right: BoundaryCondition::NormalTraction { p_ext: -p.traction },
        bottom: BoundaryCondition::no_slip(),
        top: BoundaryCondition::no_slip(),
    };
    let mut loads = LoadModel::new(Material::IncompressibleNeoHookean { g: p.g });
    let end = Tether {
        kappa: p.kappa_s * p.rho * dx / (dt * dt),
        eta: 0.0,
        mask: [true, true],
    };
    for marker in [markers::BOTTOM, markers::TOP] {
        loads.surface_tethers.push(SurfaceTether { marker, tether: end });
    }
    if p.damping > 0.0 {
        loads.body_tether = Some(Tether {
            kappa: 0.0,
            eta: p.damping * p.rho / dt,
            mask: [true, true],
        });
    }
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
        dt,
        ramp_time: 0.0,
        final_time: p.final_time,
        output_every: 1000,
        check_conservation: false,
    };
    Simulation::new(config, grid, bcs, band_mesh(p)?, loads)
}

/// Norms of the cell-averaged velocity over the whole domain.
pub fn velocity_norms(grid: &MacGrid, u: &StaggeredField) -> ErrorNorms {
    cell_error_norms(grid, |i, j| Some(cell_velocity(grid, u, i, j)))
}

/// Runs the band to `final_time` and reports the residual velocity.
pub fn run(base: &BandParams, o: &RunOverrides) -> Result<ReportRow> {
    let started = Instant::now();
    let p = apply_overrides(base, o);
    let mut sim = simulation(&p)?;
    sim.run(|_| Ok(()))?;
    let err = velocity_norms(sim.grid(), &sim.state.u);
    let mut row = base_row(Benchmark::ElasticBand, &sim, p.mfac, p.n, 0, started);
    row.error_l1 = Some(err.l1);
    row.error_l2 = Some(err.l2);
    row.error_linf = Some(err.linf);
    // mid-height deflection of the band centerline
    let mid = nearest_node(&sim.mesh, [p.length, 0.5 * p.length]);
    row.qoi = Some(sim.displacement(mid)[0]);
    row.params = super::config::params_string(&p);
    Ok(row)
}

pub(crate) fn nearest_node(mesh: &StructuralMesh, x: crate::linalg::Vec2) -> usize {
    let d = |n: &crate::linalg::Vec2| (n[0] - x[0]).hypot(n[1] - x[1]);
    (0..mesh.node_count())
        .min_by(|&a, &b| d(&mesh.nodes()[a]).total_cmp(&d(&mesh.nodes()[b])))
        .expect("mesh has nodes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> BandParams {
        let mut p = super::super::config::BenchConfig::defaults().elastic_band;
        p.n = 16;
        p
    }

    #[test]
    fn mesh_spans_the_channel_with_requested_spacing() {
        for mfac in [0.5, 1.0, 2.0] {
            let p = BandParams { mfac, ..params() };
            let m = band_mesh(&p).unwrap();
            let ys: Vec<f64> = m.nodes().iter().map(|x| x[1]).collect();
            assert_eq!(ys.iter().cloned().fold(f64::INFINITY, f64::min), 0.0);
            assert!((ys.iter().cloned().fold(0.0, f64::max) - p.length).abs() < 1e-12);
            let spacing = p.length / (p.length / (mfac * 2.0 * p.dx())).round();
            let along = m.nodes().iter().map(|x| x[1]).filter(|y| *y > 0.0).fold(f64::INFINITY, f64::min);
            // P2 nodes sit at half the element size
            assert!((along - 0.5 * spacing).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_traction_stays_at_rest() {
        let p = BandParams {
            traction: 0.0,
            final_time: 20.0 * params().dt(),
            ..params()
        };
        let mut sim = simulation(&p).unwrap();
        sim.run(|_| Ok(())).unwrap();
        assert!(sim.state.u.max_abs() < 1e-12);
        for n in 0..sim.mesh.node_count() {
            let d = sim.displacement(n);
            assert!(d[0].abs() + d[1].abs() < 1e-12);
        }
    }
}
