//! Quasi-static solid benchmarks: the compressed block and Cook's membrane.
//!
//! The structure sits in a closed box of viscous fluid. Tractions ramp up
//! linearly until `ramp_time`, then the system settles to equilibrium; the
//! quantity of interest is a vertical displacement averaged over the last
//! `qoi_window` fraction of the run.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::band::nearest_node;
use super::{base_row, Benchmark, ReportRow, RunOverrides};
use crate::coupling::{CouplingConfig, Kernel, Scheme, StencilPolicy};
use crate::error::Result;
use crate::fsi::{Simulation, SimulationConfig};
use crate::grid::{Boundaries, FluidParams, MacGrid};
use crate::linalg::Vec2;
use crate::mechanics::{LoadModel, Material, SurfaceTether, Tether, Traction};
use crate::mesh::{cook_membrane_corners, markers, ElementKind, StructuralMesh};
use crate::quadrature::AdaptiveSettings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiStaticParams {
    /// Side of the square fluid domain.
    pub domain: f64,
    /// Longest side of the structure.
    pub size: f64,
    pub rho: f64,
    pub mu: f64,
    pub upwind: f64,
    pub g: f64,
    pub kappa_stab: f64,
    pub ramp_time: f64,
    pub final_time: f64,
    /// Traction magnitude per unit reference length.
    pub traction: f64,
    /// Elements along the longest structure edge.
    pub m: usize,
    pub mfac: f64,
    pub scheme: Scheme,
    pub kernel: Kernel,
    pub element: ElementKind,
    pub c_a: f64,
    /// `Δt = dt_factor · 10⁻³ Δx`.
    pub dt_factor: f64,
    /// Boundary tether stiffness `κ_S = kappa_s_factor · Δx / Δt₀` with the
    /// reference step `Δt₀ = 10⁻³ Δx`, independent of `dt_factor`.
    pub kappa_s_factor: f64,
    pub qoi_window: f64,
}

impl QuasiStaticParams {
    pub fn kappa_s(&self) -> f64 {
        self.kappa_s_factor * 1.0e3
    }

    pub fn material(&self) -> Material {
        Material::ModifiedNeoHookean {
            g: self.g,
            kappa_stab: self.kappa_stab,
        }
    }
}

pub fn apply_overrides(p: &QuasiStaticParams, o: &RunOverrides) -> QuasiStaticParams {
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
    if let Some(v) = o.m {
        p.m = v;
    }
    if let Some(v) = o.final_time {
        p.ramp_time = p.ramp_time.min(v);
        p.final_time = v;
    }
    if let Some(v) = o.dt_factor {
        p.dt_factor *= v;
    }
    p
}

/// Grid cells per side: `ceil(M · E_FAC · M_FAC · L / size)`, with a small
/// tolerance so exact products are not bumped up by rounding.
pub fn cells_per_side(p: &QuasiStaticParams) -> usize {
    let n = p.m as f64 * p.element.element_factor() * p.mfac * p.domain / p.size;
    (n - 1e-9).ceil().max(1.0) as usize
}

/// One quasi-static case ready to run.
pub struct Case {
    pub benchmark: Benchmark,
    pub params: QuasiStaticParams,
    pub n: usize,
    pub mesh: StructuralMesh,
    pub loads: LoadModel,
    /// Reference position of the quantity-of-interest node.
    pub probe: Vec2,
}

/// Compressed block: `size × size/2`, centered in the box. The bottom is
/// held vertically, the top horizontally, and a downward traction acts on the
/// central half of the top.
pub fn block_case(p: &QuasiStaticParams) -> Result<Case> {
    let (w, h) = (p.size, 0.5 * p.size);
    let origin = [0.5 * (p.domain - w), 0.5 * (p.domain - h)];
    let ny = (p.m / 2).max(1);
    let mesh = StructuralMesh::block(origin, w, h, p.m, ny, p.element)?;
    let kappa = p.kappa_s();
    let mut loads = LoadModel::new(p.material());
    loads.surface_tethers = vec![
        SurfaceTether {
            marker: markers::BOTTOM,
            tether: Tether {
                kappa,
                eta: 0.0,
                mask: [false, true],
            },
        },
        SurfaceTether {
            marker: markers::TOP,
            tether: Tether {
                kappa,
                eta: 0.0,
                mask: [true, false],
            },
        },
    ];
    let cx = 0.5 * p.domain;
    loads.tractions.push(Traction {
        marker: markers::TOP,
        value: [0.0, -p.traction],
        x_range: Some([cx - 0.25 * w, cx + 0.25 * w]),
    });
    Ok(Case {
        benchmark: Benchmark::CompressedBlock,
        params: p.clone(),
        n: cells_per_side(p),
        mesh,
        loads,
        probe: [cx, origin[1] + h],
    })
}

/// Cook's membrane scaled to longest side `size`, centered in the box. The
/// left side is tethered and the right side carries an upward traction.
pub fn cook_case(p: &QuasiStaticParams) -> Result<Case> {
    let c = 0.5 * p.domain;
    let corners = cook_membrane_corners(p.size, [c, c]);
    let mesh = StructuralMesh::quad_domain(corners, p.m, p.m, p.element)?;
    let mut loads = LoadModel::new(p.material());
    loads.surface_tethers.push(SurfaceTether {
        marker: markers::LEFT,
        tether: Tether {
            kappa: p.kappa_s(),
            eta: 0.0,
            mask: [true, true],
        },
    });
    loads.tractions.push(Traction {
        marker: markers::RIGHT,
        value: [0.0, p.traction],
        x_range: None,
    });
    Ok(Case {
        benchmark: Benchmark::CooksMembrane,
        params: p.clone(),
        n: cells_per_side(p),
        mesh,
        loads,
        probe: corners[2],
    })
}

impl Case {
    pub fn simulation(&self) -> Result<Simulation> {
        let p = &self.params;
        let dx = p.domain / self.n as f64;
        let grid = MacGrid::new(self.n, self.n, dx, [0.0, 0.0]);
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
            dt: p.dt_factor * 1.0e-3 * dx,
            ramp_time: p.ramp_time,
            final_time: p.final_time,
            output_every: 1,
            check_conservation: false,
        };
        Simulation::new(config, grid, Boundaries::no_slip(), self.mesh.clone(), self.loads.clone())
    }

    /// Runs to `final_time`; returns the simulation and the time-averaged
    /// vertical displacement of the probe over the final window.
    pub fn run(&self) -> Result<(Simulation, f64)> {
        let mut sim = self.simulation()?;
        let probe = nearest_node(&sim.mesh, self.probe);
        let start = (1.0 - self.params.qoi_window) * self.params.final_time;
        let (mut sum, mut count) = (0.0, 0usize);
        sim.run(|s| {
            if s.state.t >= start - 1e-12 {
                sum += s.displacement(probe)[1];
                count += 1;
            }
            Ok(())
        })?;
        let qoi = if count > 0 { sum / count as f64 } else { sim.displacement(probe)[1] };
        Ok((sim, qoi))
    }

    pub fn report(&self, started: Instant) -> Result<ReportRow> {
        let (sim, qoi) = self.run()?;
        let p = &self.params;
        let mut row = base_row(self.benchmark, &sim, p.mfac, self.n, p.m, started);
        row.qoi = Some(qoi);
        row.params = super::config::params_string(p);
        Ok(row)
    }
}

pub fn run_block(base: &QuasiStaticParams, o: &RunOverrides) -> Result<ReportRow> {
    let started = Instant::now();
    block_case(&apply_overrides(base, o))?.report(started)
}

pub fn run_cook(base: &QuasiStaticParams, o: &RunOverrides) -> Result<ReportRow> {
    let started = Instant::now();
    cook_case(&apply_overrides(base, o))?.report(started)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::config::BenchConfig;

    #[test]
    fn grid_size_formulas() {
        let c = BenchConfig::defaults();
        let mut b = c.compressed_block.clone();
        for (m, kind, mfac, n) in [
            (4, ElementKind::Q1, 1.0, 8),
            (8, ElementKind::Q1, 0.75, 12),
            (4, ElementKind::Q2, 0.5, 8),
            (5, ElementKind::P1, 0.75, 8),
        ] {
            b.m = m;
            b.element = kind;
            b.mfac = mfac;
            assert_eq!(cells_per_side(&b), n);
        }
        let mut k = c.cooks_membrane.clone();
        k.m = 4;
        k.element = ElementKind::Q1;
        k.mfac = 1.0;
        assert_eq!(cells_per_side(&k), 7);
        k.m = 13;
        k.mfac = 1.0;
        assert_eq!(cells_per_side(&k), 20);
    }

    #[test]
    fn tether_stiffness_is_independent_of_step() {
        let c = BenchConfig::defaults();
        let mut b = c.compressed_block.clone();
        assert_eq!(b.kappa_s(), 2500.0);
        b.dt_factor = 10.0;
        assert_eq!(b.kappa_s(), 2500.0);
        assert_eq!(c.cooks_membrane.kappa_s(), 125.0);
    }

    #[test]
    fn probes_and_markers() {
        let c = BenchConfig::defaults();
        let block = block_case(&c.compressed_block).unwrap();
        let n = nearest_node(&block.mesh, block.probe);
        assert_eq!(block.mesh.nodes()[n], [20.0, 25.0]);
        let cook = cook_case(&c.cooks_membrane).unwrap();
        let n = nearest_node(&cook.mesh, cook.probe);
        assert!((cook.mesh.nodes()[n][0] - cook.probe[0]).abs() < 1e-12);
        assert!(cook.mesh.facets_with_marker(markers::LEFT).count() == c.cooks_membrane.m);
    }

    #[test]
    fn zero_traction_gives_zero_displacement() {
        let c = BenchConfig::defaults();
        let mut p = c.compressed_block.clone();
        p.traction = 0.0;
        p.m = 4;
        p.ramp_time = 0.5;
        p.final_time = 1.0;
        p.dt_factor = 50.0;
        let (sim, qoi) = block_case(&p).unwrap().run().unwrap();
        assert!(qoi.abs() < 1e-12);
        assert!(sim.state.u.max_abs() < 1e-12);
    }
}
