//! Coupled immersed FE–FD time stepping.
//!
//! One step is a midpoint predictor–corrector: structural forces at `χⁿ`
//! drive a half fluid stage, the interpolated velocity advances the
//! structure to `χⁿ⁺¹ᐟ²`, forces there drive the full fluid stage, and the
//! structure moves with the velocity interpolated at `χⁿ⁺¹ᐟ²` from the
//! average of `uⁿ` and `uⁿ⁺¹`.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::coupling::{
    grid_moments, interpolate, project_velocity, spread_density, spread_load, CouplingConfig, Interaction, Scheme,
    StencilPolicy,
};
use crate::error::{IfedError, Result};
use crate::grid::{kinetic_energy, Boundaries, CellField, FluidParams, FluidSolver, MacGrid, StaggeredField};
use crate::linalg::{det, Vec2};
use crate::mechanics::{LoadModel, MassOperator, PointTable};
use crate::mesh::StructuralMesh;
use crate::quadrature::{consistent_rule, nodal_rule, MeshQuadrature, NodalWeights};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub fluid: FluidParams,
    pub coupling: CouplingConfig,
    pub dt: f64,
    /// Tractions ramp linearly to full strength at this time.
    pub ramp_time: f64,
    pub final_time: f64,
    /// Call the observer every this many steps (and at the end).
    #[serde(default = "default_cadence")]
    pub output_every: usize,
    /// Check force conservation on every spreading call.
    #[serde(default)]
    pub check_conservation: bool,
}

fn default_cadence() -> usize {
    100
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt > 0.0
            && self.final_time >= 0.0
            && self.ramp_time >= 0.0
            && (self.final_time == 0.0 || self.ramp_time <= self.final_time)
            && self.fluid.rho > 0.0
            && self.fluid.mu > 0.0;
        if ok {
            Ok(())
        } else {
            Err(IfedError::InvalidConfig(format!("{self:?}")))
        }
    }

    pub fn step_count(&self) -> usize {
        (self.final_time / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    /// Linear load ramp reaching 1 at `ramp_time`.
    pub fn load_factor(&self, t: f64) -> f64 {
        if self.ramp_time <= 0.0 {
            1.0
        } else {
            (t / self.ramp_time).clamp(0.0, 1.0)
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationState {
    pub t: f64,
    pub step: usize,
    pub chi: Vec<Vec2>,
    pub velocity: Vec<Vec2>,
    /// Last projected force density (elemental) or spread load (nodal).
    pub force: Vec<Vec2>,
    pub u: StaggeredField,
    pub p: CellField,
}

/// Wall time spent in each phase of the step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseTimings {
    pub assembly: Duration,
    pub projection: Duration,
    pub coupling: Duration,
    pub fluid: Duration,
}

/// Cumulative structural linear-solver work.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveCounts {
    pub mass_solves: usize,
    pub mass_iterations: usize,
}

/// Per-cadence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub step: usize,
    pub t: f64,
    pub kinetic_energy: f64,
    pub max_fluid_velocity: f64,
    pub max_structure_velocity: f64,
}

pub struct Simulation {
    pub config: SimulationConfig,
    pub mesh: StructuralMesh,
    pub loads: LoadModel,
    pub fluid: FluidSolver,
    pub state: SimulationState,
    pub timings: PhaseTimings,
    pub counts: SolveCounts,
    /// Nodes held at their reference position regardless of the fluid.
    /// Empty means none.
    pub pinned: Vec<bool>,
    force_table: PointTable,
    nodal: MeshQuadrature,
    mass: MassOperator,
}

impl Simulation {
    pub fn new(
        config: SimulationConfig,
        grid: MacGrid,
        bcs: Boundaries,
        mesh: StructuralMesh,
        loads: LoadModel,
    ) -> Result<Self> {
        config.validate()?;
        loads.material.validate()?;
        let force_table = PointTable::new(&mesh, &consistent_rule(&mesh)?)?;
        let nodal = nodal_rule(&mesh, NodalWeights::CompositeTrapezoid)?;
        let mass = match config.coupling.scheme {
            Scheme::Nodal => MassOperator::lumped(&nodal)?,
            Scheme::Elemental => MassOperator::consistent(&mesh, &consistent_rule(&mesh)?)?,
        };
        let chi = mesh.nodes().to_vec();
        let n = chi.len();
        let fluid = FluidSolver::new(grid, bcs, config.fluid);
        let mut u = fluid.boundary_field(0.0);
        if !u.is_finite() {
            u = StaggeredField::zeros(&grid);
        }
        let state = SimulationState {
            t: 0.0,
            step: 0,
            chi,
            velocity: vec![[0.0; 2]; n],
            force: vec![[0.0; 2]; n],
            u,
            p: CellField::zeros(&grid),
        };
        Ok(Self {
            config,
            mesh,
            loads,
            fluid,
            state,
            timings: PhaseTimings::default(),
            counts: SolveCounts::default(),
            pinned: Vec::new(),
            force_table,
            nodal,
            mass,
        })
    }

    pub fn grid(&self) -> &MacGrid {
        &self.fluid.grid
    }

    pub fn mass(&self) -> &MassOperator {
        &self.mass
    }

    /// Displacement `χ − X` of node `n`.
    pub fn displacement(&self, n: usize) -> Vec2 {
        let x = self.mesh.nodes()[n];
        let c = self.state.chi[n];
        [c[0] - x[0], c[1] - x[1]]
    }

    fn interaction(&self, chi: &[Vec2]) -> Result<Interaction> {
        match self.config.coupling.scheme {
            Scheme::Nodal => Interaction::nodal(&self.mesh, &self.nodal, chi),
            Scheme::Elemental => Interaction::adaptive(&self.mesh, chi, self.grid().dx, &self.config.coupling.adaptive),
        }
    }

    /// Eulerian force density generated by the structure at `(chi, vel)`.
    /// Returns the grid force and the Lagrangian force representation.
    pub fn force_density(&mut self, chi: &[Vec2], vel: &[Vec2], t: f64) -> Result<(StaggeredField, Vec<Vec2>)> {
        let c = self.config.coupling;
        let t0 = Instant::now();
        let load = self
            .loads
            .assemble(&self.mesh, &self.force_table, chi, vel, self.config.load_factor(t))?;
        let t1 = Instant::now();
        self.timings.assembly += t1 - t0;
        let grid = *self.grid();
        let (f, lag) = match c.scheme {
            Scheme::Nodal => {
                let f = spread_load(&grid, c.kernel, c.stencil, chi, &load)?;
                self.timings.coupling += t1.elapsed();
                (f, load.clone())
            }
            Scheme::Elemental => {
                let (force, its) = self.mass.solve(&load)?;
                self.counts.mass_solves += 1;
                self.counts.mass_iterations += its;
                let t2 = Instant::now();
                self.timings.projection += t2 - t1;
                let pts = self.interaction(chi)?;
                let f = spread_density(&grid, c.kernel, c.stencil, &self.mesh, &pts, &force)?;
                self.timings.coupling += t2.elapsed();
                (f, force)
            }
        };
        if self.config.check_conservation && c.stencil == StencilPolicy::Strict {
            check_conservation(&grid, &f, &load, chi)?;
        }
        Ok((f, lag))
    }

    /// Structural velocity from the Eulerian velocity at configuration `chi`.
    pub fn structure_velocity(&mut self, u: &StaggeredField, chi: &[Vec2]) -> Result<Vec<Vec2>> {
        let c = self.config.coupling;
        let t0 = Instant::now();
        let pts = self.interaction(chi)?;
        let uib = interpolate(self.grid(), c.kernel, c.stencil, u, &pts.positions)?;
        let t1 = Instant::now();
        self.timings.coupling += t1 - t0;
        let (mut vel, its) = project_velocity(&self.mesh, &pts, &uib, &self.mass)?;
        for (v, _) in vel.iter_mut().zip(&self.pinned).filter(|(_, &p)| p) {
            *v = [0.0, 0.0];
        }
        if c.scheme == Scheme::Elemental {
            self.counts.mass_solves += 1;
            self.counts.mass_iterations += its;
        }
        self.timings.projection += t1.elapsed();
        Ok(vel)
    }

    /// Advances one time step.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.config.dt;
        let t = self.state.t;
        let chi_n = self.state.chi.clone();
        let vel_n = self.state.velocity.clone();
        let u_n = self.state.u.clone();
        let p_n = self.state.p.clone();

        let (f_n, _) = self.force_density(&chi_n, &vel_n, t)?;
        let tf = Instant::now();
        let (u_half, p_half) = self.fluid.stage(&u_n, &p_n, &u_n, t, &f_n, t + 0.5 * dt, 0.5 * dt)?;
        self.timings.fluid += tf.elapsed();
        self.check_finite(&u_half, t + 0.5 * dt)?;

        let vel_half = self.structure_velocity(&u_half, &chi_n)?;
        let chi_half: Vec<Vec2> = chi_n
            .iter()
            .zip(&vel_half)
            .map(|(x, v)| [x[0] + 0.5 * dt * v[0], x[1] + 0.5 * dt * v[1]])
            .collect();

        let (f_half, lag) = self.force_density(&chi_half, &vel_half, t + 0.5 * dt)?;
        let tf = Instant::now();
        let (u_new, p_new) = self.fluid.stage(&u_n, &p_half, &u_half, t + 0.5 * dt, &f_half, t + dt, dt)?;
        self.timings.fluid += tf.elapsed();
        self.check_finite(&u_new, t + dt)?;

        let mut u_mid = u_n;
        u_mid.u.iter_mut().zip(&u_new.u).for_each(|(a, b)| *a = 0.5 * (*a + b));
        u_mid.v.iter_mut().zip(&u_new.v).for_each(|(a, b)| *a = 0.5 * (*a + b));
        let vel_mid = self.structure_velocity(&u_mid, &chi_half)?;
        let chi_new: Vec<Vec2> = chi_n
            .iter()
            .zip(&vel_mid)
            .map(|(x, v)| [x[0] + dt * v[0], x[1] + dt * v[1]])
            .collect();

        self.state = SimulationState {
            t: t + dt,
            step: self.state.step + 1,
            chi: chi_new,
            velocity: vel_mid,
            force: lag,
            u: u_new,
            p: p_new,
        };
        self.check_structure()
    }

    fn check_finite(&self, u: &StaggeredField, time: f64) -> Result<()> {
        if u.is_finite() {
            Ok(())
        } else {
            Err(IfedError::BlowUp { step: self.state.step + 1, time })
        }
    }

    fn check_structure(&self) -> Result<()> {
        let s = &self.state;
        if !s.chi.iter().all(|x| x[0].is_finite() && x[1].is_finite()) {
            return Err(IfedError::BlowUp { step: s.step, time: s.t });
        }
        if self.loads.material.is_rigid() {
            return Ok(());
        }
        for q in 0..self.force_table.len() {
            let j = det(&self.force_table.deformation_gradient(&self.mesh, q, &s.chi));
            if !(j > 0.0) {
                return Err(IfedError::InvertedElement { element: self.force_table.elements[q], det: j });
            }
        }
        Ok(())
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let s = &self.state;
        Diagnostics {
            step: s.step,
            t: s.t,
            kinetic_energy: kinetic_energy(self.grid(), &s.u, self.config.fluid.rho),
            max_fluid_velocity: s.u.max_abs(),
            max_structure_velocity: s.velocity.iter().fold(0.0, |m, v| m.max(v[0].abs()).max(v[1].abs())),
        }
    }

    /// Runs to `final_time`, calling `observe` at the start, every
    /// `output_every` steps, and at the end.
    pub fn run(&mut self, mut observe: impl FnMut(&Self) -> Result<()>) -> Result<Vec<Diagnostics>> {
        let steps = self.config.step_count();
        let cadence = self.config.output_every.max(1);
        let mut history = vec![self.diagnostics()];
        observe(self)?;
        for k in 1..=steps {
            self.step()?;
            if k % cadence == 0 || k == steps {
                history.push(self.diagnostics());
                observe(self)?;
            }
        }
        Ok(history)
    }
}

/// Verifies that the spread force carries the Lagrangian total and first
/// moment: `Σ Δx² f = Σ L_i` and `Σ Δx² f·x = Σ χ_i·L_i`.
pub fn check_conservation(grid: &MacGrid, f: &StaggeredField, load: &[Vec2], chi: &[Vec2]) -> Result<()> {
    let (total, first) = grid_moments(grid, f);
    let (err0, err1, scale0, scale1) = conservation_errors(total, first, load, chi);
    let tol = 1e-10;
    if err0 > tol * scale0 || err1 > tol * scale1 {
        return Err(IfedError::Conservation(format!(
            "force total off by {err0:.3e} (scale {scale0:.3e}), first moment off by {err1:.3e} (scale {scale1:.3e})"
        )));
    }
    Ok(())
}

/// Absolute errors of the zeroth and first moments and their scales
/// `Σ|L_i|`, `Σ|χ_i·L_i|`.
pub fn conservation_errors(total: Vec2, first: f64, load: &[Vec2], chi: &[Vec2]) -> (f64, f64, f64, f64) {
    let mut sum = [0.0; 2];
    let (mut mom, mut scale0, mut scale1) = (0.0, 0.0, 0.0);
    for (l, x) in load.iter().zip(chi) {
        sum[0] += l[0];
        sum[1] += l[1];
        mom += l[0] * x[0] + l[1] * x[1];
        scale0 += l[0].abs() + l[1].abs();
        scale1 += (l[0] * x[0]).abs() + (l[1] * x[1]).abs();
    }
    let err0 = (total[0] - sum[0]).abs() + (total[1] - sum[1]).abs();
    (err0, (first - mom).abs(), scale0.max(f64::MIN_POSITIVE), scale1.max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::Kernel;
    use crate::mechanics::{Material, Tether};
    use crate::mesh::ElementKind;

    fn config(scheme: Scheme) -> SimulationConfig {
        SimulationConfig {
            fluid: FluidParams::new(1.0, 0.1),
            coupling: CouplingConfig::new(scheme, Kernel::BSpline3),
            dt: 0.005,
            ramp_time: 0.0,
            final_time: 0.05,
            output_every: 5,
            check_conservation: true,
        }
    }

    fn disk_like() -> StructuralMesh {
        StructuralMesh::block([0.35, 0.35], 0.3, 0.3, 4, 4, ElementKind::Q1).unwrap()
    }

    #[test]
    fn quiescent_state_is_unchanged() {
        for scheme in Scheme::ALL {
            let grid = MacGrid::new(16, 16, 1.0 / 16.0, [0.0, 0.0]);
            let loads = LoadModel::new(Material::ModifiedNeoHookean { g: 1.0, kappa_stab: 5.0 });
            let mut sim = Simulation::new(config(scheme), grid, Boundaries::no_slip(), disk_like(), loads).unwrap();
            let hist = sim.run(|_| Ok(())).unwrap();
            assert_eq!(hist.len(), 3);
            assert!((sim.state.t - 0.05).abs() < 1e-12);
            assert!(sim.state.u.max_abs() < 1e-12);
            for n in 0..sim.mesh.node_count() {
                let d = sim.displacement(n);
                assert!(d[0].abs() < 1e-12 && d[1].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tethered_block_relaxes_toward_its_anchor() {
        let grid = MacGrid::new(16, 16, 1.0 / 16.0, [0.0, 0.0]);
        let mut cfg = config(Scheme::Nodal);
        cfg.final_time = 1.0;
        let mesh = disk_like();
        let mut loads = LoadModel::new(Material::RigidPenalty { kappa_b: 0.0, eta_b: 0.0 });
        loads.body_tether = Some(Tether { kappa: 500.0, eta: 0.0, mask: [true, true] });
        let mut sim = Simulation::new(cfg, grid, Boundaries::no_slip(), mesh, loads).unwrap();
        // displace the whole body, then let the tether pull it back
        for c in sim.state.chi.iter_mut() {
            c[0] += 0.02;
        }
        let mut disp = Vec::new();
        sim.run(|s| {
            disp.push((0..s.mesh.node_count()).map(|n| s.displacement(n)[0].abs()).fold(0.0, f64::max));
            Ok(())
        })
        .unwrap();
        assert!(disp.windows(2).all(|w| w[1] <= w[0]), "{disp:?}");
        assert!(*disp.last().unwrap() < 0.5 * disp[0], "{disp:?}");
    }

    #[test]
    fn elemental_scheme_solves_twice_per_stage() {
        let grid = MacGrid::new(16, 16, 1.0 / 16.0, [0.0, 0.0]);
        let loads = LoadModel::new(Material::ModifiedNeoHookean { g: 1.0, kappa_stab: 5.0 });
        let mut sim = Simulation::new(config(Scheme::Elemental), grid, Boundaries::no_slip(), disk_like(), loads.clone()).unwrap();
        sim.step().unwrap();
        assert_eq!(sim.counts.mass_solves, 4);
        let mut sim = Simulation::new(config(Scheme::Nodal), grid, Boundaries::no_slip(), disk_like(), loads).unwrap();
        sim.step().unwrap();
        assert_eq!(sim.counts, SolveCounts::default());
    }

    #[test]
    fn ramp_is_linear() {
        let mut c = config(Scheme::Nodal);
        c.ramp_time = 40.0;
        c.final_time = 100.0;
        assert_eq!(c.load_factor(20.0), 0.5);
        assert_eq!(c.load_factor(60.0), 1.0);
        assert_eq!(c.step_count(), 20000);
        c.final_time = 0.0;
        c.ramp_time = 0.0;
        assert_eq!(c.step_count(), 0);
    }
}
