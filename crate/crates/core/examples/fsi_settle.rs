//! A soft square tethered along its bottom edge and pulled sideways on its
//! top edge, immersed in a closed box. Runs both coupling schemes and
//! prints the time history.
//!
//! ```text
//! cargo run --release --example fsi_settle
//! ```

use ifed::coupling::{CouplingConfig, Kernel, Scheme};
use ifed::fsi::{Simulation, SimulationConfig};
use ifed::grid::{Boundaries, FluidParams, MacGrid};
use ifed::mechanics::{LoadModel, Material, SurfaceTether, Tether, Traction};
use ifed::mesh::{markers, ElementKind, StructuralMesh};

fn main() -> ifed::Result<()> {
    let n = 32;
    let grid = MacGrid::new(n, n, 1.0 / n as f64, [0.0, 0.0]);
    let mesh = StructuralMesh::block([0.3, 0.2], 0.4, 0.4, 6, 6, ElementKind::P2)?;
    let mut loads = LoadModel::new(Material::ModifiedNeoHookean { g: 2.0, kappa_stab: 20.0 });
    loads.surface_tethers.push(SurfaceTether {
        marker: markers::BOTTOM,
        tether: Tether {
            kappa: 2000.0,
            eta: 0.0,
            mask: [true, true],
        },
    });
    loads.tractions.push(Traction {
        marker: markers::TOP,
        value: [0.5, 0.0],
        x_range: None,
    });

    for scheme in Scheme::ALL {
        let config = SimulationConfig {
            fluid: FluidParams::new(1.0, 0.05),
            coupling: CouplingConfig::new(scheme, Kernel::BSpline3),
            dt: 1e-3,
            ramp_time: 0.5,
            final_time: 1.2,
            output_every: 300,
            check_conservation: false,
        };
        let mut sim = Simulation::new(config, grid, Boundaries::no_slip(), mesh.clone(), loads.clone())?;
        let corner = (0..sim.mesh.node_count())
            .find(|&i| (sim.mesh.nodes()[i][0] - 0.7).abs() + (sim.mesh.nodes()[i][1] - 0.6).abs() < 1e-12)
            .expect("top-right corner node");
        println!("{scheme}:");
        sim.run(|s| {
            let d = s.diagnostics();
            let u = s.displacement(corner);
            println!(
                "  t = {:.2}  kinetic energy {:.3e}  max |U| {:.3e}  corner displacement [{:.4}, {:.4}]",
                d.t, d.kinetic_energy, d.max_structure_velocity, u[0], u[1]
            );
            Ok(())
        })?;
        let t = sim.timings;
        println!(
            "  mass solves {} ({} iterations); coupling {:.2}s, projection {:.2}s, fluid {:.2}s",
            sim.counts.mass_solves,
            sim.counts.mass_iterations,
            t.coupling.as_secs_f64(),
            t.projection.as_secs_f64(),
            t.fluid.as_secs_f64()
        );
    }
    Ok(())
}
