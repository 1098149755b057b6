//! Pressure-driven flow between no-slip plates on the MAC grid, compared with
//! the Poiseuille profile.
//!
//! ```text
//! cargo run --release --example fluid_channel [cells]
//! ```

use ifed::bench::{cell_error_norms, cell_velocity};
use ifed::grid::{BoundaryCondition, Boundaries, CellField, FluidParams, FluidSolver, MacGrid, StaggeredField};

fn main() -> ifed::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(16, |s| s.parse().expect("cells must be an integer"));
    let (length, p_in, mu) = (2.0, 1.0, 0.1);
    let grid = MacGrid::new(2 * n, n, 1.0 / n as f64, [0.0, 0.0]);
    let bcs = Boundaries {
        left: BoundaryCondition::NormalTraction { p_ext: p_in },
        right: BoundaryCondition::NormalTraction { p_ext: 0.0 },
        bottom: BoundaryCondition::no_slip(),
        top: BoundaryCondition::no_slip(),
    };
    let mut solver = FluidSolver::new(grid, bcs, FluidParams::new(1.0, mu));
    let mut u = StaggeredField::zeros(&grid);
    let mut p = CellField::zeros(&grid);
    let force = StaggeredField::zeros(&grid);

    let gradient = p_in / length;
    let exact = |y: f64| gradient / (2.0 * mu) * y * (1.0 - y);
    let dt = 0.02;
    let mut t = 0.0;
    for _ in 0..10 {
        for _ in 0..50 {
            solver.step(&mut u, &mut p, &force, t, dt)?;
            t += dt;
        }
        let err = cell_error_norms(&grid, |i, j| {
            let x = grid.cell_center(i, j);
            let v = cell_velocity(&grid, &u, i, j);
            Some([v[0] - exact(x[1]), v[1]])
        });
        println!("t = {t:5.2}  max|u| = {:.5}  error l2 = {:.3e}", u.max_abs(), err.l2);
    }
    println!("centerline exact {:.5}", exact(0.5));
    println!(
        "viscous iterations {}, pressure iterations {}",
        solver.stats.viscous_iterations, solver.stats.poisson_iterations
    );
    Ok(())
}
