//! Internal forces of a stretched neo-Hookean block and the two force
//! projections.
//!
//! ```text
//! cargo run --release --example structural_mechanics
//! ```

use ifed::mechanics::assembly::{load_dot, material_load, strain_energy};
use ifed::mechanics::{project_force, MassOperator, Material, PointTable};
use ifed::mesh::{ElementKind, StructuralMesh};
use ifed::quadrature::{consistent_rule, higher_order_rule, nodal_rule, NodalWeights};

fn main() -> ifed::Result<()> {
    let materials = [
        ("modified neo-Hookean", Material::ModifiedNeoHookean { g: 80.194, kappa_stab: 374.239 }),
        ("incompressible neo-Hookean", Material::IncompressibleNeoHookean { g: 50.0 }),
    ];
    let mesh = StructuralMesh::block([0.0, 0.0], 2.0, 1.0, 8, 4, ElementKind::Q2)?;
    let table = PointTable::new(&mesh, &higher_order_rule(&mesh)?)?;
    // uniaxial stretch by 10% along x
    let chi: Vec<_> = mesh.nodes().iter().map(|x| [1.1 * x[0], x[1]]).collect();
    let rate: Vec<_> = mesh.nodes().iter().map(|x| [x[0], 0.0]).collect();

    for (name, material) in materials {
        let load = material_load(&mesh, &table, &chi, &material)?;
        let energy = strain_energy(&mesh, &table, &chi, &material);
        let total = load.iter().fold([0.0, 0.0], |a, l| [a[0] + l[0], a[1] + l[1]]);
        // the load is minus the energy gradient, so L · dχ/ds = −dE/ds
        let h = 1e-6;
        let chi_h: Vec<_> = chi.iter().zip(&rate).map(|(c, r)| [c[0] + h * r[0], c[1]]).collect();
        let de = (strain_energy(&mesh, &table, &chi_h, &material) - energy) / h;
        println!("{name}: energy {energy:.6}, net force [{:.1e}, {:.1e}]", total[0], total[1]);
        println!("  L·v = {:.6}, -dE/ds = {:.6}", load_dot(&load, &rate), -de);
    }

    let load = material_load(&mesh, &table, &chi, &materials[0].1)?;
    let consistent = MassOperator::consistent(&mesh, &consistent_rule(&mesh)?)?;
    let lumped = MassOperator::lumped(&nodal_rule(&mesh, NodalWeights::CompositeTrapezoid)?)?;
    let (f_consistent, its) = consistent.solve(&load)?;
    let f_lumped = project_force(&load, &lumped)?;
    let diff = f_consistent
        .iter()
        .zip(&f_lumped)
        .map(|(a, b)| (a[0] - b[0]).hypot(a[1] - b[1]))
        .fold(0.0, f64::max);
    println!("consistent projection: {its} CG iterations; lumped: diagonal");
    println!("max |F_consistent - F_lumped| = {diff:.4}");
    Ok(())
}
