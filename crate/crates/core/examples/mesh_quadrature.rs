//! Builds Cook's membrane with each element kind and compares the quadrature
//! families on it.
//!
//! ```text
//! cargo run --release --example mesh_quadrature
//! ```

use ifed::mesh::{cook_membrane_corners, markers, ElementKind, StructuralMesh};
use ifed::quadrature::{adaptive_rule, consistent_rule, higher_order_rule, nodal_rule, AdaptiveSettings, NodalWeights};

fn main() -> ifed::Result<()> {
    let corners = cook_membrane_corners(6.5, [5.0, 5.0]);
    let dx = 10.0 / 16.0;
    println!("kind  nodes  elems  dX      area(consistent)  area(nodal)  pts(consistent/higher/nodal/adaptive)");
    for kind in ElementKind::ALL {
        let mesh = StructuralMesh::quad_domain(corners, 4, 4, kind)?;
        let identity: Vec<_> = mesh.nodes().to_vec();
        let consistent = consistent_rule(&mesh)?;
        let higher = higher_order_rule(&mesh)?;
        let nodal = nodal_rule(&mesh, NodalWeights::CompositeTrapezoid)?;
        let adaptive = adaptive_rule(&mesh, &identity, dx, &AdaptiveSettings::default())?;
        println!(
            "{:<4}  {:>5}  {:>5}  {:.4}  {:>16.10}  {:>11.10}  {}/{}/{}/{}",
            kind.to_string(),
            mesh.node_count(),
            mesh.element_count(),
            mesh.longest_edge(),
            consistent.total_weight(),
            nodal.total_weight(),
            consistent.len(),
            higher.len(),
            nodal.len(),
            adaptive.len()
        );
    }

    let mesh = StructuralMesh::quad_domain(corners, 4, 4, ElementKind::Q2)?;
    for (name, marker) in [("bottom", markers::BOTTOM), ("right", markers::RIGHT), ("top", markers::TOP), ("left", markers::LEFT)] {
        println!("{name:>6} facets: {}", mesh.facets_with_marker(marker).count());
    }
    let mut text = Vec::new();
    ifed::mesh::write_mesh(&mesh, &mut text)?;
    let back = ifed::mesh::read_mesh(text.as_slice())?;
    println!("mesh text round trip: {} bytes, {} nodes", text.len(), back.node_count());
    Ok(())
}
