//! Structural fields, constitutive laws, load vectors and mass operators.

pub mod assembly;
pub mod field;
pub mod mass;
pub mod material;

pub use assembly::{LoadModel, PointTable, SurfaceTether, Tether, Traction};
pub use field::{deformation_gradient, FEField, FieldRole};
pub use mass::{project_force, MassKind, MassOperator};
pub use material::Material;
