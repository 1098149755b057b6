//! Immersed finite element / finite difference fluid-structure interaction in 2D.

pub mod bench;
pub mod coupling;
pub mod error;
pub mod fsi;
pub mod grid;
pub mod linalg;
pub mod mechanics;
pub mod mesh;
pub mod quadrature;

pub use error::{IfedError, Result};
