use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum IfedError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate element {element}: jacobian determinant {det:.3e}")]
    DegenerateElement { element: usize, det: f64 },

    #[error("inverted element {element}: det F = {det:.3e}")]
    InvertedElement { element: usize, det: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("adaptive quadrature on element {element} needs {needed} subdivisions (cap {cap})")]
    RefinementCap { element: usize, needed: usize, cap: usize },

    #[error("{solver} did not converge in {iterations} iterations (relative residual {residual:.3e})")]
    SolverFailure {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("interaction point {index} at ({x:.4}, {y:.4}) puts the kernel support outside the grid interior")]
    OutOfDomain { index: usize, x: f64, y: f64 },

    #[error("non-finite values detected at step {step} (t = {time:.6})")]
    BlowUp { step: usize, time: f64 },

    #[error("moment conservation violated: {0}")]
    Conservation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, IfedError>;
