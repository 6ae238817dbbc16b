use thiserror::Error;

/// Errors produced by the thermodynamic, hydrodynamic and quantum kernels.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A control or density argument lies outside the model's admissible region.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent input (wrong dimension, empty grid, ...).
    #[error("input error: {0}")]
    Input(String),

    /// The reduced pressure has a kink at the requested control value; the
    /// derivative does not exist and the caller should query the tangent set.
    #[error("pressure is non-differentiable at theta = {theta:?} (left slope {left}, right slope {right}); use the tangent set")]
    NonDifferentiable { theta: Vec<f64>, left: f64, right: f64 },

    /// Tabulated data does not extend far enough around the query point.
    #[error("insufficient tabulated data: {0}")]
    InsufficientData(String),

    /// Requested system size exceeds the dense-diagonalization cap.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// The fluctuation covariance is not positive definite at a cell
    /// (phase boundary or coexistence point).
    #[error("covariance not positive definite at cell {cell} (x = {x}): {detail}")]
    PhaseBoundary { cell: usize, x: f64, detail: String },

    /// An explicit step left the entropy domain even after dt reduction.
    #[error("step rejection: {0}")]
    StepRejected(String),

    /// A stated precondition of the operation failed.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Density-matrix evolution broke trace or positivity tolerances.
    #[error("integrator error: {0}")]
    Integrator(String),

    /// Input not supported by design (e.g. degenerate probe spectrum).
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// A numerical routine failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
