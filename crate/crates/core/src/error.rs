use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the string model, the integrator, and the two solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The tension vector vanished, so the tangent direction is undefined.
    #[error("singular tension (|n| = {norm:e})")]
    SingularTension { norm: f64 },

    #[error("state left the finite domain at s = {s}")]
    NonFiniteState { s: f64 },

    #[error("step size underflow at s = {s}: required h = {h:e} below h_min = {h_min:e}")]
    StepUnderflow { s: f64, h: f64, h_min: f64 },

    #[error("integration exceeded {max_steps} steps (stopped at s = {s})")]
    MaxStepsExceeded { s: f64, max_steps: usize },

    /// Linear-annular and punctual joints only accept global coordinate axes.
    #[error("joint axis {axis:?} is not aligned with a global coordinate axis")]
    NonAxisAligned { axis: [f64; 3] },

    #[error("singular Jacobian at iteration {iteration} (smallest pivot {pivot:e}, |J| = {norm:e})")]
    SingularJacobian { iteration: usize, pivot: f64, norm: f64 },

    #[error("no convergence after {iterations} iterations, |C| = {residual_norm:e}; trace: {trace:?}")]
    NoConvergence {
        iterations: usize,
        residual_norm: f64,
        /// Residual norm after every Newton update, starting with the initial guess.
        trace: Vec<f64>,
    },

    #[error("residual evaluation failed at iteration {iteration}: {source}")]
    EvaluationFailed {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("zero horizontal tension in catenary parameters")]
    ZeroHorizontalTension,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Joint combination or load that the catenary reference cannot represent.
    #[error("no catenary reference for this configuration: {0}")]
    NoReference(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures of an iterative solve, as opposed to bad input.
    pub fn is_convergence_failure(&self) -> bool {
        !matches!(
            self,
            Error::InvalidInput(_) | Error::NonAxisAligned { .. } | Error::NoReference(_)
        )
    }
}
