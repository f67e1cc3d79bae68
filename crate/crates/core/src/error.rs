use thiserror::Error;

/// Failures raised by the solver pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A loop or trial point came within the singularity floor of the origin.
    #[error("loop touched the singular set: radius {radius:e} below floor {floor:e}")]
    Singularity { radius: f64, floor: f64 },

    #[error("no scaling maps the loop onto the energy constraint: {0}")]
    Projection(String),

    #[error("degenerate (constant) loop: kinetic integral {0:e}")]
    DegenerateLoop(f64),

    #[error("period rate numerator is not positive ({0:e}); energy too small for this loop")]
    NegativeRate(f64),

    #[error("no start converged ({starts} starts, best gradient norm {best_grad_norm:e})")]
    NoConvergence { starts: usize, best_grad_norm: f64 },

    #[error("certificate probe family approaches the singularity: m_R = {0:e}")]
    DegenerateCertificate(f64),

    #[error("trajectory collided with the singularity at t = {time}, radius {radius:e}")]
    Collision { time: f64, radius: f64 },

    #[error("integrator step size underflow at t = {0}")]
    StepFailure(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
