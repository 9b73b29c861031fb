use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("non-finite value in {what} at node {index}")]
    NonFinite { what: String, index: usize },
    #[error("trajectory ends at t = {reached} but the horizon is T = {horizon}")]
    HorizonMismatch { reached: f64, horizon: f64 },
    #[error("data does not vanish before r_max = {r_max} (|value| = {value:e} at r = {r})")]
    SupportOverflow { r: f64, r_max: f64, value: f64 },
    #[error("evaluation point {point} outside the interpolation range [0, {limit}]")]
    RangeViolation { point: f64, limit: f64 },
    #[error("time step {dt:e} below the underflow floor")]
    StepUnderflow { dt: f64 },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("weighted norm does not converge: {0}")]
    NonIntegrable(String),
    #[error("Picard iteration diverged at iteration {iteration} (rho = {rho:e})")]
    Divergence {
        iteration: usize,
        rho: f64,
        trace: Vec<crate::picard::PicardTrace>,
    },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        LabError::PreconditionViolation(msg.into())
    }

    /// Errors a caller can fix by changing parameters, as opposed to
    /// internal or numerical failures.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            LabError::PreconditionViolation(_)
                | LabError::HorizonMismatch { .. }
                | LabError::SupportOverflow { .. }
                | LabError::RangeViolation { .. }
                | LabError::DegenerateInput(_)
                | LabError::NonIntegrable(_)
                | LabError::InsufficientData(_)
                | LabError::Parse(_)
        )
    }
}
