use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `z` sits on a band edge where both roots of the q-quadratic have unit modulus.
    #[error("degenerate branch at z = {z}: q = ±1 at the band edge")]
    DegenerateBranch { z: Complex64 },

    #[error("resolvent evaluated at the boundary pole z_p = {z_p}")]
    PoleEvaluation { z_p: Complex64 },

    #[error("wrong regime: {operation} requires {requirement}, got eta = {eta}")]
    WrongRegime {
        operation: &'static str,
        requirement: &'static str,
        eta: f64,
    },

    #[error("no localized boundary mode for eta = {eta} (requires eta > 1)")]
    NoPole { eta: f64 },

    #[error("{what} did not converge after {iterations} iterations (achieved {achieved:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        achieved: f64,
    },

    #[error("truncated lattice of {sites} sites is too small: |psi_L| = {edge_amplitude:e}, try at least {suggested} sites")]
    InadequateTruncation {
        sites: usize,
        edge_amplitude: f64,
        suggested: usize,
    },

    #[error("time step underflow at t = {t} (step {step:e})")]
    StepUnderflow { t: f64, step: f64 },

    #[error("singular system: z is {distance:e} from the nearest eigenvalue")]
    SingularSystem { distance: f64 },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
