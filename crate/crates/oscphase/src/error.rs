//! Error type shared by every solver stage.

use thiserror::Error;

/// Pipeline stage tags for errors propagated out of [`crate::solve::solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Phase,
    Levin,
    BoundaryFit,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stage::Phase => write!(f, "phase"),
            Stage::Levin => write!(f, "levin"),
            Stage::BoundaryFit => write!(f, "boundary-fit"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {point} outside domain [{low}, {high}]")]
    OutOfDomain { point: f64, low: f64, high: f64 },

    #[error("singular matrix encountered")]
    SingularMatrix,

    #[error("singular value decomposition did not converge")]
    SvdNoConvergence,

    #[error("inadmissible state at t = {t}")]
    InadmissibleState { t: f64 },

    #[error("Newton iteration failed to converge on [{low}, {high}]")]
    NewtonDiverged { low: f64, high: f64 },

    #[error(
        "subdivision budget of {budget} intervals exceeded; smallest offending interval [{low}, {high}]"
    )]
    BudgetExceeded { budget: usize, low: f64, high: f64 },

    #[error("cannot split [{low}, {high}] below the minimum width {min_width:e}")]
    MinWidthReached { low: f64, high: f64, min_width: f64 },

    #[error("coefficient q({t}) = {value} is not positive")]
    InvalidCoefficient { t: f64, value: f64 },

    #[error("phase construction produced a nonpositive frequency at t = {t}")]
    NonpositiveFrequency { t: f64 },

    #[error("resonant boundary conditions: |det| = {det:e} <= {threshold:e}")]
    Resonance { det: f64, threshold: f64 },

    #[error("quadrature failed to converge on [{low}, {high}]")]
    QuadratureFailure { low: f64, high: f64 },

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an error with the pipeline stage it came from.
    pub fn in_stage(self, stage: Stage) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The stage tag, if this error was tagged.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
